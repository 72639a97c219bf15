"""Annotation workflow state: task assignment, submission, finalization.

All mutations serialize through a single lock and are journaled before
being applied. Finalized labels are additionally snapshotted to a JSON
file via atomic rename.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import ValidationError
from ..evalkit.bench import BenchSample, FinalLabel
from ..evalkit.voting import AnnotationRecord, VoteResult, majority_vote
from .journal import Journal, atomic_write_json

QUORUM = 3


class DuplicateSubmission(ValidationError):
    pass


class UnknownSample(ValidationError):
    pass


@dataclass(frozen=True)
class Progress:
    pending: int
    partially_annotated: int
    finalized: int
    ties: int

    def to_json(self) -> dict:
        return {
            "pending": self.pending,
            "partially_annotated": self.partially_annotated,
            "finalized": self.finalized,
            "ties": self.ties,
        }


class AnnotationStore:
    def __init__(self, samples: list[BenchSample], journal_path: str | Path,
                 finals_path: Optional[str | Path] = None):
        self._lock = threading.Lock()
        self._samples = {s.id: s for s in samples}
        self._order = [s.id for s in samples]
        self._votes: dict[str, dict[str, AnnotationRecord]] = {
            s.id: {} for s in samples
        }
        self._finals: dict[str, VoteResult] = {}
        self._journal = Journal(journal_path)
        self._finals_path = Path(finals_path) if finals_path else None
        for entry in self._journal.replay():
            self._apply(entry["sample_id"], AnnotationRecord.from_json(entry["record"]))

    def _apply(self, sample_id: str, record: AnnotationRecord) -> Optional[VoteResult]:
        votes = self._votes[sample_id]
        votes[record.annotator_id] = record
        if len(votes) == QUORUM and sample_id not in self._finals:
            result = majority_vote(list(votes.values()))
            self._finals[sample_id] = result
            return result
        return None

    def submit(self, sample_id: str, record: AnnotationRecord) -> Optional[VoteResult]:
        """Record one annotation; returns the final label when this was
        the quorum-completing submission."""
        with self._lock:
            if sample_id not in self._samples:
                raise UnknownSample(f"unknown sample {sample_id!r}")
            if record.annotator_id in self._votes[sample_id]:
                raise DuplicateSubmission(
                    f"annotator {record.annotator_id!r} already voted on {sample_id!r}"
                )
            self._journal.append(
                {"sample_id": sample_id, "record": record.to_json()}
            )
            result = self._apply(sample_id, record)
            if result is not None and self._finals_path is not None:
                self._snapshot_finals()
            return result

    def _snapshot_finals(self) -> None:
        atomic_write_json(
            self._finals_path,
            {sid: res.to_json() for sid, res in self._finals.items()},
        )

    def next_task(self, annotator_id: str) -> Optional[BenchSample]:
        """First non-finalized sample this annotator has not yet voted on."""
        with self._lock:
            for sid in self._order:
                if sid in self._finals:
                    continue
                if annotator_id in self._votes[sid]:
                    continue
                return self._samples[sid]
        return None

    def progress(self) -> Progress:
        with self._lock:
            pending = sum(
                1 for sid in self._order
                if not self._votes[sid] and sid not in self._finals
            )
            partial = sum(
                1 for sid in self._order
                if self._votes[sid] and sid not in self._finals
            )
            ties = sum(1 for res in self._finals.values() if res.tie_flag)
            return Progress(
                pending=pending,
                partially_annotated=partial,
                finalized=len(self._finals),
                ties=ties,
            )

    def finals(self) -> dict[str, VoteResult]:
        with self._lock:
            return dict(self._finals)

    def finalized_samples(self) -> list[BenchSample]:
        """Samples with their collected annotations and final labels folded in."""
        with self._lock:
            out = []
            for sid in self._order:
                sample = self._samples[sid]
                votes = tuple(self._votes[sid].values())
                final = self._finals.get(sid)
                out.append(
                    BenchSample(
                        id=sample.id,
                        image=sample.image,
                        description=sample.description,
                        source_model=sample.source_model,
                        annotations=votes,
                        final=FinalLabel(
                            hallucinated=final.hallucinated,
                            category=final.category,
                        )
                        if final
                        else None,
                    )
                )
            return out
