"""End-to-end instruction-data generation.

Per-image work items are independent and run in parallel up to
``max_in_flight``; outputs are re-sorted by image id and proposal index
so completion order never affects the files written.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..backends.base import (
    GenerationBackend,
    GenerationRequest,
    ScorerBackend,
    SimilarityBackend,
)
from ..core.types import Caption, ObjectProposal
from ..errors import StageError
from .config import PipelineConfig
from .samples import (
    NEGATIVE_RESPONSE_PREFIX,
    POSITIVE_RESPONSE,
    InstructSample,
    SampleLabel,
    write_samples,
)
from .stages import (
    Dropped,
    NegativeRecord,
    build_fgbg,
    caption_proposal,
    consistency_filter,
    fgbg_check,
    ingest_proposals,
    inject_hallucination,
    semantic_nms,
)

ImageLoader = Callable[[str, tuple[int, int]], np.ndarray]


def synthetic_image_loader(image_id: str, size: tuple[int, int]) -> np.ndarray:
    """Deterministic placeholder pixels for stub-backed runs."""
    h, w = size
    row = np.linspace(0, 255, w, dtype=np.uint8)
    return np.broadcast_to(row[None, :, None], (h, w, 3)).copy()


def directory_image_loader(image_dir: str | Path) -> ImageLoader:
    from PIL import Image

    image_dir = Path(image_dir)

    def load(image_id: str, size: tuple[int, int]) -> np.ndarray:
        path = image_dir / image_id
        if not path.exists():
            path = image_dir / f"{image_id}.png"
        try:
            with Image.open(path) as img:
                arr = np.asarray(img.convert("RGB"))
        except (OSError, ValueError) as exc:
            raise StageError(f"cannot load image {image_id!r}: {exc}") from exc
        return arr

    return load


@dataclass
class PipelineReport:
    images: int = 0
    proposed: int = 0
    captioned: int = 0
    fgbg_kept: int = 0
    consistency_kept: int = 0
    nms_kept: int = 0
    positives_a: int = 0
    negatives_a: int = 0
    positives_b: int = 0
    negatives_b: int = 0
    drop_reasons: Counter = field(default_factory=Counter)

    def merge(self, other: "PipelineReport") -> "PipelineReport":
        merged = PipelineReport(
            **{
                name: getattr(self, name) + getattr(other, name)
                for name in (
                    "images", "proposed", "captioned", "fgbg_kept",
                    "consistency_kept", "nms_kept", "positives_a",
                    "negatives_a", "positives_b", "negatives_b",
                )
            }
        )
        merged.drop_reasons = self.drop_reasons + other.drop_reasons
        return merged

    def to_json(self) -> dict:
        return {
            "images": self.images,
            "proposed": self.proposed,
            "captioned": self.captioned,
            "fgbg_kept": self.fgbg_kept,
            "consistency_kept": self.consistency_kept,
            "nms_kept": self.nms_kept,
            "positives_a": self.positives_a,
            "negatives_a": self.negatives_a,
            "positives_b": self.positives_b,
            "negatives_b": self.negatives_b,
            "drop_reasons": dict(sorted(self.drop_reasons.items())),
        }


@dataclass(frozen=True)
class PipelineResult:
    rinstruct_a: list[InstructSample]
    rinstruct_b: list[InstructSample]
    report: PipelineReport


@dataclass(frozen=True)
class _ImageOutput:
    image_id: str
    a_samples: list[InstructSample]
    b_samples: list[InstructSample]
    report: PipelineReport


def _negative_sample(image_id: str, sample_id: str, neg: NegativeRecord,
                     stage: str) -> InstructSample:
    return InstructSample(
        id=sample_id,
        image=image_id,
        query=neg.text,
        label=SampleLabel.NEGATIVE,
        response=NEGATIVE_RESPONSE_PREFIX + neg.explanation,
        hallucination_type=neg.hallucination_type,
        explanation=neg.explanation,
        provenance={"stage": stage, "source": neg.source_proposal_id},
    )


def _process_image(image_id: str, records: list[dict], cfg: PipelineConfig,
                   scorer: ScorerBackend, similarity: SimilarityBackend,
                   generator: GenerationBackend,
                   image_loader: ImageLoader) -> _ImageOutput:
    report = PipelineReport(images=1)
    proposals = ingest_proposals(image_id, records)
    report.proposed = len(proposals)

    captioned: list[tuple[ObjectProposal, Caption]] = []
    for p in proposals:
        result = caption_proposal(p, generator, cfg)
        if isinstance(result, Dropped):
            report.drop_reasons[result.reason] += 1
            continue
        captioned.append((p, result))
    report.captioned = len(captioned)

    checked: list[tuple[ObjectProposal, Caption]] = []
    for p, c in captioned:
        size = (p.mask.size[0], p.mask.size[1])
        fgbg = build_fgbg(p, image_loader(image_id, size))
        result = fgbg_check(p, c, scorer, fgbg)
        if isinstance(result, Dropped):
            report.drop_reasons[result.reason] += 1
            continue
        checked.append((p, result))
    report.fgbg_kept = len(checked)

    consistent: list[tuple[ObjectProposal, Caption]] = []
    for p, c in checked:
        result = consistency_filter(c, cfg)
        if isinstance(result, Dropped):
            report.drop_reasons[result.reason] += 1
            continue
        consistent.append((p, result))
    report.consistency_kept = len(consistent)

    kept_captions = semantic_nms([c for _, c in consistent], similarity, cfg)
    report.drop_reasons["nms"] += len(consistent) - len(kept_captions)
    index_of = {p.id: i for i, p in enumerate(proposals)}
    by_pid = {c.proposal_id: p for p, c in consistent}
    kept = sorted(
        ((by_pid[c.proposal_id], c) for c in kept_captions),
        key=lambda pc: index_of[pc[0].id],
    )
    report.nms_kept = len(kept)

    a_samples: list[InstructSample] = []
    for p, c in kept:
        a_samples.append(
            InstructSample(
                id=f"{p.id}/pos",
                image=image_id,
                query=c.text,
                label=SampleLabel.POSITIVE,
                mask=p.mask,
                response=POSITIVE_RESPONSE,
                provenance={"stage": "proposal_caption", "source": p.id},
            )
        )
        report.positives_a += 1
        for k in range(cfg.negatives_per_caption):
            result = inject_hallucination(
                c, [x for _, x in kept], generator, cfg, variant=k
            )
            if isinstance(result, Dropped):
                report.drop_reasons[result.reason] += 1
                continue
            a_samples.append(
                _negative_sample(image_id, f"{p.id}/neg{k}", result, "injection")
            )
            report.negatives_a += 1

    b_samples: list[InstructSample] = []
    if kept:
        holistic_text = generator.generate(
            GenerationRequest(
                template=cfg.holistic_template,
                slots={
                    "image_id": image_id,
                    "captions": [c.text for _, c in kept],
                },
            )
        )
        if holistic_text.strip():
            holistic = Caption(proposal_id=f"{image_id}/holistic",
                               text=holistic_text)
            b_samples.append(
                InstructSample(
                    id=f"{image_id}/holistic/pos",
                    image=image_id,
                    query=holistic.text,
                    label=SampleLabel.POSITIVE,
                    response=POSITIVE_RESPONSE,
                    provenance={"stage": "holistic_caption", "source": image_id},
                )
            )
            report.positives_b += 1
            for k in range(cfg.negatives_per_caption):
                result = inject_hallucination(
                    holistic, [], generator, cfg, variant=k
                )
                if isinstance(result, Dropped):
                    report.drop_reasons[result.reason] += 1
                    continue
                b_samples.append(
                    _negative_sample(
                        image_id, f"{image_id}/holistic/neg{k}", result,
                        "holistic_injection",
                    )
                )
                report.negatives_b += 1
        else:
            report.drop_reasons["empty_holistic"] += 1

    return _ImageOutput(image_id=image_id, a_samples=a_samples,
                        b_samples=b_samples, report=report)


def load_proposal_file(path: str | Path) -> dict[str, list[dict]]:
    """Group a proposals JSONL file by image id, preserving line order."""
    from ..errors import FormatError

    groups: dict[str, list[dict]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                image_id = rec["image_id"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
            groups.setdefault(image_id, []).append(rec)
    return groups


def run_pipeline(proposals_by_image: dict[str, list[dict]],
                 cfg: PipelineConfig,
                 scorer: ScorerBackend,
                 similarity: SimilarityBackend,
                 generator: GenerationBackend,
                 image_loader: Optional[ImageLoader] = None) -> PipelineResult:
    """Run all four stages over every image and assemble both datasets.

    Per-item failures are folded into the report; only configuration or
    backend-unreachable errors abort the run.
    """
    loader = image_loader or synthetic_image_loader
    image_ids = sorted(proposals_by_image)

    def work(image_id: str) -> _ImageOutput:
        return _process_image(
            image_id, proposals_by_image[image_id], cfg,
            scorer, similarity, generator, loader,
        )

    if cfg.max_in_flight == 1 or len(image_ids) <= 1:
        outputs = [work(i) for i in image_ids]
    else:
        with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
            outputs = list(pool.map(work, image_ids))

    outputs.sort(key=lambda o: o.image_id)
    report = PipelineReport()
    a: list[InstructSample] = []
    b: list[InstructSample] = []
    for out in outputs:
        report = report.merge(out.report)
        a.extend(out.a_samples)
        b.extend(out.b_samples)
    return PipelineResult(rinstruct_a=a, rinstruct_b=b, report=report)


def write_outputs(result: PipelineResult, out_dir: str | Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "rinstruct_a": out_dir / "rinstruct_a.jsonl",
        "rinstruct_b": out_dir / "rinstruct_b.jsonl",
        "report": out_dir / "report.json",
    }
    write_samples(result.rinstruct_a, paths["rinstruct_a"])
    write_samples(result.rinstruct_b, paths["rinstruct_b"])
    with open(paths["report"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.report.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
