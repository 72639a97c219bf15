"""Decision engine: response text -> per-sentence grounding verdicts.

Each sentence is turned into a grounding query via a configurable
template; the backend's SEG/REJ token maps one-to-one onto the verdict,
with no heuristic overrides. Backend protocol failures become
first-class error verdicts rather than being conflated with
hallucinations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..backends.base import GroundingBackend, GroundingRequest
from ..core.sentences import split_sentences
from ..core.types import Decision, GroundToken, Verdict
from ..errors import ContractError, ProtocolError, ValidationError

QUERY_TEMPLATES = {
    "default": "Please segment the region this sentence describes: {sentence}",
    "bare": "{sentence}",
}


@dataclass(frozen=True)
class CheckRequest:
    image_ref: str
    response_text: str
    template_id: str = "default"
    max_sentences: Optional[int] = None

    def __post_init__(self):
        if not self.response_text.strip():
            raise ContractError("response_text must be non-empty")
        if self.template_id not in QUERY_TEMPLATES:
            raise ValidationError(f"unknown query template {self.template_id!r}")


@dataclass(frozen=True)
class CheckSummary:
    n_sentences: int
    n_hallucinated: int
    n_errors: int

    @property
    def hallucinated(self) -> bool:
        return self.n_hallucinated > 0


@dataclass(frozen=True)
class CheckReport:
    verdicts: tuple[Verdict, ...]
    template_id: str
    summary: CheckSummary = field(init=False)

    def __post_init__(self):
        n_hall = sum(1 for v in self.verdicts if v.decision is Decision.HALLUCINATED)
        n_err = sum(1 for v in self.verdicts if v.decision is Decision.ERROR)
        object.__setattr__(
            self,
            "summary",
            CheckSummary(len(self.verdicts), n_hall, n_err),
        )

    def to_json(self) -> dict:
        return {
            "verdicts": [v.to_json() for v in self.verdicts],
            "summary": {
                "n_sentences": self.summary.n_sentences,
                "n_hallucinated": self.summary.n_hallucinated,
                "n_errors": self.summary.n_errors,
                "hallucinated": self.summary.hallucinated,
            },
            "template_id": self.template_id,
        }


def _verdict_for(sentence: str, image_ref: str, template: str,
                 backend: GroundingBackend) -> Verdict:
    query = template.format(sentence=sentence)
    try:
        resp = backend.ground(GroundingRequest(query=query, image_id=image_ref))
    except ProtocolError as exc:
        return Verdict(sentence=sentence, decision=Decision.ERROR, error=str(exc))
    if resp.token is GroundToken.SEG:
        return Verdict(
            sentence=sentence,
            decision=Decision.GROUNDED,
            mask=resp.mask,
            raw_token=GroundToken.SEG,
        )
    return Verdict(
        sentence=sentence,
        decision=Decision.HALLUCINATED,
        explanation=resp.explanation,
        raw_token=GroundToken.REJ,
    )


def check(req: CheckRequest, backend: GroundingBackend,
          parallelism: int = 1) -> CheckReport:
    """Verify every sentence of a response against the image.

    Verdicts are re-sequenced by sentence index, so the report order is
    independent of backend completion order.
    """
    sentences = split_sentences(req.response_text)
    if req.max_sentences is not None:
        sentences = sentences[: req.max_sentences]
    template = QUERY_TEMPLATES[req.template_id]

    if parallelism <= 1 or len(sentences) <= 1:
        verdicts = [
            _verdict_for(s, req.image_ref, template, backend) for s in sentences
        ]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            verdicts = list(
                pool.map(
                    lambda s: _verdict_for(s, req.image_ref, template, backend),
                    sentences,
                )
            )
    return CheckReport(verdicts=tuple(verdicts), template_id=req.template_id)


def check_batch(requests: list[CheckRequest], backend: GroundingBackend,
                parallelism: int = 1) -> list[CheckReport | Exception]:
    """Run check() over a batch; per-request failures are isolated and
    returned in place so positions are preserved."""
    if parallelism < 1:
        raise ContractError("parallelism must be >= 1")

    def one(req: CheckRequest):
        try:
            return check(req, backend)
        except Exception as exc:  # noqa: BLE001 - isolation is the contract
            return exc

    if parallelism == 1:
        return [one(r) for r in requests]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, requests))
