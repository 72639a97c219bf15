"""Individual stages of the instruction-data generation pipeline:
proposal ingestion, captioning, quality control (foreground/background
check, consistency filter, semantic NMS), and hallucination injection.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..backends.base import (
    GenerationBackend,
    GenerationRequest,
    ScorerBackend,
    ScorerRequest,
    SimilarityBackend,
    SimilarityRequest,
)
from ..core.masks import rle_decode
from ..core.types import BBox, Caption, ObjectProposal
from ..errors import FormatError, StageError, ValidationError
from .config import PipelineConfig


@dataclass(frozen=True)
class Dropped:
    proposal_id: str
    reason: str


@dataclass(frozen=True)
class NegativeRecord:
    source_proposal_id: str
    text: str
    hallucination_type: str
    explanation: str


@dataclass(frozen=True)
class FgBgImages:
    """PNG bytes of the proposal-only view (background zeroed) and the
    complement view (proposal region zeroed)."""

    fg: bytes
    bg: bytes


def ingest_proposals(image_id: str,
                     detector_output: Union[str, list[dict]]) -> list[ObjectProposal]:
    """Parse detector JSONL output for one image into validated proposals."""
    from ..core.masks import RleMask

    if isinstance(detector_output, str):
        lines = [ln for ln in detector_output.splitlines() if ln.strip()]
        try:
            records = [json.loads(ln) for ln in lines]
        except json.JSONDecodeError as exc:
            raise FormatError(f"proposal line {exc.lineno}: invalid JSON") from exc
    else:
        records = detector_output

    proposals = []
    for lineno, rec in enumerate(records, start=1):
        try:
            if rec.get("image_id") != image_id:
                raise FormatError(
                    f"image_id {rec.get('image_id')!r} != expected {image_id!r}"
                )
            x, y, w, h = rec["bbox"]
            proposal = ObjectProposal(
                id=f"{image_id}/{lineno - 1}",
                image_id=image_id,
                bbox=BBox(x=x, y=y, w=w, h=h),
                mask=RleMask.from_json(rec["mask"]),
            )
        except (KeyError, TypeError, ValueError, FormatError, ValidationError) as exc:
            raise FormatError(f"proposal line {lineno}: {exc}") from exc
        proposals.append(proposal)
    return proposals


def caption_proposal(p: ObjectProposal, generator: GenerationBackend,
                     cfg: PipelineConfig) -> Union[Caption, Dropped]:
    text = generator.generate(
        GenerationRequest(
            template=cfg.caption_template,
            slots={
                "image_id": p.image_id,
                "proposal_id": p.id,
                "bbox": [p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h],
            },
        )
    )
    if not text.strip():
        return Dropped(proposal_id=p.id, reason="empty_caption")
    return Caption(proposal_id=p.id, text=text)


def build_fgbg(p: ObjectProposal, image: np.ndarray) -> FgBgImages:
    """Split an HxWx3 uint8 image into proposal-only and complement views."""
    from PIL import Image

    mask = rle_decode(p.mask).bits
    if image.shape[:2] != mask.shape:
        raise StageError(
            f"image shape {image.shape[:2]} != mask shape {mask.shape}"
        )
    m = mask[:, :, None].astype(np.uint8)
    fg = image * m
    bg = image * (1 - m)

    def png(arr: np.ndarray) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        return buf.getvalue()

    return FgBgImages(fg=png(fg), bg=png(bg))


def fgbg_check(p: ObjectProposal, c: Caption, scorer: ScorerBackend,
               fgbg: FgBgImages) -> Union[Caption, Dropped]:
    """Retain the caption only when it aligns strictly better with the
    proposal region than with the rest of the image."""
    fg_score = scorer.score_image_text(
        ScorerRequest(text=c.text, image_bytes=fgbg.fg, image_key=f"{p.id}#fg")
    )
    bg_score = scorer.score_image_text(
        ScorerRequest(text=c.text, image_bytes=fgbg.bg, image_key=f"{p.id}#bg")
    )
    scored = Caption(proposal_id=c.proposal_id, text=c.text,
                     fg_score=fg_score, bg_score=bg_score)
    if fg_score > bg_score:
        return scored
    return Dropped(proposal_id=p.id, reason="fgbg")


def consistency_filter(c: Caption,
                       cfg: PipelineConfig) -> Union[Caption, Dropped]:
    """Discard captions whose alignment score falls below the threshold;
    a score exactly at the threshold is retained."""
    if c.fg_score is None:
        raise StageError(f"caption {c.proposal_id} reached the filter unscored")
    if c.fg_score >= cfg.consistency_threshold:
        return c
    return Dropped(proposal_id=c.proposal_id, reason="consistency")


def semantic_nms(captions: list[Caption], similarity: SimilarityBackend,
                 cfg: PipelineConfig) -> list[Caption]:
    """Greedy duplicate suppression using text similarity as overlap and
    the foreground score as confidence.

    Order by score descending (ties by original index); repeatedly keep
    the best remaining caption and drop every remaining caption whose
    similarity to it reaches the threshold.
    """
    for c in captions:
        if c.fg_score is None:
            raise StageError(f"caption {c.proposal_id} reached NMS unscored")
    remaining = sorted(
        range(len(captions)), key=lambda i: (-captions[i].fg_score, i)
    )
    kept: list[Caption] = []
    while remaining:
        best = remaining.pop(0)
        kept.append(captions[best])
        remaining = [
            i
            for i in remaining
            if similarity.text_similarity(
                SimilarityRequest(a=captions[best].text, b=captions[i].text)
            )
            < cfg.nms_similarity_threshold
        ]
    return kept


def inject_hallucination(c: Caption, context: list[Caption],
                         generator: GenerationBackend, cfg: PipelineConfig,
                         variant: int = 0) -> Union[NegativeRecord, Dropped]:
    """Ask the generator to perturb a caption into a hallucinated variant.

    The generator must return {"text", "type", "explanation"} as JSON;
    a parse failure is retried once, then the sample is skipped. A
    perturbation identical to the original is also skipped.
    """
    slots = {
        "caption": c.text,
        "context": [x.text for x in context if x.proposal_id != c.proposal_id],
        "variant": variant,
    }
    parsed: Optional[dict] = None
    for _ in range(2):
        raw = generator.generate(
            GenerationRequest(template=cfg.injection_template, slots=slots)
        )
        try:
            obj = json.loads(raw)
            text, htype, expl = obj["text"], obj["type"], obj["explanation"]
            if not all(isinstance(v, str) and v for v in (text, htype, expl)):
                raise ValueError("fields must be non-empty strings")
            parsed = {"text": text, "type": htype, "explanation": expl}
            break
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            continue
    if parsed is None:
        return Dropped(proposal_id=c.proposal_id, reason="inject_parse")
    if parsed["text"] == c.text:
        return Dropped(proposal_id=c.proposal_id, reason="no_perturbation")
    return NegativeRecord(
        source_proposal_id=c.proposal_id,
        text=parsed["text"],
        hallucination_type=parsed["type"],
        explanation=parsed["explanation"],
    )
