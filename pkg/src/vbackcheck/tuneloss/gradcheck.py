"""Finite-difference verification of the analytic loss gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.masks import BinaryMask
from .losses import (
    LossConfig,
    SpecialMark,
    TokenSequence,
    bce_loss,
    dice_loss,
    total_loss,
    weighted_ce,
)


@dataclass(frozen=True)
class GradCheckResult:
    name: str
    instances: int
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def central_difference(fn, x: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central finite-difference gradient of a scalar function of x."""
    grad = np.zeros_like(x, dtype=np.float64)
    flat = grad.reshape(-1)
    xf = x.reshape(-1)
    for i in range(xf.size):
        orig = xf[i]
        xf[i] = orig + step
        hi = fn(x)
        xf[i] = orig - step
        lo = fn(x)
        xf[i] = orig
        flat[i] = (hi - lo) / (2.0 * step)
    return grad


def _rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


def random_token_instance(rng: np.random.Generator, max_len: int = 16,
                          max_vocab: int = 32):
    n = int(rng.integers(1, max_len + 1))
    vocab = int(rng.integers(2, max_vocab + 1))
    logits = rng.normal(scale=2.0, size=(n, vocab))
    tokens = tuple(int(t) for t in rng.integers(0, vocab, size=n))
    marks = tuple(
        rng.choice([SpecialMark.NONE, SpecialMark.SEG, SpecialMark.REJ],
                   p=[0.8, 0.1, 0.1])
        for _ in range(n)
    )
    supervised = tuple(bool(b) for b in rng.random(n) < 0.8)
    return logits, TokenSequence(tokens=tokens, special_marks=marks,
                                 supervised=supervised)


def random_mask_instance(rng: np.random.Generator, max_side: int = 8):
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    pred = rng.normal(scale=3.0, size=(h, w))
    target = BinaryMask.from_array(rng.random((h, w)) < 0.5)
    return pred, target


def check_weighted_ce(instances: int, rng: np.random.Generator,
                      step: float = 1e-4, tol: float = 1e-4) -> GradCheckResult:
    cfg = LossConfig(special_weight=2.0)
    worst = 0.0
    for _ in range(instances):
        logits, target = random_token_instance(rng)
        analytic = weighted_ce(logits, target, cfg).grad
        numeric = central_difference(
            lambda x: weighted_ce(x, target, cfg).loss, logits, step
        )
        worst = max(worst, _rel_error(analytic, numeric))
    return GradCheckResult("weighted_ce", instances, worst, tol)


def check_bce(instances: int, rng: np.random.Generator,
              step: float = 1e-4, tol: float = 1e-4) -> GradCheckResult:
    worst = 0.0
    for _ in range(instances):
        pred, target = random_mask_instance(rng)
        analytic = bce_loss(pred, target).grad
        numeric = central_difference(
            lambda x: bce_loss(x, target).loss, pred, step
        )
        worst = max(worst, _rel_error(analytic, numeric))
    return GradCheckResult("bce_loss", instances, worst, tol)


def check_dice(instances: int, rng: np.random.Generator,
               step: float = 1e-4, tol: float = 1e-4) -> GradCheckResult:
    cfg = LossConfig()
    worst = 0.0
    for _ in range(instances):
        pred, target = random_mask_instance(rng)
        analytic = dice_loss(pred, target, cfg).grad
        numeric = central_difference(
            lambda x: dice_loss(x, target, cfg).loss, pred, step
        )
        worst = max(worst, _rel_error(analytic, numeric))
    return GradCheckResult("dice_loss", instances, worst, tol)


def check_total(instances: int, rng: np.random.Generator,
                step: float = 1e-4, tol: float = 1e-4) -> GradCheckResult:
    cfg = LossConfig()
    worst = 0.0
    for _ in range(instances):
        logits, target = random_token_instance(rng)
        if not any(m is SpecialMark.SEG for m in target.special_marks):
            marks = list(target.special_marks)
            marks[0] = SpecialMark.SEG
            target = TokenSequence(tokens=target.tokens,
                                   special_marks=tuple(marks),
                                   supervised=target.supervised)
        pred, mask = random_mask_instance(rng)

        analytic_logits = total_loss(logits, target, pred, mask, cfg).language.grad
        numeric_logits = central_difference(
            lambda x: total_loss(x, target, pred, mask, cfg).loss, logits, step
        )
        worst = max(worst, _rel_error(analytic_logits, numeric_logits))

        result = total_loss(logits, target, pred, mask, cfg)
        analytic_mask = cfg.grounding_weight * (result.bce.grad + result.dice.grad)
        numeric_mask = central_difference(
            lambda x: total_loss(logits, target, x, mask, cfg).loss, pred, step
        )
        worst = max(worst, _rel_error(analytic_mask, numeric_mask))
    return GradCheckResult("total_loss", instances, worst, tol)


def run_all(instances: int = 100, seed: int = 0) -> list[GradCheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_weighted_ce(instances, rng),
        check_bce(instances, rng),
        check_dice(instances, rng),
        check_total(instances, rng),
    ]
