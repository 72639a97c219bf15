import numpy as np
import pytest

from vbackcheck.core.masks import BinaryMask
from vbackcheck.errors import ContractError, ShapeError
from vbackcheck.tuneloss import (
    LossConfig,
    SpecialMark,
    TokenSequence,
    bce_loss,
    dice_loss,
    per_position_ce,
    run_all,
    total_loss,
    weighted_ce,
)

LN2 = np.log(2.0)


def seq(tokens, marks=None, supervised=None):
    marks = marks or [SpecialMark.NONE] * len(tokens)
    return TokenSequence(
        tokens=tuple(tokens),
        special_marks=tuple(marks),
        supervised=tuple(supervised) if supervised else None,
    )


def random_instance(rng, n=None, vocab=None):
    n = n or int(rng.integers(1, 17))
    vocab = vocab or int(rng.integers(2, 33))
    logits = rng.normal(size=(n, vocab))
    marks = [
        rng.choice([SpecialMark.NONE, SpecialMark.SEG, SpecialMark.REJ])
        for _ in range(n)
    ]
    return logits, seq(list(rng.integers(0, vocab, size=n)), marks)


class TestWeightedCe:
    def test_uniform_softmax(self):
        r = weighted_ce(np.zeros((1, 2)), seq([0]))
        assert r.loss == pytest.approx(LN2, abs=1e-12)

    def test_special_position_doubled(self):
        r = weighted_ce(
            np.zeros((1, 2)), seq([0], [SpecialMark.SEG]),
            LossConfig(special_weight=2.0),
        )
        assert r.loss == pytest.approx(2 * LN2, abs=1e-12)

    def test_weight_one_reduces_to_plain_ce(self, rng):
        for _ in range(20):
            logits, target = random_instance(rng)
            weighted = weighted_ce(logits, target, LossConfig(special_weight=1.0))
            plain = per_position_ce(logits, target).sum()
            assert weighted.loss == pytest.approx(plain, abs=1e-12)

    def test_weighting_touches_only_special_positions(self, rng):
        lam = 3.5
        for _ in range(50):
            logits, target = random_instance(rng)
            high = weighted_ce(logits, target, LossConfig(special_weight=lam)).loss
            base = weighted_ce(logits, target, LossConfig(special_weight=1.0)).loss
            ce = per_position_ce(logits, target)
            special = sum(
                ce[i]
                for i, m in enumerate(target.special_marks)
                if m is not SpecialMark.NONE
            )
            assert high - base == pytest.approx((lam - 1.0) * special, abs=1e-10)

    def test_unsupervised_positions_contribute_nothing(self, rng):
        logits = rng.normal(size=(6, 8))
        tokens = list(rng.integers(0, 8, size=6))
        full = seq(tokens, supervised=[True] * 6)
        masked = seq(tokens, supervised=[True, True, False, False, True, False])
        r = weighted_ce(logits, masked)
        ce = per_position_ce(logits, full)
        assert r.loss == pytest.approx(ce[0] + ce[1] + ce[4], abs=1e-12)
        assert np.all(r.grad[[2, 3, 5]] == 0.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            weighted_ce(np.zeros((2, 4)), seq([0]))

    def test_token_out_of_range(self):
        with pytest.raises(IndexError):
            weighted_ce(np.zeros((1, 4)), seq([4]))


class TestBce:
    def test_zero_logits(self):
        t = BinaryMask.from_array([[1, 0], [0, 1]])
        assert bce_loss(np.zeros((2, 2)), t).loss == pytest.approx(LN2, abs=1e-12)

    def test_saturated_correct(self):
        t = BinaryMask.from_array([[1, 0], [0, 1]])
        x = np.where(t.bits, 20.0, -20.0)
        assert bce_loss(x, t).loss < 1e-8

    def test_hand_case(self):
        t = BinaryMask.from_array([[1, 0]])
        r = bce_loss(np.array([[1.0, -1.0]]), t)
        assert r.loss == pytest.approx(np.log1p(np.exp(-1.0)), abs=1e-12)

    def test_stable_for_extreme_logits(self):
        t = BinaryMask.from_array([[1, 0]])
        r = bce_loss(np.array([[-1e4, 1e4]]), t)
        assert np.isfinite(r.loss) and np.all(np.isfinite(r.grad))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            bce_loss(np.zeros((2, 3)), BinaryMask.zeros(2, 2))


class TestDice:
    def test_perfect_saturated(self):
        t = BinaryMask.from_array(np.ones((2, 2)))
        r = dice_loss(np.full((2, 2), 30.0), t)
        assert r.loss == pytest.approx(0.0, abs=1e-8)

    def test_disjoint_four_plus_four(self):
        t = BinaryMask.from_array([[1, 1, 1, 1, 0, 0, 0, 0]])
        x = np.array([[-30.0] * 4 + [30.0] * 4])
        r = dice_loss(x, t)
        assert r.loss == pytest.approx(8 / 9, abs=1e-6)

    def test_empty_empty_zero_loss(self):
        t = BinaryMask.zeros(2, 2)
        r = dice_loss(np.full((2, 2), -30.0), t)
        assert r.loss == pytest.approx(0.0, abs=1e-8)

    def test_range(self, rng):
        for _ in range(50):
            h, w = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            t = BinaryMask.from_array(rng.random((h, w)) < 0.5)
            r = dice_loss(rng.normal(scale=100.0, size=(h, w)), t)
            assert 0.0 <= r.loss < 1.0


class TestTotal:
    def test_rej_sample_is_language_only(self, rng):
        logits, target = random_instance(rng)
        marks = [
            SpecialMark.REJ if m is SpecialMark.SEG else m
            for m in target.special_marks
        ]
        target = seq(list(target.tokens), marks)
        r = total_loss(logits, target)
        assert r.loss == weighted_ce(logits, target).loss
        assert r.bce is None and r.dice is None

    def test_seg_perfect_mask_adds_nothing(self, rng):
        logits, base = random_instance(rng, n=4, vocab=8)
        target = seq(list(base.tokens), [SpecialMark.SEG] + [SpecialMark.NONE] * 3)
        mask = BinaryMask.from_array([[1, 0], [0, 1]])
        x = np.where(mask.bits, 30.0, -30.0)
        r = total_loss(logits, target, x, mask)
        assert r.loss == pytest.approx(weighted_ce(logits, target).loss, abs=1e-8)

    def test_components_sum(self, rng):
        logits, base = random_instance(rng, n=5, vocab=6)
        target = seq(list(base.tokens), [SpecialMark.SEG] + [SpecialMark.NONE] * 4)
        mask = BinaryMask.from_array(rng.random((3, 3)) < 0.5)
        x = rng.normal(size=(3, 3))
        cfg = LossConfig(grounding_weight=0.7)
        r = total_loss(logits, target, x, mask, cfg)
        expected = (
            weighted_ce(logits, target, cfg).loss
            + 0.7 * (bce_loss(x, mask).loss + dice_loss(x, mask, cfg).loss)
        )
        assert r.loss == pytest.approx(expected, abs=1e-12)

    def test_mask_without_seg_mark_rejected(self, rng):
        logits, base = random_instance(rng, n=2, vocab=4)
        target = seq(list(base.tokens))
        mask = BinaryMask.zeros(2, 2)
        with pytest.raises(ContractError):
            total_loss(logits, target, np.zeros((2, 2)), mask)
        seg_target = seq(list(base.tokens), [SpecialMark.SEG, SpecialMark.NONE])
        with pytest.raises(ContractError):
            total_loss(logits, seg_target)


def test_gradient_suite_passes():
    results = run_all(instances=25, seed=7)
    for r in results:
        assert r.passed, f"{r.name}: max rel err {r.max_rel_error}"
