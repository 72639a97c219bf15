import itertools
import json
from collections import Counter

import numpy as np
import pytest

from vbackcheck.core.masks import BinaryMask, rle_encode
from vbackcheck.core.types import GroundToken, HallucinationCategory
from vbackcheck.errors import FormatError, ValidationError
from vbackcheck.evalkit import (
    AnnotationRecord,
    BenchSample,
    DetectionEvalItem,
    FinalLabel,
    GroundingEvalItem,
    GtLabel,
    PopeSplit,
    Ratio,
    detection_metrics,
    grounding_metrics,
    load_bench,
    majority_vote,
    pope_accuracy,
    save_bench,
    slice_report,
    word_count_bucket,
)

CAT = HallucinationCategory
VOTE_CHOICES = [None, CAT.OBJECT, CAT.ATTRIBUTE, CAT.RELATION]


def record(annotator, choice):
    return AnnotationRecord(
        annotator_id=annotator,
        hallucinated=choice is not None,
        category=choice,
    )


def vote_oracle(choices):
    """Independent re-derivation of the voting rule from its definition."""
    hallucinated = sum(c is not None for c in choices) >= 2
    if not hallucinated:
        return False, None, False
    counts = Counter(c for c in choices if c is not None)
    top = max(counts.values())
    tied = sorted((c for c, n in counts.items() if n == top), key=lambda c: c.value)
    return True, tied[0], len(tied) > 1


class TestMajorityVote:
    def test_clear_majority_object(self):
        result = majority_vote(
            [record("a", CAT.OBJECT), record("b", CAT.OBJECT), record("c", None)]
        )
        assert (result.hallucinated, result.category, result.tie_flag) == (
            True, CAT.OBJECT, False,
        )

    def test_clean_majority(self):
        result = majority_vote(
            [record("a", None), record("b", None), record("c", CAT.ATTRIBUTE)]
        )
        assert result.hallucinated is False
        assert result.category is None

    def test_three_way_tie_flags_and_picks_first(self):
        result = majority_vote(
            [record("a", CAT.OBJECT), record("b", CAT.ATTRIBUTE),
             record("c", CAT.RELATION)]
        )
        assert result.hallucinated is True
        assert result.tie_flag is True
        assert result.category is CAT.ATTRIBUTE  # lexicographically first

    def test_duplicate_annotator_rejected(self):
        with pytest.raises(ValidationError):
            majority_vote([record("a", None), record("a", None), record("b", None)])

    def test_all_combinations_match_oracle(self):
        for combo in itertools.product(VOTE_CHOICES, repeat=3):
            records = [record(a, c) for a, c in zip("abc", combo)]
            result = majority_vote(records)
            assert (result.hallucinated, result.category, result.tie_flag) == \
                vote_oracle(combo), combo

    def test_permutation_invariance(self):
        for combo in itertools.product(VOTE_CHOICES, repeat=3):
            outcomes = {
                majority_vote([record(a, c) for a, c in zip("abc", perm)]).to_json()["category"]
                for perm in itertools.permutations(combo)
            }
            assert len(outcomes) == 1, combo


def full_mask(h, w):
    return rle_encode(BinaryMask.from_array(np.ones((h, w))))


def half_mask():
    return rle_encode(BinaryMask.from_array([[1, 1], [0, 0]]))


def pos_item(pred_token=GroundToken.SEG, pred_mask=None):
    return GroundingEvalItem(
        query="q",
        gt_label=GtLabel.POSITIVE,
        gt_mask=full_mask(2, 2),
        pred_token=pred_token,
        pred_mask=pred_mask if pred_token is GroundToken.SEG else None,
    )


def neg_item(pred_token=GroundToken.REJ, pred_mask=None):
    return GroundingEvalItem(
        query="q", gt_label=GtLabel.NEGATIVE,
        pred_token=pred_token,
        pred_mask=pred_mask if pred_token is GroundToken.SEG else None,
    )


class TestGroundingMetrics:
    def test_n_acc_ratio(self):
        items = [neg_item() for _ in range(3)] + [
            neg_item(GroundToken.SEG, full_mask(2, 2))
        ]
        report = grounding_metrics(items)
        assert report.n_acc.value == 0.75
        assert report.n_acc.to_json() == {"num": 3.0, "den": 4.0, "value": 0.75}

    def test_mean_iou_mixes_negatives(self):
        items = [
            pos_item(GroundToken.SEG, full_mask(2, 2)),  # IoU 1.0
            pos_item(GroundToken.SEG, half_mask()),      # IoU 0.5
            neg_item(),                                  # correctly rejected: 1.0
        ]
        report = grounding_metrics(items)
        assert report.mean_iou.value == pytest.approx((1.0 + 0.5 + 1.0) / 3)
        assert report.cum_iou.value == pytest.approx((4 + 2) / (4 + 4))

    def test_perfect_predictor(self):
        items = [pos_item(GroundToken.SEG, full_mask(2, 2)), neg_item()]
        report = grounding_metrics(items)
        assert report.mean_iou.value == 1.0
        assert report.cum_iou.value == 1.0
        assert report.n_acc.value == 1.0
        assert report.t_acc.value == 1.0

    def test_always_rej_degenerate(self):
        items = [pos_item(GroundToken.REJ) for _ in range(5)] + [
            neg_item() for _ in range(5)
        ]
        report = grounding_metrics(items)
        assert report.t_acc.value == 0.0
        assert report.n_acc.value == 1.0

    def test_always_seg_degenerate(self):
        items = [pos_item(GroundToken.SEG, full_mask(2, 2)) for _ in range(5)] + [
            neg_item(GroundToken.SEG, full_mask(2, 2)) for _ in range(5)
        ]
        report = grounding_metrics(items)
        assert report.t_acc.value == 1.0
        assert report.n_acc.value == 0.0

    def test_empty_denominator_absent(self):
        report = grounding_metrics([neg_item()])
        assert report.t_acc.value is None
        assert report.n_acc.value == 1.0

    def test_dimension_mismatch_counted_as_error(self):
        bad = GroundingEvalItem(
            query="q", gt_label=GtLabel.POSITIVE, gt_mask=full_mask(2, 2),
            pred_token=GroundToken.SEG, pred_mask=full_mask(3, 3),
        )
        report = grounding_metrics([bad, neg_item()])
        assert report.errors == 1
        assert report.mean_iou.den == 1.0

    def test_thresholded_t_acc(self):
        items = [
            pos_item(GroundToken.SEG, full_mask(2, 2)),
            pos_item(GroundToken.SEG, half_mask()),
        ]
        report = grounding_metrics(items, t_acc_iou_threshold=0.75)
        assert report.t_acc.value == 1.0
        assert report.t_acc_thresholded.value == 0.5

    def test_invariants_rejected(self):
        with pytest.raises(ValidationError):
            GroundingEvalItem(
                query="q", gt_label=GtLabel.POSITIVE,
                pred_token=GroundToken.REJ,
            )


def det_item(gt, pred, cat=CAT.OBJECT):
    return DetectionEvalItem(
        gt_hallucinated=gt, pred_hallucinated=pred,
        gt_category=cat if gt else None,
    )


class TestDetectionMetrics:
    def test_perfect(self):
        items = [det_item(True, True), det_item(False, False)]
        report = detection_metrics(items)
        assert report.acc.value == 1.0
        assert report.neg_acc.value == 1.0
        assert report.pos_acc.value == 1.0

    def test_hand_confusion_table(self):
        items = [
            det_item(True, True), det_item(True, False),
            det_item(False, False), det_item(False, False),
        ]
        report = detection_metrics(items)
        assert report.neg_acc.value == 0.5
        assert report.pos_acc.value == 1.0
        assert report.acc.value == 0.75

    def test_always_clean_predictor(self):
        items = [det_item(True, False), det_item(False, False)]
        report = detection_metrics(items)
        assert report.pos_acc.value == 1.0
        assert report.neg_acc.value == 0.0

    def test_per_category(self):
        items = [
            det_item(True, True, CAT.OBJECT),
            det_item(True, False, CAT.OBJECT),
            det_item(True, True, CAT.RELATION),
        ]
        report = detection_metrics(items)
        assert report.per_category[CAT.OBJECT].value == 0.5
        assert report.per_category[CAT.RELATION].value == 1.0

    def test_matches_confusion_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 200))
            items = [
                det_item(bool(g), bool(p), CAT(rng.choice([c.value for c in CAT])))
                for g, p in zip(rng.integers(0, 2, n), rng.integers(0, 2, n))
            ]
            report = detection_metrics(items)
            correct = sum(i.gt_hallucinated == i.pred_hallucinated for i in items)
            assert report.acc.value == pytest.approx(correct / n)
            neg = [i for i in items if i.gt_hallucinated]
            if neg:
                hit = sum(i.pred_hallucinated for i in neg)
                assert report.neg_acc.value == pytest.approx(hit / len(neg))

    def test_mergeable(self, rng):
        items = [det_item(bool(g), bool(p)) for g, p in rng.integers(0, 2, (60, 2))]
        whole = detection_metrics(items)
        left = detection_metrics(items[:25])
        right = detection_metrics(items[25:])
        assert left.acc.merge(right.acc) == whole.acc
        assert left.neg_acc.merge(right.neg_acc) == whole.neg_acc


class TestPope:
    def test_ratios(self):
        assert pope_accuracy([(True, True)], PopeSplit.RANDOM) == 1.0
        assert pope_accuracy([(True, False)], PopeSplit.POPULAR) == 0.0
        items = [(True, True), (False, False), (True, True), (True, False)]
        assert pope_accuracy(items, PopeSplit.ADVERSARIAL) == 0.75

    def test_empty_is_absent(self):
        assert pope_accuracy([], PopeSplit.RANDOM) is None


def bench_sample(id, description="a cat on a mat", model="model-a",
                 final=None):
    return BenchSample(
        id=id, image=f"{id}.png", description=description, source_model=model,
        annotations=tuple(
            record(a, CAT.OBJECT if (final and final.hallucinated) else None)
            for a in "abc"
        )
        if final
        else (),
        final=final,
    )


class TestBench:
    def test_load_empty(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        path.write_text("")
        assert load_bench(path) == []

    def test_round_trip(self, tmp_path):
        samples = [
            bench_sample("s1", final=FinalLabel(True, CAT.OBJECT)),
            bench_sample("s2", final=FinalLabel(False)),
        ]
        path = tmp_path / "bench.jsonl"
        save_bench(samples, path)
        loaded = load_bench(path)
        assert [s.id for s in loaded] == ["s1", "s2"]
        assert loaded[0].final.category is CAT.OBJECT

    def test_schema_error_names_line(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        path.write_text(json.dumps({"id": "x"}) + "\n")
        with pytest.raises(FormatError, match=":1"):
            load_bench(path)

    def test_word_count_buckets(self):
        assert word_count_bucket("one two three four five six seven") == "6-10"
        assert word_count_bucket("word") == "1-5"
        assert word_count_bucket(" ".join(["w"] * 110)) == "51-110"
        assert word_count_bucket(" ".join(["w"] * 200)) == "111+"

    def test_slice_by_model(self):
        samples = [
            bench_sample("s1", model="A", final=FinalLabel(True, CAT.OBJECT)),
            bench_sample("s2", model="B", final=FinalLabel(False)),
        ]
        report = slice_report(samples, {"s1": True, "s2": False}, "source_model")
        assert report["A"].acc.value == 1.0
        assert report["B"].acc.value == 1.0

    def test_final_requires_three_annotations(self):
        with pytest.raises(ValidationError):
            BenchSample(
                id="x", image="x.png", description="d", source_model="m",
                annotations=(record("a", None),),
                final=FinalLabel(False),
            )


def test_ratio_merge_associative(rng):
    ratios = [Ratio(float(n), float(d)) for n, d in rng.integers(1, 9, (10, 2))]
    left = ratios[0]
    for r in ratios[1:]:
        left = left.merge(r)
    assert left.num == sum(r.num for r in ratios)
    assert left.den == sum(r.den for r in ratios)
