import json
import random

import pytest

from aradhati.evaluation import (
    AlignmentError,
    BUILTIN_SLICES,
    ConfusionMatrix,
    EvalReport,
    confusion,
    macro_metrics,
    make_slice,
    metrics,
    slice_eval,
    write_reports_csv,
)
from aradhati.records import Class4, Dataset, InstanceRecord


def test_worked_example():
    m = metrics(ConfusionMatrix(tp=3, fp=1, tn=4, fn=2))
    assert m.accuracy == pytest.approx(0.7, abs=1e-9)
    assert m.precision == pytest.approx(0.75, abs=1e-9)
    assert m.recall == pytest.approx(0.6, abs=1e-9)
    assert m.f1 == pytest.approx(2 / 3, abs=1e-9)
    assert m.zero_division == ()


def test_zero_denominators_flagged():
    m = metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0))
    assert (m.accuracy, m.precision, m.recall, m.f1) == (1.0, 0.0, 0.0, 0.0)
    assert m.zero_division == ("precision", "recall", "f1")
    m = metrics(ConfusionMatrix(tp=0, fp=2, tn=0, fn=3))
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
    assert m.zero_division == ("f1",)
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix(0, 0, 0, 0))


def test_macro_averages_both_classes():
    cm = ConfusionMatrix(tp=3, fp=1, tn=4, fn=2)
    neg = metrics(cm.flipped())
    assert neg.precision == pytest.approx(4 / 6)
    assert neg.recall == pytest.approx(0.8)
    mac = macro_metrics(cm)
    assert mac.precision == pytest.approx((0.75 + 4 / 6) / 2)
    assert mac.recall == pytest.approx((0.6 + 0.8) / 2)


def test_confusion_alignment():
    truths = {"a": 1, "b": 0, "c": 1}
    assert confusion({"a": 1, "b": 1, "c": 0}, truths) == ConfusionMatrix(tp=1, fp=1, tn=0, fn=1)
    with pytest.raises(AlignmentError):
        confusion({"a": 1, "b": 1}, truths)
    with pytest.raises(AlignmentError):
        confusion({"a": 1, "b": 1, "z": 0}, truths)


def test_permutation_invariance():
    rng = random.Random(3)
    pairs = [(f"i{k}", rng.randint(0, 1), rng.randint(0, 1)) for k in range(60)]
    base = metrics(confusion({i: p for i, p, _ in pairs}, [(i, t) for i, _, t in pairs]))
    rng.shuffle(pairs)
    assert metrics(confusion({i: p for i, p, _ in pairs}, [(i, t) for i, _, t in pairs])) == base


def _test_set():
    out = []
    for k in range(6):
        out.append(InstanceRecord(f"A{k}", "نص", Class4.OBJ if k % 2 else Class4.POS, "Tweets", 1 - k % 2,
                                  Dataset.ASTD))
    out.append(InstanceRecord("L0", "نص", Class4.POS, "Book reviews", 1, Dataset.LABR))
    out.append(InstanceRecord("H0", "نص", Class4.NEG, "Hotel reviews", 1, Dataset.HARD))
    out.append(InstanceRecord("S0", "نص", Class4.OBJ, "Sports", 0, Dataset.SANAD))
    return out


def test_slices_perfect_and_inverted():
    test = _test_set()
    perfect = slice_eval({r.id: r.label for r in test}, test)
    inverted = slice_eval({r.id: 1 - r.label for r in test}, test)
    assert [r.slice for r in perfect] == list(BUILTIN_SLICES)
    assert all(r.metrics.accuracy == 1.0 for r in perfect)
    assert all(r.metrics.accuracy == 0.0 for r in inverted)
    by = {r.slice: r.n for r in perfect}
    assert by == {"ASTD": 6, "Augmented": 9, "LABR-HARD": 2, "SANAD": 1}
    assert by["ASTD"] + by["LABR-HARD"] + by["SANAD"] == by["Augmented"]
    sanad = next(r for r in perfect if r.slice == "SANAD")
    assert "zero denominator: precision" in sanad.warnings


def test_empty_slice_and_round_trip(tmp_path):
    test = _test_set()
    reports = slice_eval({r.id: r.label for r in test}, test, {"none": make_slice(labels=[5]), **BUILTIN_SLICES})
    assert reports[0].n == 0 and reports[0].metrics is None
    again = [EvalReport.from_dict(json.loads(json.dumps(r.to_dict()))) for r in reports]
    assert again == reports
    lines = write_reports_csv(tmp_path / "r.csv", reports).read_text(encoding="utf-8").splitlines()
    assert lines[1].startswith("model,none,0,,")
    assert lines[2].startswith("model,ASTD,6,100.00,100.00,100.00,100.00")


def test_confusion_kernels_agree():
    import numpy as np

    from aradhati import _kernels_py, kernels

    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(0, 500))
        p = rng.integers(-1, 3, size=n).astype(np.int8)
        t = rng.integers(-1, 3, size=n).astype(np.int8)
        assert kernels.confusion_counts(p, t) == _kernels_py.confusion_counts(p, t)
    with pytest.raises(ValueError):
        kernels.confusion_counts([1, 0], [1])
