"""Hold-out metrics per evaluation slice.

The positive class is "subjective" (label 1). Precision, recall and F1
fall back to 0.0 when their denominator is zero, and the report lists which
ones did.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .kernels import confusion_counts
from .records import Dataset, InstanceRecord

log = logging.getLogger(__name__)


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def flipped(self) -> ConfusionMatrix:
        """Same matrix with label 0 as the positive class."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    zero_division: tuple[str, ...] = ()


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix) -> Metrics:
    if cm.total == 0:
        raise ValueError("metrics of an empty confusion matrix")
    flags: list[str] = []
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", flags)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", flags)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", flags)
    return Metrics((cm.tp + cm.tn) / cm.total, precision, recall, f1, tuple(flags))


def macro_metrics(cm: ConfusionMatrix) -> Metrics:
    pos, neg = metrics(cm), metrics(cm.flipped())
    flags = tuple(f"positive.{f}" for f in pos.zero_division) + tuple(f"negative.{f}" for f in neg.zero_division)
    return Metrics(
        pos.accuracy,
        (pos.precision + neg.precision) / 2,
        (pos.recall + neg.recall) / 2,
        (pos.f1 + neg.f1) / 2,
        flags,
    )


def _label_map(preds) -> dict[str, int]:
    if isinstance(preds, Mapping):
        return {str(k): int(v) for k, v in preds.items()}
    out = {}
    for p in preds:
        if isinstance(p, tuple):
            out[str(p[0])] = int(p[1])
        else:
            out[p.id] = int(p.label)
    return out


def _truth_pairs(truths) -> list[tuple[str, int]]:
    if isinstance(truths, Mapping):
        return [(str(k), int(v)) for k, v in truths.items()]
    return [(t.id, t.label) if isinstance(t, InstanceRecord) else (str(t[0]), int(t[1])) for t in truths]


def confusion(preds, truths) -> ConfusionMatrix:
    """Tally predictions against truths; both must cover the same ids."""
    pred = _label_map(preds)
    truth = _truth_pairs(truths)
    if len(pred) != len(truth):
        raise AlignmentError(f"{len(pred)} predictions for {len(truth)} truths")
    missing = [i for i, _ in truth if i not in pred]
    if missing:
        raise AlignmentError(f"no prediction for id(s) {missing[:5]}")
    tp, fp, tn, fn = confusion_counts([pred[i] for i, _ in truth], [y for _, y in truth])
    return ConfusionMatrix(tp, fp, tn, fn)


SliceFilter = Callable[[InstanceRecord], bool]


def make_slice(datasets=None, labels=None) -> SliceFilter:
    ds = None if datasets is None else {Dataset(d) for d in datasets}
    ls = None if labels is None else {int(x) for x in labels}

    def keep(rec: InstanceRecord) -> bool:
        return (ds is None or rec.dataset in ds) and (ls is None or rec.label in ls)

    return keep


BUILTIN_SLICES: dict[str, SliceFilter] = {
    "ASTD": make_slice(datasets=["ASTD"]),
    "Augmented": make_slice(),
    "LABR-HARD": make_slice(datasets=["LABR", "HARD"]),
    "SANAD": make_slice(datasets=["SANAD"]),
}


@dataclass
class EvalReport:
    slice: str
    model: str
    n: int
    confusion: ConfusionMatrix | None
    metrics: Metrics | None
    macro: Metrics | None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "slice": self.slice,
            "model": self.model,
            "n": self.n,
            "confusion": asdict(self.confusion) if self.confusion else None,
            "positive_class": _metrics_dict(self.metrics),
            "macro": _metrics_dict(self.macro),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d) -> EvalReport:
        def m(x):
            return None if x is None else Metrics(**{**x, "zero_division": tuple(x["zero_division"])})

        cm = ConfusionMatrix(**d["confusion"]) if d["confusion"] else None
        return cls(d["slice"], d["model"], d["n"], cm, m(d["positive_class"]), m(d["macro"]), list(d["warnings"]))


def _metrics_dict(m: Metrics | None):
    if m is None:
        return None
    d = asdict(m)
    d["zero_division"] = list(m.zero_division)
    return d


def slice_eval(
    predictions,
    test_set: Sequence[InstanceRecord],
    slices: Mapping[str, SliceFilter] | None = None,
    model: str = "model",
) -> list[EvalReport]:
    """One report per slice of ``test_set``; empty slices carry a warning and no metrics."""
    slices = BUILTIN_SLICES if slices is None else slices
    pred = _label_map(predictions)
    reports = []
    for name, keep in slices.items():
        part = [r for r in test_set if keep(r)]
        if not part:
            log.warning("slice %s is empty", name)
            reports.append(EvalReport(name, model, 0, None, None, None, ["empty slice"]))
            continue
        cm = confusion({r.id: pred[r.id] for r in part if r.id in pred}, part)
        m = metrics(cm)
        warnings = [f"zero denominator: {f}" for f in m.zero_division]
        reports.append(EvalReport(name, model, len(part), cm, m, macro_metrics(cm), warnings))
    return reports


def write_reports_csv(path, reports: Sequence[EvalReport], digits: int = 2) -> Path:
    """Percentages rounded for presentation; the JSON keeps full precision."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "slice", "n", "accuracy", "precision", "recall", "f1",
                    "macro_precision", "macro_recall", "macro_f1", "warnings"])
        for r in reports:
            if r.metrics is None:
                w.writerow([r.model, r.slice, r.n, "", "", "", "", "", "", "", "; ".join(r.warnings)])
                continue
            pct = [f"{100 * v:.{digits}f}" for v in (r.metrics.accuracy, r.metrics.precision, r.metrics.recall,
                                                    r.metrics.f1, r.macro.precision, r.macro.recall, r.macro.f1)]
            w.writerow([r.model, r.slice, r.n, *pct, "; ".join(r.warnings)])
    return path
