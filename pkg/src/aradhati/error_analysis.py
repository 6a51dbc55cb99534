"""Structure of ensemble errors.

Errors are split by how many components got the instance wrong. With a
strict majority vote an ensemble error always has more than half its
components wrong, so for three voters the groups are "two wrong" and
"three wrong". Errors are then categorized: SHORT by a token-count
heuristic, MIXED and MODEL_ERROR only from a manual annotation file.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .ensemble import VotesTable

CATEGORIES = ("MIXED", "MODEL_ERROR", "SHORT", "UNLABELED")
_ALIASES = {
    "mixed": "MIXED",
    "mixed tweets": "MIXED",
    "model_error": "MODEL_ERROR",
    "model error": "MODEL_ERROR",
    "model errors": "MODEL_ERROR",
    "short": "SHORT",
    "short tweets": "SHORT",
}
DEFAULT_SHORT_THRESHOLD = 2


class IncompleteVotesError(ValueError):
    pass


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorRecord:
    id: str
    text: str | None
    truth: int
    ensemble: int
    components: tuple[int, ...]
    wrong_component_count: int
    category: str = "UNLABELED"
    category_source: str | None = None


@dataclass
class ErrorPartition:
    n_instances: int
    n_models: int
    two_wrong: list[ErrorRecord]     # some but not all components wrong
    three_wrong: list[ErrorRecord]   # every component wrong

    @property
    def n_errors(self) -> int:
        return len(self.two_wrong) + len(self.three_wrong)

    @property
    def fractions(self) -> dict[str, float]:
        if not self.n_errors:
            return {"two_wrong": 0.0, "three_wrong": 0.0}
        return {"two_wrong": len(self.two_wrong) / self.n_errors,
                "three_wrong": len(self.three_wrong) / self.n_errors}


def partition_errors(votes: VotesTable, texts: Mapping[str, str] | None = None) -> ErrorPartition:
    n_models = len(votes.models)
    if n_models == 0 or n_models % 2 == 0:
        raise IncompleteVotesError(f"need an odd number of components, got {n_models}")
    texts = texts or {}
    two, three = [], []
    for k, id_ in enumerate(votes.ids):
        comp = tuple(int(v) for v in votes.votes[k])
        if any(v not in (0, 1) for v in comp):
            raise IncompleteVotesError(f"instance {id_} is missing a component vote")
        ens = int(votes.ensemble[k])
        truth = int(votes.truth[k])
        if ens not in (0, 1):
            raise IncompleteVotesError(f"instance {id_} has no ensemble label")
        if ens != int(2 * sum(comp) > n_models):
            raise IncompleteVotesError(f"instance {id_}: ensemble label {ens} is not the majority of {comp}")
        if ens == truth:
            continue
        wrong = sum(v != truth for v in comp)
        # majority arithmetic: an ensemble error has a wrong majority
        assert 2 * wrong > n_models, (id_, comp, truth)
        rec = ErrorRecord(id_, texts.get(id_), truth, ens, comp, wrong)
        (three if wrong == n_models else two).append(rec)
    return ErrorPartition(len(votes.ids), n_models, two, three)


def read_annotations(path) -> dict[str, str]:
    """``annotations.csv`` with columns id, category."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "category"} <= set(reader.fieldnames):
            raise AnnotationError(f"{path}: expected columns id, category")
        out = {}
        for row in reader:
            out[row["id"]] = canonical_category(row["category"])
    return out


def canonical_category(name: str) -> str:
    key = " ".join(name.strip().lower().split())
    if key in _ALIASES:
        return _ALIASES[key]
    raise AnnotationError(f"unknown error category {name!r}")


def is_short(text: str | None, threshold: int = DEFAULT_SHORT_THRESHOLD) -> bool:
    return text is not None and len(text.split()) <= threshold


@dataclass
class Categorized:
    records: list[ErrorRecord]
    histogram: dict[str, int]


def categorize(
    errs: Sequence[ErrorRecord],
    manual_labels: Mapping[str, str] | str | Path | None = None,
    short_threshold: int = DEFAULT_SHORT_THRESHOLD,
    known_ids: Iterable[str] | None = None,
) -> Categorized:
    """Assign a category to each error; manual labels take precedence over the SHORT heuristic."""
    if short_threshold < 1:
        raise ValueError("short_threshold must be >= 1")
    if isinstance(manual_labels, (str, Path)):
        manual_labels = read_annotations(manual_labels)
    manual = {k: canonical_category(v) for k, v in (manual_labels or {}).items()}
    known = set(known_ids) if known_ids is not None else {e.id for e in errs}
    unknown = sorted(set(manual) - known)
    if unknown:
        raise AnnotationError(f"annotations reference unknown instance id(s): {unknown[:5]}")
    out = []
    for e in errs:
        if e.id in manual:
            out.append(replace(e, category=manual[e.id], category_source="manual"))
        elif is_short(e.text, short_threshold):
            out.append(replace(e, category="SHORT", category_source="heuristic"))
        else:
            out.append(replace(e, category="UNLABELED", category_source=None))
    counts = Counter(e.category for e in out)
    return Categorized(out, {c: counts.get(c, 0) for c in CATEGORIES})


def write_errors_csv(path, records: Sequence[ErrorRecord], models: Sequence[str]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "text", "truth", "ensemble", *models, "wrong_components", "category", "category_source"])
        for r in records:
            w.writerow([r.id, r.text or "", r.truth, r.ensemble, *r.components, r.wrong_component_count,
                        r.category, r.category_source or ""])
    return path
