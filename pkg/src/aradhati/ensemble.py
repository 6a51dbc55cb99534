"""Hard majority voting over component classifiers."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .harness import ModelHandle, PredictionRecord, predict
from .kernels import majority_vote

log = logging.getLogger(__name__)


class VoteConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Vote:
    model: str
    label: int
    score: float | None = None


@dataclass(frozen=True)
class VoteSet:
    id: str
    votes: tuple[Vote, ...]
    allow_even: bool = False

    def __post_init__(self):
        n = len(self.votes)
        if n == 0:
            raise VoteConfigError(f"{self.id}: no votes")
        if n % 2 == 0 and not self.allow_even:
            raise VoteConfigError(f"{self.id}: {n} votes; an odd number is required")
        for v in self.votes:
            if v.label not in (0, 1):
                raise VoteConfigError(f"{self.id}: vote label {v.label!r} is not 0/1")


def vote(vs: VoteSet) -> int:
    """Label held by a strict majority of ``vs``.

    Ties can only occur when even vote counts are allowed; they are broken by
    the mean score of the label-1 probability (>= 0.5 wins for label 1).
    """
    ones = sum(v.label for v in vs.votes)
    n = len(vs.votes)
    if 2 * ones != n:
        return int(2 * ones > n)
    scores = [v.score for v in vs.votes]
    if any(s is None for s in scores):
        raise VoteConfigError(f"{vs.id}: tie with missing scores")
    return int(sum(scores) / n >= 0.5)


@dataclass(frozen=True)
class EnsembleRecord:
    id: str
    votes: tuple[PredictionRecord, ...]
    label: int


def combine(
    predictions: Mapping[str, Sequence[PredictionRecord]],
    ids: Sequence[str] | None = None,
) -> tuple[list[EnsembleRecord], list[str]]:
    """Merge per-model predictions by id.

    Returns the voted records and the ids that lacked a vote from at least
    one model; those ids get no ensemble label.
    """
    models = list(predictions)
    if len(models) % 2 == 0:
        raise VoteConfigError(f"{len(models)} component models; an odd number is required")
    by_model = {m: {p.id: p for p in preds} for m, preds in predictions.items()}
    if ids is None:
        seen = {}
        for preds in predictions.values():
            for p in preds:
                seen.setdefault(p.id, None)
        ids = list(seen)
    complete, missing = [], []
    for i in ids:
        if all(i in by_model[m] for m in models):
            complete.append(i)
        else:
            missing.append(i)
    if missing:
        log.warning("%d instance(s) lack a component vote, e.g. %s", len(missing), missing[:3])
    if not complete:
        return [], missing
    matrix = np.array([[by_model[m][i].label for m in models] for i in complete], dtype=np.int8)
    labels = majority_vote(matrix)
    records = [
        EnsembleRecord(i, tuple(by_model[m][i] for m in models), int(lab))
        for i, lab in zip(complete, labels)
    ]
    return records, missing


def ensemble_predict(models: Sequence[ModelHandle], texts: Sequence[str], ids: Sequence[str] | None = None,
                     batch_size: int = 64) -> list[EnsembleRecord]:
    if len(models) % 2 == 0:
        raise VoteConfigError(f"{len(models)} component models; an odd number is required")
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise VoteConfigError(f"component model names must be unique: {names}")
    if ids is None:
        ids = [str(i) for i in range(len(texts))]
    preds = {m.name: predict(m, texts, ids, batch_size=batch_size) for m in models}
    records, missing = combine(preds, ids)
    if missing:
        raise RuntimeError(f"{len(missing)} instance(s) missing component votes")
    return records


# votes file: id, truth, one column per model, ensemble

def write_votes(path, records: Sequence[EnsembleRecord], truths: Mapping[str, int]) -> Path:
    path = Path(path)
    models = [p.model for p in records[0].votes] if records else []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "truth", *models, "ensemble"])
        for r in records:
            w.writerow([r.id, truths[r.id], *(p.label for p in r.votes), r.label])
    return path


@dataclass
class VotesTable:
    models: list[str]
    ids: list[str]
    truth: np.ndarray
    votes: np.ndarray      # (n, n_models), -1 where a vote is missing
    ensemble: np.ndarray   # -1 where absent

    def __len__(self):
        return len(self.ids)


def read_votes(path) -> VotesTable:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["id", "truth"] or rows[0][-1] != "ensemble":
        raise ValueError(f"{path}: not a votes file (header {rows[0] if rows else None})")
    models = rows[0][2:-1]

    def cell(x):
        return int(x) if x.strip() != "" else -1

    body = rows[1:]
    return VotesTable(
        models=models,
        ids=[r[0] for r in body],
        truth=np.array([int(r[1]) for r in body], dtype=np.int8),
        votes=np.array([[cell(x) for x in r[2:-1]] for r in body], dtype=np.int8).reshape(len(body), len(models)),
        ensemble=np.array([cell(r[-1]) for r in body], dtype=np.int8),
    )
