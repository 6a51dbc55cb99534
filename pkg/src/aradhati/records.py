"""Core record types shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Class4(str, Enum):
    POS = "POS"
    NEG = "NEG"
    NEUTRAL = "NEUTRAL"
    OBJ = "OBJ"


class Dataset(str, Enum):
    ASTD = "ASTD"
    LABR = "LABR"
    HARD = "HARD"
    SANAD = "SANAD"


SUBJECTIVE = 1
OBJECTIVE = 0


class RecordError(ValueError):
    """A record violates the InstanceRecord invariants."""


@dataclass(frozen=True)
class InstanceRecord:
    id: str
    text: str
    class4: Class4
    domain: str
    label: int
    dataset: Dataset
    duplicate_of: str | None = field(default=None, compare=False)

    def __post_init__(self):
        # accept plain strings from CSV / config round-trips
        if not isinstance(self.class4, Class4):
            object.__setattr__(self, "class4", Class4(self.class4))
        if not isinstance(self.dataset, Dataset):
            object.__setattr__(self, "dataset", Dataset(self.dataset))
        check_record(self)

    @property
    def stratum(self) -> tuple[str, int]:
        return (self.dataset.value, self.label)


def check_record(rec: InstanceRecord) -> None:
    """Raise RecordError unless ``rec`` satisfies the label/class/dataset invariants."""
    if rec.label not in (0, 1):
        raise RecordError(f"{rec.id}: label must be 0 or 1, got {rec.label!r}")
    if (rec.label == OBJECTIVE) != (rec.class4 is Class4.OBJ):
        raise RecordError(f"{rec.id}: label {rec.label} inconsistent with class {rec.class4.value}")
    if rec.dataset is Dataset.SANAD and rec.label != OBJECTIVE:
        raise RecordError(f"{rec.id}: SANAD records must be objective")
    if rec.dataset in (Dataset.LABR, Dataset.HARD) and rec.label != SUBJECTIVE:
        raise RecordError(f"{rec.id}: {rec.dataset.value} records must be subjective")
    if rec.dataset is Dataset.HARD and rec.class4 is Class4.NEUTRAL:
        raise RecordError(f"{rec.id}: HARD has no neutral class")
    if not rec.text:
        raise RecordError(f"{rec.id}: empty text")
