"""Readers for the four source corpora.

Every loader maps its dataset's native labels onto :class:`InstanceRecord`
and returns an :class:`IngestResult`. Malformed rows are skipped and
recorded with their line number; only an unreadable file is fatal.

File layouts (UTF-8, tab separated, one record per line):

=======  ======  ====================================================
dataset  header  columns
=======  ======  ====================================================
ASTD     no      ``text  tag`` (tag: OBJ/POS/NEG/NEUTRAL or the long
                 forms "objective", "subjective positive", ...)
LABR     no      ``rating  review_id  user_id  book_id  review``
HARD     yes     must contain ``rating`` and ``review`` columns
SANAD    yes     must contain ``category`` and ``text`` columns; a
                 directory of ``<Category>/*.txt`` files also works
=======  ======  ====================================================
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .records import Class4, Dataset, InstanceRecord, OBJECTIVE, SUBJECTIVE

log = logging.getLogger(__name__)

SANAD_CATEGORIES = ("Culture", "Finance", "Medical", "Politics", "Religion", "Sports", "Technology")
DEFAULT_SANAD_CATEGORIES = frozenset({"Medical", "Sports", "Technology"})


class IngestError(RuntimeError):
    """Fatal: the file cannot be read at all."""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SourceFormatSpec:
    dataset: Dataset
    header: bool
    columns: tuple[str, ...]
    text_column: str
    label_column: str
    domain: str | None
    encoding: str = "utf-8"
    delimiter: str = "\t"


FORMATS = {
    Dataset.ASTD: SourceFormatSpec(Dataset.ASTD, False, ("text", "tag"), "text", "tag", "Tweets"),
    Dataset.LABR: SourceFormatSpec(
        Dataset.LABR, False, ("rating", "review_id", "user_id", "book_id", "review"),
        "review", "rating", "Books reviews",
    ),
    Dataset.HARD: SourceFormatSpec(Dataset.HARD, True, ("rating", "review"), "review", "rating", "Hotel reviews"),
    Dataset.SANAD: SourceFormatSpec(Dataset.SANAD, True, ("category", "text"), "text", "category", None),
}


@dataclass
class RowError:
    line: int
    reason: str


@dataclass
class IngestResult:
    dataset: Dataset
    records: list[InstanceRecord] = field(default_factory=list)
    errors: list[RowError] = field(default_factory=list)
    excluded: int = 0
    rows: int = 0

    @property
    def skipped(self) -> int:
        return len(self.errors) + self.excluded

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


class _BadRow(Exception):
    pass


def _read_lines(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            data = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _run(path, spec: SourceFormatSpec, make) -> IngestResult:
    """Feed each data row to ``make(index, fields)``; collect records and skips."""
    lines = _read_lines(path)
    result = IngestResult(spec.dataset)
    start = 0
    positions = None
    if spec.header:
        if not lines:
            raise IngestError(f"{path}: missing header line")
        header = [h.strip().lower() for h in lines[0].split(spec.delimiter)]
        missing = [c for c in spec.columns if c not in header]
        if missing:
            raise IngestError(f"{path}: header lacks column(s) {missing}")
        positions = {c: header.index(c) for c in spec.columns}
        start = 1
    for index, line in enumerate(lines[start:]):
        lineno = index + start + 1
        result.rows += 1
        try:
            if positions is None:
                parts = _split_positional(line, spec)
            else:
                cells = line.split(spec.delimiter)
                if len(cells) < len(header):
                    raise _BadRow(f"expected {len(header)} fields, got {len(cells)}")
                if len(cells) > len(header):
                    # surplus delimiters belong to the free-text column (the last one)
                    cells = cells[: len(header) - 1] + [spec.delimiter.join(cells[len(header) - 1:])]
                parts = {c: cells[i] for c, i in positions.items()}
            rec = make(index, parts)
        except _BadRow as exc:
            result.errors.append(RowError(lineno, str(exc)))
            log.warning("%s line %d skipped: %s", spec.dataset.value, lineno, exc)
            continue
        if rec is None:
            result.excluded += 1
        else:
            result.records.append(rec)
    if result.errors:
        log.info("%s: %d rows, %d skipped as malformed", spec.dataset.value, result.rows, len(result.errors))
    return result


def _split_positional(line, spec):
    if spec.dataset is Dataset.ASTD:
        # tweets may contain tabs; the tag is always the last field
        cells = line.rsplit(spec.delimiter, 1)
    else:
        cells = line.split(spec.delimiter, len(spec.columns) - 1)
    if len(cells) != len(spec.columns):
        raise _BadRow(f"expected {len(spec.columns)} fields, got {len(cells)}")
    return dict(zip(spec.columns, cells))


def _text(parts, spec):
    text = parts[spec.text_column].strip()
    if not text:
        raise _BadRow("empty text")
    return text


def _rating(parts, spec):
    raw = parts[spec.label_column].strip()
    try:
        value = float(raw)
    except ValueError:
        raise _BadRow(f"rating {raw!r} is not a number") from None
    if not value.is_integer():
        raise _BadRow(f"rating {raw!r} is not an integer")
    return int(value)


ASTD_TAGS = {
    "obj": Class4.OBJ,
    "objective": Class4.OBJ,
    "pos": Class4.POS,
    "subjective positive": Class4.POS,
    "neg": Class4.NEG,
    "subjective negative": Class4.NEG,
    # ASTD's "subjective mixed" tweets are shipped with the NEUTRAL tag
    "neutral": Class4.NEUTRAL,
    "mixed": Class4.NEUTRAL,
    "subjective mixed": Class4.NEUTRAL,
}


def load_astd(path) -> IngestResult:
    spec = FORMATS[Dataset.ASTD]

    def make(index, parts):
        tag = " ".join(parts["tag"].split()).lower()
        if tag not in ASTD_TAGS:
            raise _BadRow(f"unknown ASTD tag {parts['tag']!r}")
        cls = ASTD_TAGS[tag]
        return InstanceRecord(
            id=f"ASTD-{index}",
            text=_text(parts, spec),
            class4=cls,
            domain=spec.domain,
            label=OBJECTIVE if cls is Class4.OBJ else SUBJECTIVE,
            dataset=Dataset.ASTD,
        )

    return _run(path, spec, make)


def load_labr(path) -> IngestResult:
    spec = FORMATS[Dataset.LABR]

    def make(index, parts):
        rating = _rating(parts, spec)
        if rating in (4, 5):
            cls = Class4.POS
        elif rating in (1, 2):
            cls = Class4.NEG
        elif rating == 3:
            cls = Class4.NEUTRAL
        else:
            raise _BadRow(f"rating {rating} outside [1, 5]")
        return InstanceRecord(f"LABR-{index}", _text(parts, spec), cls, spec.domain, SUBJECTIVE, Dataset.LABR)

    return _run(path, spec, make)


def load_hard(path) -> IngestResult:
    """Balanced HARD only: a rating of 3 breaks the file's contract and is skipped."""
    spec = FORMATS[Dataset.HARD]

    def make(index, parts):
        rating = _rating(parts, spec)
        if rating in (4, 5):
            cls = Class4.POS
        elif rating in (1, 2):
            cls = Class4.NEG
        elif rating == 3:
            raise _BadRow("neutral rating 3 in balanced HARD")
        else:
            raise _BadRow(f"rating {rating} outside [1, 5]")
        return InstanceRecord(f"HARD-{index}", _text(parts, spec), cls, spec.domain, SUBJECTIVE, Dataset.HARD)

    return _run(path, spec, make)


def canonical_category(name: str) -> str:
    for cat in SANAD_CATEGORIES:
        if cat.lower() == name.strip().lower():
            return cat
    raise ConfigError(f"unknown SANAD category {name!r}; expected one of {', '.join(SANAD_CATEGORIES)}")


def load_sanad(path, categories=DEFAULT_SANAD_CATEGORIES) -> IngestResult:
    """Load SANAD articles as objective records, keeping only ``categories``."""
    wanted = {canonical_category(c) for c in categories}
    path = Path(path)
    if path.is_dir():
        return _load_sanad_dir(path, wanted)
    spec = FORMATS[Dataset.SANAD]

    def make(index, parts):
        try:
            cat = canonical_category(parts["category"])
        except ConfigError as exc:
            raise _BadRow(str(exc)) from None
        if cat not in wanted:
            return None
        return InstanceRecord(f"SANAD-{index}", _text(parts, spec), Class4.OBJ, cat, OBJECTIVE, Dataset.SANAD)

    return _run(path, spec, make)


def _load_sanad_dir(root: Path, wanted) -> IngestResult:
    result = IngestResult(Dataset.SANAD)
    files = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        cat = canonical_category(sub.name)
        files.extend((cat, f) for f in sorted(sub.glob("*.txt")))
    for index, (cat, f) in enumerate(files):
        result.rows += 1
        if cat not in wanted:
            result.excluded += 1
            continue
        try:
            text = f.read_text(encoding="utf-8").strip()
        except (OSError, UnicodeDecodeError) as exc:
            raise IngestError(f"cannot read {f}: {exc}") from exc
        if not text:
            result.errors.append(RowError(index + 1, f"empty article {f.name}"))
            continue
        result.records.append(InstanceRecord(f"SANAD-{index}", text, Class4.OBJ, cat, OBJECTIVE, Dataset.SANAD))
    return result


LOADERS = {
    Dataset.ASTD: load_astd,
    Dataset.LABR: load_labr,
    Dataset.HARD: load_hard,
    Dataset.SANAD: load_sanad,
}
