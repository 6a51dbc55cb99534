"""Assemble the balanced and augmented corpus.

Two build orders are supported:

``paper``
    oversample ASTD -> augment -> stratified split. Reproduces the reference
    split sizes, but duplicated minority tweets can land on both sides of the
    split.
``strict`` (default)
    augment -> duplicate-aware stratified split -> oversample inside the
    training part only. No text appears in both train and test.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .ingest import SANAD_CATEGORIES, IngestResult
from .preprocess import DEFAULT_NORMALIZATION, DEFAULT_RULES, CleaningRuleSet, Normalization, preprocess
from .records import Class4, Dataset, InstanceRecord, RecordError

log = logging.getLogger(__name__)

MODES = ("paper", "strict")
CSV_HEADER = ["Text", "Class", "Domain", "Label", "Dataset"]
TRAIN_FILE = "aradhati_plus_train.csv"
TEST_FILE = "aradhati_plus_test.csv"
MANIFEST_FILE = "manifest.json"

# reference train/test sizes, kept in the manifest for comparison
REFERENCE_SPLIT = {
    "ASTD": {"train": 10332, "test": 2584},
    "LABR": {"train": 13000, "test": 3250},
    "HARD": {"train": 13000, "test": 3250},
    "SANAD": {"train": 26000, "test": 6500},
    "Total": {"train": 62332, "test": 15584},
}
DEFAULT_AUGMENT_N = 32500


class BuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


def oversample(records: Sequence[InstanceRecord], seed: int) -> list[InstanceRecord]:
    """Duplicate random minority-class records until both labels are equally frequent.

    Duplicates are drawn uniformly with replacement, get ids ``<orig>#dup<k>``
    and point back to their source via ``duplicate_of``.
    """
    by_label = defaultdict(list)
    for r in records:
        by_label[r.label].append(r)
    if len(by_label[0]) == 0 or len(by_label[1]) == 0:
        raise BuildError("oversampling needs records of both labels")
    minority = 0 if len(by_label[0]) < len(by_label[1]) else 1
    deficit = len(by_label[1 - minority]) - len(by_label[minority])
    rng = random.Random(seed)
    pool = by_label[minority]
    dups = []
    for k in range(deficit):
        src = rng.choice(pool)
        dups.append(replace(src, id=f"{src.id}#dup{k}", duplicate_of=src.id))
    return list(records) + dups


def _category_quotas(pool, n):
    cats = [c for c in SANAD_CATEGORIES if any(r.domain == c for r in pool)]
    extra = sorted({r.domain for r in pool} - set(cats))
    cats += extra
    if not cats:
        return {}
    share = n // len(cats)
    quotas = {c: share for c in cats}
    # remainder goes to the last category (Technology for the default selection)
    quotas[cats[-1]] += n - share * len(cats)
    return quotas


def augment(
    base: Sequence[InstanceRecord],
    objective_pool: Sequence[InstanceRecord],
    subjective_pools: tuple[Sequence[InstanceRecord], Sequence[InstanceRecord]],
    n: int,
    seed: int,
) -> list[InstanceRecord]:
    """Add ``n`` objective and ``n`` subjective records (half LABR, half HARD).

    Objective records are drawn evenly across the pool's categories.
    Sampling is without replacement.
    """
    if n < 0 or n % 2:
        raise BuildError(f"augmentation size must be a non-negative even number, got {n}")
    if n == 0:
        return list(base)
    labr, hard = subjective_pools
    rng = random.Random(seed)
    picked = []
    for cat, quota in _category_quotas(objective_pool, n).items():
        members = [r for r in objective_pool if r.domain == cat]
        if len(members) < quota:
            raise BuildError(f"SANAD/{cat}: need {quota} records, only {len(members)} available")
        picked += rng.sample(members, quota)
    if len(picked) < n:
        raise BuildError(f"objective pool: need {n} records, only {len(objective_pool)} available")
    for name, pool in (("LABR", labr), ("HARD", hard)):
        if len(pool) < n // 2:
            raise BuildError(f"{name}: need {n // 2} records, only {len(pool)} available")
        picked += rng.sample(list(pool), n // 2)
    return list(base) + picked


def _train_target(size, fraction):
    return int(math.floor(fraction * size + 0.5))


def split(records: Sequence[InstanceRecord], spec: SplitSpec = SplitSpec()) -> tuple[list, list]:
    """Stratified random split on (dataset, label).

    Each stratum sends round(fraction * size) records to train. Strata with
    fewer than two records go entirely to train. With ``spec.strict``,
    records sharing a text are kept on the same side; targets are still met
    exactly unless duplicate groups leave a stratum too few unique texts to
    balance, which is logged.
    """
    records = list(records)
    strata = defaultdict(list)
    for i, r in enumerate(records):
        strata[r.stratum].append(i)
    targets = {}
    for key in sorted(strata):
        n = len(strata[key])
        if n < 2:
            log.warning("stratum %s has %d record(s); all go to train", key, n)
            targets[key] = n
        else:
            targets[key] = _train_target(n, spec.train_fraction)
    rng = random.Random(spec.seed)
    if spec.strict:
        in_train = _strict_assign(records, strata, targets, spec.train_fraction, rng)
    else:
        in_train = [False] * len(records)
        for key in sorted(strata):
            order = strata[key][:]
            rng.shuffle(order)
            for i in order[: targets[key]]:
                in_train[i] = True
    train = [r for r, t in zip(records, in_train) if t]
    test = [r for r, t in zip(records, in_train) if not t]
    return train, test


def _strict_assign(records, strata, targets, fraction, rng):
    groups: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        groups.setdefault(r.text, []).append(i)
    size = {k: len(v) for k, v in strata.items()}
    used = {k: [0, 0] for k in strata}          # [train, test]
    cap = {k: (targets[k], size[k] - targets[k]) for k in strata}
    in_train = [False] * len(records)

    def spread(members):
        return Counter(records[i].stratum for i in members)

    def fits(k_s, side):
        return all(used[s][side] + k <= cap[s][side] for s, k in k_s.items())

    def place(members, k_s, side):
        for s, k in k_s.items():
            used[s][side] += k
        for i in members:
            in_train[i] = side == 0

    # groups spanning several records first, decided once across all their strata
    multi = [t for t, m in groups.items() if len(m) > 1]
    rng.shuffle(multi)
    test_side = []
    for t in multi:
        members = groups[t]
        k_s = spread(members)
        to_train, to_test = fits(k_s, 0), fits(k_s, 1)
        if to_train and (not to_test or rng.random() < fraction):
            side = 0
        elif to_test:
            side = 1
        else:
            over = [sum(max(0, used[s][x] + k - cap[s][x]) for s, k in k_s.items()) for x in (0, 1)]
            side = 0 if over[0] <= over[1] else 1
        place(members, k_s, side)
        if side == 1:
            test_side.append(t)

    singles = defaultdict(list)
    for t, m in groups.items():
        if len(m) == 1:
            singles[records[m[0]].stratum].append(m[0])
    for key in sorted(strata):
        pool = singles[key]
        rng.shuffle(pool)
        for i in pool:
            side = 0 if used[key][0] < cap[key][0] else 1
            used[key][side] += 1
            in_train[i] = side == 0

    # too few singletons somewhere: pull test-side groups back while they fit
    for t in test_side:
        k_s = spread(groups[t])
        if any(used[s][0] < cap[s][0] for s in k_s) and fits(k_s, 0):
            for s, k in k_s.items():
                used[s][1] -= k
            place(groups[t], k_s, 0)

    for key in sorted(strata):
        if abs(used[key][0] - targets[key]) > 1:
            log.warning("stratum %s: %d train records for target %d (duplicate groups)",
                        key, used[key][0], targets[key])
    return in_train


# --- CSV -------------------------------------------------------------------

def export_csv(records: Sequence[InstanceRecord], path) -> Path:
    path = Path(path)
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise BuildError(f"cannot write {path}: {exc}") from exc
    with fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.text, r.class4.value, r.domain, r.label, r.dataset.value])
    return path


@dataclass
class ImportResult:
    records: list[InstanceRecord] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def import_csv(path, id_prefix: str | None = None) -> ImportResult:
    """Read a corpus CSV; ids are regenerated as ``<prefix>-<row>``."""
    path = Path(path)
    prefix = id_prefix if id_prefix is not None else path.stem
    result = ImportResult()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise BuildError(f"{path}: header {header} is not {CSV_HEADER}")
        for row_no, row in enumerate(reader):
            try:
                if len(row) != len(CSV_HEADER):
                    raise RecordError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
                text, cls, domain, label, dataset = row
                if label not in ("0", "1"):
                    raise RecordError(f"label {label!r} is not 0/1")
                rec = InstanceRecord(f"{prefix}-{row_no}", text, Class4(cls), domain, int(label), Dataset(dataset))
            except (RecordError, ValueError) as exc:
                result.errors.append((row_no + 2, str(exc)))
                log.warning("%s line %d skipped: %s", path.name, row_no + 2, exc)
                continue
            result.records.append(rec)
    return result


# --- manifest ----------------------------------------------------------------

@dataclass
class DatasetManifest:
    counts: dict
    totals: dict
    duplicates: dict
    meta: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self, path) -> Path:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                              encoding="utf-8")
        return Path(path)


def _tally(records):
    c = Counter((r.dataset.value, r.label) for r in records)
    out = {}
    for (ds, lab), k in sorted(c.items()):
        out.setdefault(ds, {})[str(lab)] = k
    return out


def build_manifest(train: Sequence[InstanceRecord], test: Sequence[InstanceRecord], meta: dict | None = None):
    counts = {"train": _tally(train), "test": _tally(test)}
    per_dataset = {}
    for part, recs in (("train", train), ("test", test)):
        for r in recs:
            per_dataset.setdefault(r.dataset.value, {"train": 0, "test": 0})[part] += 1
    totals = {
        "train": len(train),
        "test": len(test),
        "all": len(train) + len(test),
        "per_dataset": dict(sorted(per_dataset.items())),
    }
    duplicates = {
        "train": sum(r.duplicate_of is not None for r in train),
        "test": sum(r.duplicate_of is not None for r in test),
    }
    return DatasetManifest(counts, totals, duplicates, dict(meta or {}))


# --- full build -----------------------------------------------------------------

@dataclass
class BuildResult:
    train: list[InstanceRecord]
    test: list[InstanceRecord]
    manifest: DatasetManifest


def _preprocess_all(records, rules, norm):
    kept, lost = [], 0
    for r in records:
        text = preprocess(r.text, rules, norm)
        if not text:
            lost += 1
            continue
        kept.append(replace(r, text=text))
    return kept, lost


def build_corpus(
    sources: dict[str, IngestResult],
    augment_n: int = DEFAULT_AUGMENT_N,
    mode: str = "strict",
    seed: int = 0,
    train_fraction: float = 0.8,
    rules: CleaningRuleSet = DEFAULT_RULES,
    normalization: Normalization = DEFAULT_NORMALIZATION,
) -> BuildResult:
    """Preprocess, balance, augment and split the four ingested corpora.

    ``sources`` maps dataset names to loader results; only ASTD is required
    when ``augment_n`` is 0.
    """
    if mode not in MODES:
        raise BuildError(f"mode must be one of {MODES}, got {mode!r}")
    cleaned, losses = {}, {}
    for name in ("ASTD", "LABR", "HARD", "SANAD"):
        res = sources.get(name)
        cleaned[name], losses[name] = _preprocess_all(res.records if res else [], rules, normalization)
        if losses[name]:
            log.info("%s: %d record(s) empty after preprocessing, dropped", name, losses[name])
    if not cleaned["ASTD"]:
        raise BuildError("no ASTD records to build from")

    pools = (cleaned["SANAD"], (cleaned["LABR"], cleaned["HARD"]))
    if mode == "paper":
        base = oversample(cleaned["ASTD"], seed)
        full = augment(base, *pools, n=augment_n, seed=seed)
        train, test = split(full, SplitSpec(train_fraction, seed, strict=False))
    else:
        full = augment(cleaned["ASTD"], *pools, n=augment_n, seed=seed)
        train, test = split(full, SplitSpec(train_fraction, seed, strict=True))
        astd_train = [r for r in train if r.dataset is Dataset.ASTD]
        train = train + oversample(astd_train, seed)[len(astd_train):]

    meta = {
        "mode": mode,
        "seed": seed,
        "train_fraction": train_fraction,
        "augment_n": augment_n,
        "n_obj": augment_n,
        "n_subj": augment_n // 2 * 2,
        "ingest": {
            name: {"rows": res.rows, "records": len(res.records), "malformed": len(res.errors),
                   "excluded": res.excluded}
            for name, res in sorted(sources.items())
        },
        "cleaning_losses": losses,
        "preprocessing": {"rules": asdict(rules), "normalization": asdict(normalization)},
        "reference_split": REFERENCE_SPLIT,
    }
    manifest = build_manifest(train, test, meta)
    achieved = manifest.totals["per_dataset"].get("ASTD", {"train": 0, "test": 0})
    manifest.meta["astd_vs_reference"] = {
        "achieved": achieved,
        "reference": REFERENCE_SPLIT["ASTD"],
        "note": "reference ASTD sizes are below 2 x 6,691 oversampled tweets; achieved counts are reported as built",
    }
    return BuildResult(train, test, manifest)


def write_build(result: BuildResult, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return {
        "train": export_csv(result.train, out / TRAIN_FILE),
        "test": export_csv(result.test, out / TEST_FILE),
        "manifest": result.manifest.write(out / MANIFEST_FILE),
    }
