"""Run configuration: one YAML (or JSON) file per experiment.

Environment variables may override paths, nothing else:
``ARADHATI_SOURCE_<ASTD|LABR|HARD|SANAD>``, ``ARADHATI_OUT`` and
``ARADHATI_ANNOTATIONS``.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .builder import MODES, DEFAULT_AUGMENT_N
from .error_analysis import DEFAULT_SHORT_THRESHOLD
from .harness import DEFAULT_EPOCHS, DEFAULT_LEARNING_RATES
from .ingest import DEFAULT_SANAD_CATEGORIES, canonical_category
from .preprocess import RULE_ORDER, CleaningRuleSet, Normalization
from .tiny import KINDS

SOURCE_NAMES = ("ASTD", "LABR", "HARD", "SANAD")


class ConfigError(ValueError):
    pass


@dataclass
class BackendSpec:
    name: str
    model: str | None = None     # checkpoint id or directory
    tiny: dict | None = None     # options for make_tiny_backend


@dataclass
class RunConfig:
    seed: int
    out: Path
    sources: dict[str, Path]
    sanad_categories: tuple[str, ...]
    disable_rules: tuple[str, ...]
    normalization: dict
    mode: str
    augment_n: int
    train_fraction: float
    scenario: str
    validation_fraction: float
    learning_rates: tuple[float, ...]
    epochs: tuple[int, ...]
    batch_size: int
    max_length: int
    backends: list[BackendSpec]
    slices: dict | None
    annotations: Path | None
    short_threshold: int
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def rules(self) -> CleaningRuleSet:
        return CleaningRuleSet.without(*self.disable_rules)

    @property
    def norm(self) -> Normalization:
        return Normalization.from_dict(self.normalization)

    def to_dict(self) -> dict:
        """Resolved settings for provenance records; paths as given, output dir omitted."""
        return {
            "seed": self.seed,
            "sources": {k: str(v) for k, v in sorted(self.sources.items())},
            "sanad_categories": list(self.sanad_categories),
            "preprocess": {"disable": list(self.disable_rules), "normalization": dict(self.normalization)},
            "build": {"mode": self.mode, "augment_n": self.augment_n, "train_fraction": self.train_fraction},
            "train": {
                "scenario": self.scenario,
                "validation_fraction": self.validation_fraction,
                "learning_rates": list(self.learning_rates),
                "epochs": list(self.epochs),
                "batch_size": self.batch_size,
                "max_length": self.max_length,
                "backends": [{"name": b.name, "model": b.model, "tiny": b.tiny} for b in self.backends],
            },
            "eval": {"slices": self.slices},
            "errors": {"annotations": str(self.annotations) if self.annotations else None,
                       "short_threshold": self.short_threshold},
        }

    def check_sources(self):
        for name in SOURCE_NAMES:
            if name == "ASTD" or self.augment_n > 0:
                if name not in self.sources:
                    raise ConfigError(f"sources.{name}: missing")
        for name, p in self.sources.items():
            if not p.exists():
                raise ConfigError(f"sources.{name}: path does not exist: {p}")

    def check_annotations(self):
        if self.annotations is not None and not self.annotations.exists():
            raise ConfigError(f"errors.annotations: path does not exist: {self.annotations}")


def _get(d, key, default, kind, field_name):
    value = d.get(key, default)
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{field_name}: invalid value {value!r}") from None


def load_config(path=None, overrides: dict | None = None, env=None) -> RunConfig:
    """Read and validate a config file; ``overrides`` come from the command line."""
    env = os.environ if env is None else env
    raw: dict = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"--config: file does not exist: {path}")
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        base = path.parent
    raw = copy.deepcopy(raw)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    def resolve(p):
        p = Path(os.path.expanduser(str(p)))
        return p if p.is_absolute() else (base / p)

    if "seed" not in raw and "seed" not in overrides:
        raise ConfigError("seed: an explicit seed is required")
    seed = _get({**raw, **overrides}, "seed", None, int, "seed")

    out = overrides.get("out") or env.get("ARADHATI_OUT") or raw.get("out")
    if out is None:
        raise ConfigError("out: an output directory is required (config 'out' or --out)")
    out = Path(out) if ("out" in overrides or "ARADHATI_OUT" in env) else resolve(out)

    sources = {}
    for name, p in (raw.get("sources") or {}).items():
        key = str(name).upper()
        if key not in SOURCE_NAMES:
            raise ConfigError(f"sources.{name}: unknown dataset; expected one of {SOURCE_NAMES}")
        sources[key] = resolve(p)
    for name in SOURCE_NAMES:
        if f"ARADHATI_SOURCE_{name}" in env:
            sources[name] = Path(env[f"ARADHATI_SOURCE_{name}"])

    try:
        cats = tuple(sorted(canonical_category(c) for c in raw.get("sanad_categories", DEFAULT_SANAD_CATEGORIES)))
    except ValueError as exc:
        raise ConfigError(f"sanad_categories: {exc}") from None

    pre = raw.get("preprocess") or {}
    disable = tuple(pre.get("disable", ()))
    bad = set(disable) - set(RULE_ORDER)
    if bad:
        raise ConfigError(f"preprocess.disable: unknown rule(s) {sorted(bad)}; known: {RULE_ORDER}")
    normalization = dict(pre.get("normalization") or {})
    try:
        Normalization.from_dict(normalization)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"preprocess.normalization: {exc}") from None

    build = raw.get("build") or {}
    mode = overrides.get("mode") or build.get("mode", "strict")
    if mode not in MODES:
        raise ConfigError(f"build.mode: must be one of {MODES}, got {mode!r}")
    augment_n = _get(build, "augment_n", DEFAULT_AUGMENT_N, int, "build.augment_n")
    if augment_n < 0 or augment_n % 2:
        raise ConfigError(f"build.augment_n: must be a non-negative even number, got {augment_n}")
    train_fraction = _get(build, "train_fraction", 0.8, float, "build.train_fraction")
    if not 0 < train_fraction < 1:
        raise ConfigError(f"build.train_fraction: must lie in (0, 1), got {train_fraction}")

    tr = raw.get("train") or {}
    scenario = tr.get("scenario", "augmented")
    if scenario not in ("augmented", "oversampled"):
        raise ConfigError(f"train.scenario: must be 'augmented' or 'oversampled', got {scenario!r}")
    validation_fraction = _get(tr, "validation_fraction", 0.1, float, "train.validation_fraction")
    if not 0 < validation_fraction < 1:
        raise ConfigError(f"train.validation_fraction: must lie in (0, 1), got {validation_fraction}")
    try:
        lrs = tuple(float(x) for x in tr.get("learning_rates", DEFAULT_LEARNING_RATES))
        epochs = tuple(int(x) for x in tr.get("epochs", DEFAULT_EPOCHS))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"train grid: {exc}") from None
    if not lrs or not epochs or min(lrs) <= 0 or min(epochs) < 1:
        raise ConfigError("train.learning_rates / train.epochs: need non-empty positive values")
    backends = []
    for i, b in enumerate(tr.get("backends") or []):
        if "name" not in b:
            raise ConfigError(f"train.backends[{i}].name: missing")
        if ("model" in b) == ("tiny" in b):
            raise ConfigError(f"train.backends[{i}]: give exactly one of 'model' or 'tiny'")
        tiny = dict(b["tiny"]) if "tiny" in b else None
        if tiny is not None and tiny.get("kind", "bert") not in KINDS:
            raise ConfigError(f"train.backends[{i}].tiny.kind: must be one of {KINDS}")
        model = b.get("model")
        if model is not None and (str(model).startswith(".") or os.sep in str(model)) and not Path(model).is_absolute():
            model = str(resolve(model))
        backends.append(BackendSpec(str(b["name"]), model, tiny))
    names = [b.name for b in backends]
    if len(set(names)) != len(names):
        raise ConfigError(f"train.backends: duplicate names {names}")

    ev = raw.get("eval") or {}
    slices = ev.get("slices")
    if slices is not None and not isinstance(slices, dict):
        raise ConfigError("eval.slices: must map slice names to {datasets, labels} filters")

    er = raw.get("errors") or {}
    ann = env.get("ARADHATI_ANNOTATIONS") or er.get("annotations")
    annotations = (Path(ann) if "ARADHATI_ANNOTATIONS" in env else resolve(ann)) if ann else None
    short = _get(er, "short_threshold", DEFAULT_SHORT_THRESHOLD, int, "errors.short_threshold")
    if short < 1:
        raise ConfigError("errors.short_threshold: must be >= 1")

    return RunConfig(
        seed=seed, out=out, sources=sources, sanad_categories=cats, disable_rules=disable,
        normalization=normalization, mode=mode, augment_n=augment_n, train_fraction=train_fraction,
        scenario=scenario, validation_fraction=validation_fraction, learning_rates=lrs, epochs=epochs,
        batch_size=_get(tr, "batch_size", 16, int, "train.batch_size"),
        max_length=_get(tr, "max_length", 256, int, "train.max_length"),
        backends=backends, slices=slices, annotations=annotations, short_threshold=short, raw=raw,
    )
