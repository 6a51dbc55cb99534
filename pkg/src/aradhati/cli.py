"""Command-line entry point: ``aradhati build|train|eval|errors|report``.

All commands share ``--config PATH --seed N --mode paper|strict --out DIR``
and write into sub-directories of the output directory::

    OUT/data/    corpus CSVs + manifest.json
    OUT/train/   per-backend grid artifacts, grid.json, grid.csv, selected.json
    OUT/eval/    predictions, votes.csv, reports.json, reports.csv, charts/
    OUT/errors/  errors.csv, error_histogram.json, charts/
    OUT/report.md

Each sub-directory holds a provenance.json sufficient to replay the step.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import __name__ as _pkg
from .config import ConfigError, RunConfig, load_config

log = logging.getLogger(_pkg)


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:  # tag and re-raise
        raise StageError(name, exc) from exc


def _dump(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def _provenance(cfg: RunConfig, command: str, subdir: Path, **extra):
    from . import kernels

    record = {"command": command, "config": cfg.to_dict()}
    record.update(extra)
    record["text_kernels"] = kernels.BACKEND
    return _dump(subdir / "provenance.json", record)


def _data_dir(cfg):
    return cfg.out / "data"


def _load_split(cfg, which):
    from .builder import TEST_FILE, TRAIN_FILE, import_csv

    path = _data_dir(cfg) / (TRAIN_FILE if which == "train" else TEST_FILE)
    if not path.exists():
        raise ConfigError(f"{path} not found; run 'aradhati build' first")
    res = import_csv(path)
    if res.errors:
        log.warning("%s: %d invalid row(s) skipped", path.name, len(res.errors))
    return res.records


# --- build ---------------------------------------------------------------------

def cmd_build(cfg: RunConfig) -> dict:
    from .builder import build_corpus, write_build
    from .ingest import load_astd, load_hard, load_labr, load_sanad

    with stage("validate"):
        cfg.check_sources()
    sources = {}
    with stage("ingest"):
        loaders = {"ASTD": load_astd, "LABR": load_labr, "HARD": load_hard}
        for name, path in sorted(cfg.sources.items()):
            if name == "SANAD":
                sources[name] = load_sanad(path, cfg.sanad_categories)
            else:
                sources[name] = loaders[name](path)
    with stage("build"):
        result = build_corpus(sources, augment_n=cfg.augment_n, mode=cfg.mode, seed=cfg.seed,
                              train_fraction=cfg.train_fraction, rules=cfg.rules, normalization=cfg.norm)
    with stage("export"):
        paths = write_build(result, _data_dir(cfg))
        _provenance(cfg, "build", _data_dir(cfg))
    log.info("built %d train / %d test records", len(result.train), len(result.test))
    return {k: str(v) for k, v in paths.items()}


# --- train ----------------------------------------------------------------------

@contextlib.contextmanager
def _inside(directory):
    prev = os.getcwd()
    os.chdir(directory)
    try:
        yield
    finally:
        os.chdir(prev)


def cmd_train(cfg: RunConfig) -> dict:
    from .builder import SplitSpec, split
    from .harness import FineTuneConfig, grid_search
    from .records import Dataset
    from .tiny import make_tiny_backend

    with stage("validate"):
        if not cfg.backends:
            raise ConfigError("train.backends: at least one backend is required")
        train = _load_split(cfg, "train")
        if cfg.scenario == "oversampled":
            train = [r for r in train if r.dataset is Dataset.ASTD]
    with stage("split-validation"):
        fit, val = split(train, SplitSpec(1 - cfg.validation_fraction, cfg.seed, strict=True))
    train_dir = cfg.out / "train"
    train_dir.mkdir(parents=True, exist_ok=True)
    grid, selected, failures = {}, {}, {}
    for b in cfg.backends:
        # paths recorded in model provenance stay relative to the output directory
        with stage(f"train:{b.name}"), _inside(cfg.out):
            base = b.model
            if b.tiny is not None:
                opts = dict(b.tiny)
                opts.setdefault("seed", cfg.seed)
                base = str(make_tiny_backend(Path("train", "backends", b.name), [r.text for r in fit], **opts))
            base_cfg = FineTuneConfig(str(base), batch_size=cfg.batch_size, max_length=cfg.max_length, seed=cfg.seed)
            result = grid_search(base, fit, val, cfg.learning_rates, cfg.epochs, base_cfg, name=b.name,
                                 save_dir=Path("train", b.name))
        rows = result.table()
        grid[b.name] = {"rows": rows, "best": None}
        if result.failures:
            failures[b.name] = [f"lr={r.learning_rate:g} epochs={r.epochs}: {r.error}" for r in result.failures]
        if result.best is not None:
            best_row = next(r for r in rows if r["learning_rate"] == result.best.learning_rate
                            and r["epochs"] == result.best.epochs)
            grid[b.name]["best"] = {"learning_rate": result.best.learning_rate, "epochs": result.best.epochs,
                                    "accuracy": best_row["accuracy"]}
            selected[b.name] = best_row["artifact"]
    _dump(train_dir / "grid.json", grid)
    with open(train_dir / "grid.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["backend", "learning_rate", "epochs", "validation_accuracy", "error", "artifact"])
        for name, g in grid.items():
            for r in g["rows"]:
                w.writerow([name, r["learning_rate"], r["epochs"], r["accuracy"], r["error"] or "", r["artifact"] or ""])
    _dump(train_dir / "selected.json", selected)
    _provenance(cfg, "train", train_dir, n_fit=len(fit), n_validation=len(val), failures=failures)
    if not selected:
        raise StageError("train", "every grid point failed")
    return {"selected": selected, "failures": failures}


# --- eval -------------------------------------------------------------------------

def _slices(cfg):
    from .evaluation import BUILTIN_SLICES, make_slice

    if not cfg.slices:
        return BUILTIN_SLICES
    return {name: make_slice(spec.get("datasets"), spec.get("labels")) for name, spec in cfg.slices.items()}


def cmd_eval(cfg: RunConfig) -> dict:
    from .charts import performance_chart
    from .ensemble import combine, write_votes
    from .evaluation import slice_eval, write_reports_csv
    from .harness import ModelHandle, predict

    with stage("validate"):
        selected_path = cfg.out / "train" / "selected.json"
        if not selected_path.exists():
            raise ConfigError(f"{selected_path} not found; run 'aradhati train' first")
        selected = json.loads(selected_path.read_text(encoding="utf-8"))
        test = _load_split(cfg, "test")
    eval_dir = cfg.out / "eval"
    eval_dir.mkdir(parents=True, exist_ok=True)
    ids = [r.id for r in test]
    texts = [r.text for r in test]
    preds = {}
    with stage("predict"):
        for name, artifact in selected.items():
            handle = ModelHandle.load(cfg.out / artifact, name=name)
            preds[name] = predict(handle, texts, ids)
            with open(eval_dir / f"predictions_{name}.csv", "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["id", "label", "score"])
                for p in preds[name]:
                    w.writerow([p.id, p.label, f"{p.score:.10f}"])
    with stage("ensemble"):
        records, missing = combine(preds, ids)
        if missing:
            raise RuntimeError(f"{len(missing)} test instance(s) lack a component vote")
        truths = {r.id: r.label for r in test}
        write_votes(eval_dir / "votes.csv", records, truths)
    with stage("metrics"):
        slices = _slices(cfg)
        reports = []
        for name, ps in preds.items():
            reports += slice_eval(ps, test, slices, model=name)
        reports += slice_eval({r.id: r.label for r in records}, test, slices, model="Ensemble")
        _dump(eval_dir / "reports.json", {"reports": [r.to_dict() for r in reports]})
        write_reports_csv(eval_dir / "reports.csv", reports)
        performance_chart(reports, eval_dir / "charts" / "performance")
    _provenance(cfg, "eval", eval_dir, models=selected)
    return {"reports": len(reports)}


# --- errors -------------------------------------------------------------------------

def cmd_errors(cfg: RunConfig) -> dict:
    from .charts import count_chart
    from .ensemble import read_votes
    from .error_analysis import categorize, partition_errors, write_errors_csv

    with stage("validate"):
        cfg.check_annotations()
        votes_path = cfg.out / "eval" / "votes.csv"
        if not votes_path.exists():
            raise ConfigError(f"{votes_path} not found; run 'aradhati eval' first")
        votes = read_votes(votes_path)
        texts = {r.id: r.text for r in _load_split(cfg, "test")}
    err_dir = cfg.out / "errors"
    with stage("partition"):
        part = partition_errors(votes, texts)
    with stage("categorize"):
        manual = cfg.annotations
        three = categorize(part.three_wrong, manual, cfg.short_threshold, known_ids=votes.ids)
        two = categorize(part.two_wrong, manual, cfg.short_threshold, known_ids=votes.ids)
    err_dir.mkdir(parents=True, exist_ok=True)
    write_errors_csv(err_dir / "errors.csv", three.records + two.records, votes.models)
    hist = {
        "n_instances": part.n_instances,
        "n_errors": part.n_errors,
        "two_wrong": len(part.two_wrong),
        "three_wrong": len(part.three_wrong),
        "fractions": part.fractions,
        "three_wrong_categories": three.histogram,
        "two_wrong_categories": two.histogram,
        "short_threshold": cfg.short_threshold,
    }
    _dump(err_dir / "error_histogram.json", hist)
    count_chart({"two wrong": hist["two_wrong"], "three wrong": hist["three_wrong"]},
                err_dir / "charts" / "error_distribution", "Ensemble errors by wrong components")
    count_chart(three.histogram, err_dir / "charts" / "error_categories", "Categories of all-wrong errors")
    _provenance(cfg, "errors", err_dir)
    return hist


# --- report ---------------------------------------------------------------------------

def _pct(x):
    return "n/a" if x is None else f"{100 * x:.2f}%"


def cmd_report(cfg: RunConfig) -> str:
    lines = ["# AraDhati+ run report", ""]
    manifest = cfg.out / "data" / "manifest.json"
    if manifest.exists():
        m = json.loads(manifest.read_text(encoding="utf-8"))
        lines += [f"## Corpus (mode: {m['meta']['mode']}, seed: {m['meta']['seed']})", "",
                  "| dataset | train | test | reference train | reference test |", "|---|---|---|---|---|"]
        ref = m["meta"]["reference_split"]
        for ds, c in m["totals"]["per_dataset"].items():
            r = ref.get(ds, {})
            lines.append(f"| {ds} | {c['train']} | {c['test']} | {r.get('train', '')} | {r.get('test', '')} |")
        lines += [f"| Total | {m['totals']['train']} | {m['totals']['test']} | {ref['Total']['train']} | "
                  f"{ref['Total']['test']} |", ""]
    grid = cfg.out / "train" / "grid.json"
    if grid.exists():
        g = json.loads(grid.read_text(encoding="utf-8"))
        lines += ["## Grid search (validation accuracy)", "", "| backend | lr | epochs | accuracy |", "|---|---|---|---|"]
        for name, res in g.items():
            for r in res["rows"]:
                mark = " (selected)" if res["best"] and r["learning_rate"] == res["best"]["learning_rate"] \
                    and r["epochs"] == res["best"]["epochs"] else ""
                lines.append(f"| {name} | {r['learning_rate']:g} | {r['epochs']} | {_pct(r['accuracy'])}{mark} |")
        lines.append("")
    reports = cfg.out / "eval" / "reports.json"
    if reports.exists():
        rs = json.loads(reports.read_text(encoding="utf-8"))["reports"]
        lines += ["## Test-set performance", "", "| model | slice | n | accuracy | precision | recall | F1 |",
                  "|---|---|---|---|---|---|---|"]
        for r in rs:
            m = dict(r["positive_class"] or {})
            for k in m.pop("zero_division", ()):
                m[k] = None
            lines.append(f"| {r['model']} | {r['slice']} | {r['n']} | {_pct(m.get('accuracy'))} | "
                         f"{_pct(m.get('precision'))} | {_pct(m.get('recall'))} | {_pct(m.get('f1'))} |")
        lines += ["", "n/a: zero denominator (no predicted or no true subjective instances in the slice).", ""]
    hist = cfg.out / "errors" / "error_histogram.json"
    if hist.exists():
        h = json.loads(hist.read_text(encoding="utf-8"))
        lines += ["## Ensemble errors", "",
                  f"Ensemble errors: {h['n_errors']}; {h['two_wrong']} with two wrong components, "
                  f"{h['three_wrong']} with all components wrong ({_pct(h['fractions']['three_wrong'])}).", "",
                  "| category | count |", "|---|---|"]
        lines += [f"| {k} | {v} |" for k, v in h["three_wrong_categories"].items()]
        lines.append("")
    text = "\n".join(lines)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "report.md").write_text(text + "\n", encoding="utf-8")
    return text


COMMANDS = {"build": cmd_build, "train": cmd_train, "eval": cmd_eval, "errors": cmd_errors, "report": cmd_report}


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration (YAML or JSON)")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--mode", choices=("paper", "strict"), help="override the build order")
    common.add_argument("--out", type=Path, help="override the output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="aradhati", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="ingest, preprocess, balance, augment and split")
    sub.add_parser("train", parents=[common], help="grid-search fine-tuning per backend")
    sub.add_parser("eval", parents=[common], help="slice-wise metrics for each model and the ensemble")
    sub.add_parser("errors", parents=[common], help="partition and categorize ensemble errors")
    sub.add_parser("report", parents=[common], help="summarize a run as markdown")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with stage("config"):
            cfg = load_config(args.config, {"seed": args.seed, "mode": args.mode, "out": args.out})
        result = COMMANDS[args.command](cfg)
    except StageError as exc:
        print(f"aradhati {args.command}: error {exc}", file=sys.stderr)
        return 2 if isinstance(exc.__cause__, ConfigError) else 1
    if args.command == "report":
        print(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
