import json
import os
import subprocess
import sys

import pytest

from aradhati.cli import main

from runs import write_config


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def finished_run(tmp_path_factory, small_sources):
    d = tmp_path_factory.mktemp("cli")
    cfg = write_config(d, small_sources, grid=((1e-3,), (2,)))
    for cmd in ("build", "train", "eval", "errors", "report"):
        assert run(cmd, "--config", cfg) == 0, cmd
    return d, cfg


def test_layout(finished_run):
    d, _ = finished_run
    out = d / "out"
    for rel in ("data/aradhati_plus_train.csv", "data/aradhati_plus_test.csv", "data/manifest.json",
                "train/grid.json", "train/grid.csv", "train/selected.json", "eval/votes.csv", "eval/reports.json",
                "eval/reports.csv", "eval/charts/performance.json", "errors/errors.csv",
                "errors/error_histogram.json", "report.md"):
        assert (out / rel).is_file(), rel
    for sub, command in (("data", "build"), ("train", "train"), ("eval", "eval"), ("errors", "errors")):
        prov = json.loads((out / sub / "provenance.json").read_text(encoding="utf-8"))
        assert prov["command"] == command
        assert prov["config"]["seed"] == 7
    selected = json.loads((out / "train/selected.json").read_text(encoding="utf-8"))
    assert selected == {"bertish": "train/bertish/lr0.001_ep2"}


def test_chart_sidecars_match_reports(finished_run):
    d, _ = finished_run
    reports = json.loads((d / "out/eval/reports.json").read_text(encoding="utf-8"))["reports"]
    chart = json.loads((d / "out/eval/charts/performance.json").read_text(encoding="utf-8"))
    for r in reports:
        k = chart["slices"].index(r["slice"])
        assert chart["values"]["accuracy"][r["model"]][k] == r["positive_class"]["accuracy"]
    hist = json.loads((d / "out/errors/error_histogram.json").read_text(encoding="utf-8"))
    dist = json.loads((d / "out/errors/charts/error_distribution.json").read_text(encoding="utf-8"))
    assert dist["counts"] == [hist["two_wrong"], hist["three_wrong"]]


def test_report_mentions_every_stage(finished_run):
    d, _ = finished_run
    text = (d / "out/report.md").read_text(encoding="utf-8")
    for heading in ("## Corpus", "## Grid search", "## Test-set performance", "## Ensemble errors"):
        assert heading in text


def test_mode_and_seed_flags(finished_run, tmp_path):
    _, cfg = finished_run
    assert run("build", "--config", cfg, "--mode", "paper", "--seed", 3, "--out", tmp_path / "o") == 0
    meta = json.loads((tmp_path / "o/data/manifest.json").read_text(encoding="utf-8"))["meta"]
    assert (meta["mode"], meta["seed"]) == ("paper", 3)


def test_stage_tagged_failures(finished_run, tmp_path, capsys):
    _, cfg = finished_run
    assert run("build", "--out", tmp_path / "x") != 0
    assert "[config]" in capsys.readouterr().err
    assert run("train", "--config", cfg, "--out", tmp_path / "empty") != 0
    assert "[validate]" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run("build", "--config", cfg, "--mode", "fast")
    assert exc.value.code != 0


def test_unknown_annotation_id_is_fatal(finished_run, tmp_path, capsys, monkeypatch):
    _, cfg = finished_run
    ann = tmp_path / "annotations.csv"
    ann.write_text("id,category\nno-such-id,MIXED\n", encoding="utf-8")
    monkeypatch.setenv("ARADHATI_ANNOTATIONS", str(ann))
    assert run("errors", "--config", cfg) != 0
    assert "[categorize]" in capsys.readouterr().err


def test_kernel_backends_build_identical_corpora(finished_run, tmp_path):
    _, cfg = finished_run
    for name, pure in (("compiled", ""), ("pure", "1")):
        env = {k: v for k, v in os.environ.items() if k != "ARADHATI_PURE_PYTHON"}
        if pure:
            env["ARADHATI_PURE_PYTHON"] = pure
        subprocess.run([sys.executable, "-m", "aradhati.cli", "build", "--config", str(cfg),
                        "--out", str(tmp_path / name)], env=env, check=True, capture_output=True)
    for f in ("aradhati_plus_train.csv", "aradhati_plus_test.csv", "manifest.json"):
        assert (tmp_path / "compiled/data" / f).read_bytes() == (tmp_path / "pure/data" / f).read_bytes()
    kernels_used = {json.loads((tmp_path / n / "data/provenance.json").read_text(encoding="utf-8"))["text_kernels"]
                    for n in ("compiled", "pure")}
    assert "python" in kernels_used
