import csv
import json
import shutil
from pathlib import Path

import pytest

from vnsolver.cli import main
from vnsolver.config import ConfigError, load_config, parse_config, sweep_points
from vnsolver.dataset import read_manifest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TINY = """\
[paths]
workdir = work

[corpus]
size = 40
n_min = 6
n_max = 9
seed = 3

[layout]
kind = circular

[render]
scheme = uniform
width = 64
height = 64

[split]
train_total = 20
test_total = 10

[train]
max_epochs = 3
patience = 1
batch_size = 8

[experiment]
seeds = 0, 1

[sweep.mini]
layout.ratio = 0.5, 1
"""


@pytest.fixture
def tiny(tmp_path, monkeypatch):
    monkeypatch.setenv("VNSOLVE_WORKERS", "1")
    path = tmp_path / "tiny.ini"
    path.write_text(TINY)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_parse_defaults_and_overrides(tiny):
    cfg = load_config(tiny, ["render.node_scale=5", "experiment.seeds=7"])
    assert cfg.corpus.size == 40 and cfg.split.train_total == 20
    assert cfg.render.node_scale == 5.0 and cfg.render.width == 64
    assert cfg.seeds == (7,)
    assert cfg.workdir == tiny.parent / "work"
    assert cfg.variant == "circular-a1-b1-uniform-x5-y1-t20"


@pytest.mark.parametrize("text,line", [
    ("[corpus]\nsize = 10\nn_min = six\n", 3),
    ("[render]\n\nscheme = pastel\n", 3),
    ("[layout]\nkind = circular\nbogus = 1\n", 3),
    ("[experiment]\nseeds = 1, x\n", 2),
    ("[nonsense]\na = 1\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text, "bad.ini")
    assert err.value.line == line
    assert f"bad.ini:{line}:" in str(err.value)


def test_bad_override(tiny):
    with pytest.raises(ConfigError):
        load_config(tiny, ["render.scheme"])
    with pytest.raises(ConfigError):
        load_config(tiny, ["nosuch.key=1"])


def test_missing_config(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "none.ini")


def test_sweep_grid(tiny):
    cfg = load_config(tiny)
    points = list(sweep_points(cfg, "mini"))
    assert [(p.layout.a, p.layout.b) for _, p in points] == [(0.5, 1.0), (1.0, 1.0)]
    small = load_config(FIXTURES / "small.ini")
    assert len(list(sweep_points(small, "table1"))) == 27
    assert len(list(sweep_points(small, "table2a"))) == 20
    with pytest.raises(ConfigError):
        list(sweep_points(cfg, "absent"))


def test_fixture_configs_parse():
    fig1 = load_config(FIXTURES / "fig1.ini")
    assert fig1.corpus.graph6_files == (str(FIXTURES / "fig1.g6"),)
    small = load_config(FIXTURES / "small.ini")
    assert small.seeds == (0, 1, 2, 3, 4)


def test_fig1_gen_label_render(tmp_path, monkeypatch):
    monkeypatch.setenv("VNSOLVE_WORKERS", "1")
    work = tmp_path / "fig1"
    args = ["--config", FIXTURES / "fig1.ini", "--set", f"paths.workdir={work}"]
    for cmd in ("gen", "label", "render"):
        assert run(cmd, *args) == 0
    recs = read_manifest(work / "labeled.tsv")
    assert [(r.graph6, r.label) for r in recs] == [("Djc", True), ("Dto", False)]
    pngs = sorted(p.relative_to(work) for p in work.rglob("*.png"))
    assert len(pngs) == 2
    assert {p.parts[-2] for p in pngs} == {"0", "1"}


def test_full_pipeline_and_rerun(tiny, capsys):
    work = tiny.parent / "work"
    for cmd in ("gen", "label", "render", "train", "eval", "report"):
        assert run(cmd, "--config", tiny) == 0, cmd
    variant = load_config(tiny).variant
    for seed in (0, 1):
        doc = json.loads((work / "eval" / variant / f"seed-{seed}.json").read_text())
        assert set(doc["model"]) >= {"auc", "accuracy", "f1"}
        assert 0 <= doc["baseline"]["accuracy"] <= 1
        assert (work / "models" / variant / f"seed-{seed}" / "model.ckpt").exists()
        hist = list(csv.reader((work / "models" / variant / f"seed-{seed}" / "history.csv").open()))
        assert hist[0] == ["epoch", "train_loss", "val_f1", "lr"]
    for split_name, count in (("train", 16), ("val", 4), ("test", 10)):
        assert len(list((work / "images" / variant / "seed-0" / split_name).rglob("*.png"))) == count
    report = (work / "report.txt").read_text()
    assert "VN-Solver" in report and "Naive-Bayesian" in report
    assert "±" in capsys.readouterr().out

    first = tree(work)
    shutil.rmtree(work)
    for cmd in ("gen", "label", "render", "train", "eval", "report"):
        assert run(cmd, "--config", tiny) == 0
    assert tree(work) == first


def test_sweep_command(tiny):
    for cmd in ("gen", "label"):
        assert run(cmd, "--config", tiny) == 0
    assert run("eval", "--config", tiny, "--sweep", "mini", "--set", "experiment.seeds=0") == 0
    rows = (tiny.parent / "work" / "eval" / "sweep-mini.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[0].startswith("layout.ratio,variant")


def test_stage_order_errors(tiny, capsys):
    assert run("label", "--config", tiny) == 1
    assert "run `vnsolve gen` first" in capsys.readouterr().err
    assert run("report", "--config", tiny) == 1


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[render]\nscheme = pastel\n")
    assert run("gen", "--config", bad) == 2
    assert "bad.ini:2:" in capsys.readouterr().err
    assert run("gen", "--config", tmp_path / "missing.ini") == 1
    assert run("gen", "--config", bad, "--sweep", "x") == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["fly", "--config", "x"])
