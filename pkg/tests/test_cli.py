import json

import pytest

from ucme.cli import main

from conftest import STUDIO_DOC


@pytest.fixture(scope="module")
def studio_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("ds") / "studio.json"
    path.write_text(json.dumps(STUDIO_DOC))
    return path


def run_args(studio_file, out, user, das, seed=11):
    return [
        "run", "--ds", str(studio_file), "--user", user, "--das", das,
        "--runs", "2", "--selections", "2", "--evals", "150",
        "--seed", str(seed), "--sites", "70", "--snapshot-every", "75",
        "--out", str(out),
    ]


def test_run_and_compare(tmp_path, studio_file, capsys):
    out_a = tmp_path / "corners"
    out_b = tmp_path / "baseline"
    assert main(run_args(studio_file, out_a, "U1", "corners")) == 0
    assert main(run_args(studio_file, out_b, "baseline", "baseline")) == 0
    assert sorted(p.name for p in out_a.glob("run_*.jsonl")) == \
        ["run_000.jsonl", "run_001.jsonl"]

    csv_path = tmp_path / "table.csv"
    assert main([
        "compare", "--a", str(out_a), "--b", str(out_b),
        "--metrics", "coverage,qd_score", "--bonferroni", "2",
        "--out", str(csv_path),
    ]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "metric,mean_a,mean_b,t,p,significant,winner"
    assert len(lines) == 3


def test_run_rejects_bad_user(studio_file, tmp_path):
    with pytest.raises(SystemExit):
        main(run_args(studio_file, tmp_path / "x", "U99", "corners"))


def test_heatmap_dump(tmp_path, studio_file):
    out = tmp_path / "hm"
    args = run_args(studio_file, out, "U2", "random") + ["--dump-heatmaps"]
    assert main(args) == 0
    heatmap = (out / "run_000_feasible.csv").read_text().splitlines()
    assert len(heatmap) == 64
    assert any(cell for row in heatmap for cell in row.split(",") if cell)
