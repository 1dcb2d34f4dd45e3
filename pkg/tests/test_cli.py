import csv

import pytest

from slfe import fixtures
from slfe.cli import RunConfig, CLIError, apply_overrides, format_value, main
from slfe.apps import MAX
from slfe.ingest import EdgeListFormat, write_edge_list


@pytest.fixture
def sample_file(tmp_path, sample):
    path = tmp_path / "sample.el"
    write_edge_list(sample.edges(), path, EdgeListFormat("text", weighted=True))
    return path


def read_results(path):
    return [line.split() for line in path.read_text().splitlines()]


def test_run_sssp_sample(tmp_path, sample_file, capsys):
    out = tmp_path / "r.txt"
    code = main(["run", "--app", "sssp", "--graph", str(sample_file), "--weighted", "--root", "0",
                 "--rr", "on", "--results", str(out), "--threads", "1"])
    assert code == 0
    assert [float(v) for _, v in read_results(out)] == [0, 1, 2, 2, 3, 4]
    summary = capsys.readouterr().out
    for key in ("iterations", "computations", "skipped_by_rr", "messages", "preprocessing_s", "execution_s"):
        assert key in summary


def test_run_writes_metrics_one_row_per_iteration(tmp_path, sample_file, capsys):
    m = tmp_path / "m.csv"
    assert main(["run", "--app", "cc", "--graph", str(sample_file), "--weighted", "--rr", "on",
                 "--metrics", str(m), "--results", str(tmp_path / "r.txt")]) == 0
    rows = list(csv.reader(m.open()))
    iterations = int(next(line.split()[1] for line in capsys.readouterr().out.splitlines()
                          if line.startswith("iterations")))
    assert rows[0] == ["iteration", "mode", "computations", "active_vertices", "messages", "skipped_by_rr"]
    assert len(rows) - 1 == iterations


@pytest.mark.parametrize("app", ["pr", "tr", "sssp"])
def test_results_identical_across_threads(tmp_path, app):
    paths = []
    for t in (1, 8):
        p = tmp_path / f"{app}{t}.txt"
        assert main(["run", "--app", app, "--graph", "fixture:rmat9", "--rr", "off", "--threads", str(t),
                     "--results", str(p), "--max-iters", "30"]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_run_is_reproducible_with_seed(tmp_path):
    files = []
    for i in range(2):
        r, m = tmp_path / f"r{i}.txt", tmp_path / f"m{i}.csv"
        assert main(["run", "--app", "wp", "--graph", "rmat:8:4", "--weighted", "--seed", "5",
                     "--threads", "2", "--results", str(r), "--metrics", str(m)]) == 0
        files.append((r.read_bytes(), m.read_bytes()))
    assert files[0] == files[1]


def test_unreachable_values_print_inf(tmp_path, sample_file):
    out = tmp_path / "r.txt"
    assert main(["run", "--app", "sssp", "--graph", str(sample_file), "--weighted", "--root", "5",
                 "--results", str(out)]) == 0
    assert [v for _, v in read_results(out)] == ["inf"] * 5 + ["0.0"]


def test_cc_results_are_integer_labels(tmp_path):
    out = tmp_path / "r.txt"
    assert main(["run", "--app", "cc", "--graph", "fixture:components", "--results", str(out)]) == 0
    assert [v for _, v in read_results(out)][:4] == ["0", "0", "0", "3"]


def test_oracle_flag(tmp_path, capsys):
    for app in ("sssp", "cc", "wp", "pr", "tr"):
        assert main(["run", "--app", app, "--graph", "fixture:grid", "--oracle",
                     "--results", str(tmp_path / "r.txt")]) == 0
        assert "oracle            match" in capsys.readouterr().out


def test_rrg_cache_reused_and_regenerated(tmp_path, sample_file, caplog):
    cache = tmp_path / "g.rrg"
    args = ["run", "--app", "sssp", "--graph", str(sample_file), "--weighted", "--rrg", str(cache),
            "--results", str(tmp_path / "r.txt")]
    assert main(args) == 0
    assert cache.exists()
    first = cache.read_bytes()
    assert main(args) == 0
    assert cache.read_bytes() == first
    # a different graph makes the cache stale: warn, regenerate, succeed
    other = tmp_path / "other.el"
    write_edge_list(fixtures.path(6).edges(), other)
    caplog.clear()
    assert main(["run", "--app", "sssp", "--graph", str(other), "--rrg", str(cache),
                 "--results", str(tmp_path / "r2.txt")]) == 0
    assert any("regenerating" in r.message for r in caplog.records)
    assert cache.read_bytes() != first


def test_rrg_cache_other_root_regenerates(tmp_path, sample_file, caplog):
    cache = tmp_path / "g.rrg"
    base = ["run", "--app", "sssp", "--graph", str(sample_file), "--weighted", "--rrg", str(cache),
            "--results", str(tmp_path / "r.txt")]
    assert main(base + ["--root", "0"]) == 0
    assert main(base + ["--root", "1"]) == 0
    assert any("other sources" in r.message for r in caplog.records)


def test_shared_guidance_option(tmp_path, sample_file):
    out = tmp_path / "r.txt"
    assert main(["run", "--app", "sssp", "--graph", str(sample_file), "--weighted", "--root", "3",
                 "--rrg-sources", "shared", "--oracle", "--results", str(out)]) == 0


def test_compare_sample(tmp_path, sample_file, capsys):
    curves = tmp_path / "c.csv"
    assert main(["compare", "--app", "sssp", "--graph", str(sample_file), "--weighted",
                 "--a", "rr=on", "--b", "rr=off", "--curves", str(curves)]) == 0
    table = {line.split()[0]: line.split()[1:] for line in capsys.readouterr().out.splitlines()[1:]}
    a, b, delta = (int(x) for x in table["computations"])
    assert a < b and delta == b - a
    rows = list(csv.reader(curves.open()))
    assert rows[0] == ["iteration", "computations_a", "computations_b"]


def test_compare_identical_configs_zero_delta(capsys):
    assert main(["compare", "--app", "cc", "--graph", "fixture:layered", "--threads", "1"]) == 0
    table = {line.split()[0]: line.split()[1:] for line in capsys.readouterr().out.splitlines()[1:]}
    for key in ("iterations", "computations", "pull_computations", "skipped_by_rr", "messages"):
        assert int(table[key][2]) == 0


def test_compare_pr_reports_ec_fraction(capsys):
    assert main(["compare", "--app", "pr", "--graph", "rmat:10:4", "--a", "rr=on", "--b", "rr=off",
                 "--threads", "1", "--max-iters", "20"]) == 0
    assert "ec_fraction" in capsys.readouterr().out


def test_compare_mismatched_app_is_usage_error(sample_file, capsys):
    assert main(["compare", "--app", "sssp", "--graph", str(sample_file), "--a", "app=cc"]) == 2
    assert main(["compare", "--app", "sssp", "--graph", str(sample_file), "--b", "graph=x.el"]) == 2
    assert "share app and graph" in capsys.readouterr().err


def test_apply_overrides():
    base = RunConfig(app="sssp", graph="g")
    cfg = apply_overrides(base, ["rr=off", "threads=3", "dense-divisor=5"])
    assert (cfg.rr, cfg.threads, cfg.dense_divisor) == (False, 3, 5.0)
    with pytest.raises(CLIError):
        apply_overrides(base, ["colour=red"])
    with pytest.raises(CLIError):
        apply_overrides(base, ["threads=0"])


def test_missing_graph_nonzero_exit(capsys):
    assert main(["run", "--app", "sssp", "--graph", "does-not-exist.el"]) != 0
    assert "not found" in capsys.readouterr().err


def test_parse_error_nonzero_exit(tmp_path, capsys):
    bad = tmp_path / "bad.el"
    bad.write_text("0 1\n0 x\n")
    assert main(["run", "--app", "cc", "--graph", str(bad), "--results", str(tmp_path / "r")]) == 1
    assert "line 2" in capsys.readouterr().err


def test_bad_root_nonzero_exit(sample_file, tmp_path):
    assert main(["run", "--app", "sssp", "--graph", str(sample_file), "--root", "99", "--weighted",
                 "--results", str(tmp_path / "r")]) == 1


def test_threads_env_fallback(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("SLFE_THREADS", "2")
    assert main(["run", "--app", "cc", "--graph", "fixture:path", "--results", str(tmp_path / "r")]) == 0
    monkeypatch.setenv("SLFE_THREADS", "many")
    assert main(["run", "--app", "cc", "--graph", "fixture:path", "--results", str(tmp_path / "r")]) == 2


def test_invalid_counts_are_usage_errors(tmp_path):
    for flag in (["--partitions", "0"], ["--threads", "0"], ["--max-iters", "0"]):
        assert main(["run", "--app", "cc", "--graph", "fixture:path", *flag]) == 2


def test_generate_round_trip(tmp_path, capsys):
    out = tmp_path / "g.bin"
    assert main(["generate", "rmat:6:4", "-o", str(out), "--format", "binary", "--weighted", "--seed", "3"]) == 0
    assert out.stat().st_size == 64 * 4 * 12
    r = tmp_path / "r.txt"
    assert main(["run", "--app", "sssp", "--graph", str(out), "--format", "binary", "--weighted",
                 "--oracle", "--results", str(r)]) == 0


def test_format_value():
    assert format_value(MAX) == "inf"
    assert format_value(0.1) == "0.1"
    assert format_value(3) == "3"
