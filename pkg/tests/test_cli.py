"""End-to-end command line runs against temporary output directories."""

import pytest

from lohh.cli import OUT_DIR_ENV, main


def test_run_writes_runtime_and_metadata(tmp_path, capsys):
    rc = main([
        "run", "--mech", "grg", "--n", "150", "--k", "2", "--tau", "0.5nlnn",
        "--trials", "3", "--seed", "7", "--out-dir", str(tmp_path),
        "--prefix", "demo",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "mean/n2=" in out and "wrote" in out
    runtime = (tmp_path / "demo_runtime.tsv").read_text().splitlines()
    assert runtime[0] == "n\tgrg:0.5nlnn"
    assert runtime[1].startswith("150\t")
    meta = (tmp_path / "demo_meta.txt").read_text()
    assert "mechanism=grg" in meta
    assert "master_seed=7" in meta


def test_run_traces_write_their_files(tmp_path):
    rc = main([
        "run", "--mech", "arg", "--n", "150", "--sigma", "const",
        "--sigma-const", "2", "--trials", "2", "--trace-tau", "--trace-usage",
        "--out-dir", str(tmp_path), "--prefix", "t",
    ])
    assert rc == 0
    assert (tmp_path / "t_runtime.tsv").exists()
    assert (tmp_path / "t_tau.tsv").read_text().startswith("pct_lo\tavg_tau_over_n")
    assert (tmp_path / "t_usage.tsv").read_text().startswith("pct_lo\trls1_pct")
    assert (tmp_path / "t_meta.txt").exists()


def test_run_from_meta_reproduces_bytes(tmp_path):
    args = [
        "run", "--mech", "arg", "--n", "120", "--sigma", "sqrt_n_over_ln_n",
        "--trials", "2", "--trace-tau", "--out-dir", str(tmp_path),
    ]
    assert main(args + ["--prefix", "a"]) == 0
    assert main([
        "run", "--from-meta", str(tmp_path / "a_meta.txt"),
        "--out-dir", str(tmp_path), "--prefix", "b",
    ]) == 0
    for suffix in ["runtime", "tau"]:
        a = (tmp_path / f"a_{suffix}.tsv").read_bytes()
        b = (tmp_path / f"b_{suffix}.tsv").read_bytes()
        assert a == b


def test_sweep_grid_output(tmp_path):
    rc = main([
        "sweep", "--n-values", "60,90", "--k", "2",
        "--variants", "arg:const=2,grg:0.5nlnn,simple_random",
        "--trials", "2", "--out-dir", str(tmp_path),
    ])
    assert rc == 0
    lines = (tmp_path / "sweep_runtime.tsv").read_text().splitlines()
    assert lines[0] == "n\targ:const=2\tgrg:0.5nlnn\tsimple_random"
    assert len(lines) == 3
    assert lines[1].split("\t")[0] == "60"
    assert lines[2].split("\t")[0] == "90"


def test_trace_tau_and_usage_subcommands(tmp_path, capsys):
    rc = main([
        "trace-tau", "--n", "150", "--sigma", "const", "--sigma-const", "2",
        "--trials", "2", "--out-dir", str(tmp_path),
    ])
    assert rc == 0
    assert (tmp_path / "tau_tau.tsv").exists()
    rc = main([
        "usage", "--n", "150", "--sigma", "const", "--sigma-const", "2",
        "--trials", "2", "--out-dir", str(tmp_path), "--engine", "iter",
    ])
    assert rc == 0
    assert "tau_exceed_fraction=" in capsys.readouterr().out
    assert (tmp_path / "usage_usage.tsv").exists()
    assert "usage_trace=true" in (tmp_path / "usage_meta.txt").read_text()


def test_theory_subcommand(tmp_path):
    rc = main([
        "theory", "--n-values", "100,1e3", "--k-values", "1,2",
        "--out", str(tmp_path / "th.tsv"),
        "--tau-max-out", str(tmp_path / "env.tsv"),
        "--sigma", "const", "--sigma-const", "4",
    ])
    assert rc == 0
    lines = (tmp_path / "th.tsv").read_text().splitlines()
    assert lines[0].startswith("n\tk\t")
    assert len(lines) == 5  # 2 sizes x 2 portfolios
    assert lines[1].split("\t")[:2] == ["100", "1"]
    env = (tmp_path / "env.tsv").read_text().splitlines()
    assert env[0] == "pct_lo\ttau_max_over_n"
    assert len(env) == 102


def test_out_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "nested"))
    rc = main([
        "run", "--mech", "simple_random", "--n", "80", "--trials", "2",
        "--prefix", "sr",
    ])
    assert rc == 0
    assert (tmp_path / "nested" / "sr_runtime.tsv").exists()


def test_usage_errors_exit_2(tmp_path):
    # tau on a mechanism without a learning period
    rc = main([
        "run", "--mech", "arg", "--n", "100", "--sigma", "const",
        "--sigma-const", "2", "--tau", "5", "--out-dir", str(tmp_path),
    ])
    assert rc == 2
    rc = main([
        "run", "--mech", "grg", "--n", "100", "--tau", "banana",
        "--out-dir", str(tmp_path),
    ])
    assert rc == 2
    rc = main(["run", "--mech", "arg", "--sigma", "const", "--sigma-const", "2"])
    assert rc == 2  # --n missing without --from-meta
    with pytest.raises(SystemExit):
        main(["run", "--mech", "arg", "--n", "10", "--k", "40"])
    with pytest.raises(SystemExit):
        main(["run", "--mech", "warp", "--n", "10"])


def test_io_errors_exit_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rc = main([
        "run", "--mech", "simple_random", "--n", "60", "--trials", "1",
        "--out-dir", str(blocker / "sub"),
    ])
    assert rc == 1
    rc = main(["run", "--from-meta", str(tmp_path / "missing_meta.txt")])
    assert rc == 1
