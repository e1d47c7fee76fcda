from __future__ import annotations

import subprocess
import sys

import pytest

from groupmix.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def cache(tmp_path):
    return str(tmp_path / "cache")


def test_irreps_summary_a5(capsys, cache):
    code, out, _ = run_cli(["irreps", "--group", "a5", "--cache-dir", cache], capsys)
    assert code == 0
    assert out.strip() == "dims=[1, 3, 3, 4, 5] sum_sq=60 d=3"


def test_irreps_summary_cyclic(capsys, cache):
    code, out, _ = run_cli(["irreps", "--group", "cyclic:4", "--cache-dir", cache], capsys)
    assert code == 0
    assert out.strip() == "dims=[1, 1, 1, 1] sum_sq=4 d=1"


def test_irreps_rejects_nonprime_q(capsys, cache):
    code, _, err = run_cli(["irreps", "--group", "sl2:4", "--cache-dir", cache], capsys)
    assert code == 1
    assert "prime" in err


def test_verify_all_passes(capsys, cache):
    code, out, _ = run_cli(
        ["verify", "--group", "sl2:5", "--which", "all", "--cache-dir", cache], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert [ln.split("\t")[0] for ln in lines] == ["schur", "parseval", "convolution"]
    assert all(ln.endswith("pass") for ln in lines)
    assert all(float(ln.split("\t")[1]) <= 1e-8 for ln in lines)


def test_verify_cyclic(capsys, cache):
    code, out, _ = run_cli(["verify", "--group", "cyclic:6", "--cache-dir", cache], capsys)
    assert code == 0


def test_verify_detects_corrupted_cache(cache):
    # fresh processes, so the on-disk cache is what actually gets loaded
    import pathlib

    def run(args):
        return subprocess.run(
            [sys.executable, "-m", "groupmix", *args, "--cache-dir", cache],
            capture_output=True,
            text=True,
        )

    assert run(["irreps", "--group", "cyclic:6"]).returncode == 0
    cached = next(pathlib.Path(cache).iterdir())
    lines = cached.read_text().splitlines()
    lines[7] = "0.5 0.5"  # clobber one matrix row
    cached.write_text("\n".join(lines) + "\n")
    proc = run(["verify", "--group", "cyclic:6"])
    assert proc.returncode == 1
    assert "error:" in proc.stderr


def test_experiment_flatten_summary(capsys, cache, tmp_path):
    out_path = str(tmp_path / "flatten.txt")
    code, out, _ = run_cli(
        [
            "experiment", "flatten", "--group", "sl2:3", "--m", "4", "--k", "3",
            "--cache-dir", cache, "--out", out_path,
        ],
        capsys,
    )
    assert code == 0
    assert "hold=true" in out
    assert "lhs=" in out and "rhs=" in out and "ratio=" in out
    assert "hold=true" in open(out_path).read()


def test_experiment_boost_csv_and_determinism(capsys, cache, tmp_path):
    args = [
        "experiment", "boost", "--group", "sl2:3", "--m", "2", "--k", "1",
        "--mode", "self-square", "--max-steps", "4", "--seed", "7",
        "--cache-dir", cache,
    ]
    out1 = str(tmp_path / "run1.csv")
    out2 = str(tmp_path / "run2.csv")
    code1, _, _ = run_cli(args + ["--out", out1], capsys)
    code2, _, _ = run_cli(args + ["--out", out2], capsys)
    assert code1 == 0 and code2 == 0
    b1, b2 = open(out1, "rb").read(), open(out2, "rb").read()
    assert b1 == b2
    header = b1.decode().splitlines()[0]
    assert header == "step,mode,l2_sq,linf_rel,eps_k,tv_dist,seconds"


def test_experiment_nof_summary(capsys, cache, tmp_path):
    out_path = str(tmp_path / "nof.csv")
    code, out, _ = run_cli(
        [
            "experiment", "nof", "--group", "sl2:3", "--parties", "2",
            "--max-steps", "4", "--cache-dir", cache, "--out", out_path,
        ],
        capsys,
    )
    assert code == 0
    assert "3-uniform=true" in out
    assert "reached_target_at_t=" in out
    rows = open(out_path).read().splitlines()
    assert rows[0] == "step,mode,l2_sq,linf_rel,eps_k,tv_dist,seconds"
    assert len(rows) == 5  # t = 1..4


def test_experiment_repair_report(capsys, cache, tmp_path):
    out_path = str(tmp_path / "cert.txt")
    code, out, _ = run_cli(
        [
            "experiment", "repair", "--group", "sl2:3", "--m", "4", "--k", "3",
            "--delta", "1e-9", "--cache-dir", cache, "--out", out_path,
        ],
        capsys,
    )
    assert code == 0
    assert "pass=true" in out
    text = open(out_path).read()
    assert "residual_ok True" in text and "l1_within_bound True" in text


def test_config_file_defaults_and_overrides(capsys, cache, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("group=sl2:3\nm=4\nk=3\n# comment\n")
    out_path = str(tmp_path / "flatten.txt")
    code, out, _ = run_cli(
        ["experiment", "flatten", "--config", str(cfg), "--cache-dir", cache, "--out", out_path],
        capsys,
    )
    assert code == 0 and "hold=true" in out
    # flag overrides the config value: k=5 is invalid for m=4
    code, _, err = run_cli(
        ["experiment", "flatten", "--config", str(cfg), "--k", "5", "--cache-dir", cache],
        capsys,
    )
    assert code == 1 and "--k" in err


def test_fail_fast_validation_names_field(capsys, cache):
    code, _, err = run_cli(
        ["experiment", "boost", "--group", "a5", "--m", "0", "--cache-dir", cache], capsys
    )
    assert code == 1 and "--m" in err
    code, _, err = run_cli(
        ["experiment", "repair", "--group", "a5", "--m", "3", "--k", "2", "--cache-dir", cache],
        capsys,
    )
    assert code == 1 and "--m" in err  # arity must be a power of two


def test_missing_group_rejected(capsys, cache):
    code, _, err = run_cli(["irreps", "--cache-dir", cache], capsys)
    assert code == 1
    assert "--group" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "groupmix", "irreps", "--group", "cyclic:4",
         "--cache-dir", str(tmp_path / "c")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "dims=[1, 1, 1, 1] sum_sq=4 d=1"
