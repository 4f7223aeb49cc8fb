"""End-to-end smoke tests for the python module and the command-line tool."""

import csv
import hashlib
import json
import os
import subprocess
import sys

import numpy as np
import pytest

import elsh

CLI = os.environ.get("ELSH_CLI")


def test_plan_constants():
    plan = elsh.make_plan(n=10_000, c=2.0, r=0.45, D=3.0)
    assert plan.k == 31
    assert plan.g == pytest.approx(0.7369930453403368, rel=1e-12)
    assert plan.rho == pytest.approx(0.9865270688584922, rel=1e-7)
    assert plan.budget_clamped
    assert plan.probe_budget == 10_000
    assert plan.far_cap == 2 * plan.probe_budget

    ex = elsh.expanded_plan(n=1000, c=4.0, r=0.25, D=3.0)
    assert ex.k == 46
    assert ex.replication == 1216
    assert ex.bucket_scan_cap == 3

    with pytest.raises(ValueError):
        elsh.expanded_plan(n=1000, c=2.0, r=0.45, D=2.0)


def test_math_surface():
    a = elsh.alpha_constant(1e-8)
    assert a.value == pytest.approx(1.30303824483423, rel=1e-9)
    assert a.abs_error <= 1e-8
    assert elsh.entropy_bits([0.25, 0.75]) == pytest.approx(0.811278124459, rel=1e-9)
    assert elsh.phi(0.0) == pytest.approx(0.5)
    assert elsh.rho(2.0, 2.0) == 1.0


def test_search_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    n, d, r, c = 400, 64, 0.3, 2.0
    base = elsh.gaussian_instance(n=n, d=d, point_scale=1.0, seed=3)
    sigma = 1.0 / np.sqrt(2.0 * d)
    queries = sigma * rng.standard_normal((50, d))
    mates = np.stack(
        [elsh.sphere_point(q, r, seed=100 + i) for i, q in enumerate(queries)]
    )
    points = np.vstack([base, mates])

    plan = elsh.make_plan(n=len(points), c=c, r=r, D=3.0, tables=4)
    index = elsh.build_near_linear(points, plan, tables=4, seed=9)
    assert index.entries == len(points) * 4
    assert index.variant == "near-linear"

    hits = 0
    for i, q in enumerate(queries):
        rep = elsh.entropy_probe_search(
            index, q, r, c, mode="decision", seed=500 + i
        )
        if rep.success:
            hits += 1
            assert rep.found_distance <= c * r * (1 + 1e-12)
            true_id, true_dist = elsh.brute_force_nn(points, q)
            assert rep.found_distance >= true_dist - 1e-12
    assert hits >= 40  # >= 80% with slack; typically ~100%

    path = str(tmp_path / "idx.bin")
    elsh.save_index(index, path)
    back = elsh.load_index(path)
    rep1 = elsh.entropy_probe_search(index, queries[0], r, c, seed=777)
    rep2 = elsh.entropy_probe_search(back, queries[0], r, c, seed=777)
    assert rep1.probes_used == rep2.probes_used
    assert rep1.found_id == rep2.found_id
    assert rep1.success == rep2.success


def _run_cli(*args):
    proc = subprocess.run(
        [CLI, *args], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0, proc.stderr + proc.stdout
    return proc.stdout


@pytest.mark.skipif(CLI is None, reason="ELSH_CLI not set")
def test_cli_gen_data_is_deterministic(tmp_path):
    digests = []
    for tag in ("a", "b"):
        pts = tmp_path / f"pts-{tag}.bin"
        qrs = tmp_path / f"q-{tag}.bin"
        _run_cli(
            "gen-data", "--n", "200", "--d", "32", "--m", "10", "--c", "2",
            "--r", "0.3", "--seed", "42", "--out", str(pts),
            "--queries-out", str(qrs),
        )
        digests.append(
            (
                hashlib.sha256(pts.read_bytes()).hexdigest(),
                hashlib.sha256(qrs.read_bytes()).hexdigest(),
            )
        )
    assert digests[0] == digests[1]


@pytest.mark.skipif(CLI is None, reason="ELSH_CLI not set")
def test_cli_plan_json():
    out = json.loads(_run_cli("plan", "--n", "10000", "--c", "2", "--r", "0.45", "--json"))
    assert out["k"] == 31
    assert out["budget_clamped"] is True
    assert out["expanded"]["feasible"] is False


@pytest.mark.skipif(CLI is None, reason="ELSH_CLI not set")
def test_cli_pipeline(tmp_path):
    pts = str(tmp_path / "pts.bin")
    qrs = str(tmp_path / "q.bin")
    idx = str(tmp_path / "idx.bin")
    rep = str(tmp_path / "rep.csv")
    _run_cli(
        "gen-data", "--n", "500", "--d", "64", "--m", "30", "--c", "2",
        "--r", "0.3", "--seed", "7", "--out", pts, "--queries-out", qrs,
    )
    _run_cli(
        "build", "--data", pts, "--out", idx, "--c", "2", "--r", "0.3",
        "--tables", "4", "--seed", "7",
    )
    _run_cli(
        "query", "--index", idx, "--queries", qrs, "--mode", "decision",
        "--seed", "13", "--out", rep,
    )
    with open(rep, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 30
    hits = sum(int(row["success"]) for row in rows)
    assert hits >= 24  # >= 80% recall on a planted instance
    for row in rows:
        if int(row["success"]):
            assert float(row["found_distance"]) <= 2 * 0.3 * (1 + 1e-12)


@pytest.mark.skipif(CLI is None, reason="ELSH_CLI not set")
def test_cli_sweep_recall_grows_with_budget(tmp_path):
    pts = str(tmp_path / "pts.bin")
    qrs = str(tmp_path / "q.bin")
    out = str(tmp_path / "sweep.csv")
    _run_cli(
        "gen-data", "--n", "400", "--d", "64", "--m", "40", "--c", "2",
        "--r", "0.3", "--seed", "21", "--out", pts, "--queries-out", qrs,
    )
    _run_cli(
        "sweep", "--data", pts, "--queries", qrs, "--axis", "probe-multiplier",
        "--values", "0,2", "--seeds", "5", "--tables", "2", "--out", out,
    )
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(row for row in fh if not row.startswith("#")))
    assert len(rows) == 2
    recall = {float(r["value"]): float(r["recall"]) for r in rows}
    assert recall[2.0] >= recall[0.0]
    assert recall[2.0] >= 0.5


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
