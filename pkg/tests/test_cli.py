import json

import numpy as np
import pytest

from fuzzywave import build_problem, builtin_g0, fit_conjugate, read_dataset
from fuzzywave.cli import run
from fuzzywave.decomposition import reconstruct
from fuzzywave.membership import HyperPrior


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "d.csv"
    assert run(["simulate", "--n", "20", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_simulate_echoes_config(data_file):
    meta = json.loads((data_file.parent / "d.csv.json").read_text())
    assert meta["config"]["seed"] == 1 and meta["config"]["sigma2"] == 0.1
    assert read_dataset(data_file).n == 20


def test_fit_matches_library(tmp_path, data_file):
    out, curve = tmp_path / "fit.json", tmp_path / "curve.csv"
    assert run(["fit", "--data", str(data_file), "--out", str(out), "--curve-out", str(curve)]) == 0
    res = json.loads(out.read_text())
    assert res["config"]["J"] is None and res["config"]["family"] == "daubechies2"
    ds = read_dataset(data_file)
    problem = build_problem(ds, builtin_g0("cos"))
    lib = reconstruct(fit_conjugate(problem, HyperPrior()).mean, ds.x, problem.table)
    np.testing.assert_allclose(res["fitted_at_data"]["fit"], lib, atol=1e-12)
    rows = np.loadtxt(curve, delimiter=",", skiprows=1)
    order = np.argsort(ds.x)
    np.testing.assert_array_equal(rows[:, 0], ds.x[order])
    np.testing.assert_allclose(rows[:, 1], lib[order], atol=1e-12)
    assert np.all(rows[:, 2] >= 0)


def test_fit_with_chain(tmp_path, data_file):
    out, samples = tmp_path / "fit.json", tmp_path / "chain.csv"
    argv = ["fit", "--data", str(data_file), "--out", str(out), "--membership", "ellipsoid", "--delta", "1",
            "--seed", "3", "--iters", "1500", "--burn-in", "500", "--samples-out", str(samples), "--grid", "11"]
    assert run(argv) == 0
    res = json.loads(out.read_text())
    assert len(res["curve"]["x"]) == 11
    assert res["summary"]["n_kept"] == 200
    assert len(samples.read_text().splitlines()) == 201


def test_bf_and_labels(tmp_path, data_file):
    out = tmp_path / "bf.json"
    assert run(["bf", "--data", str(data_file), "--g0", "cos", "--out", str(out)]) == 0
    bf = json.loads(out.read_text())["bayes_factor"]
    assert bf["B01"] > 10 and bf["label"].endswith("for M0")


def test_bf_strong_for_true_guess_over_seeds(tmp_path):
    strong = 0
    for seed in range(1, 21):
        d, out = tmp_path / f"d{seed}.csv", tmp_path / f"b{seed}.json"
        assert run(["simulate", "--n", "20", "--seed", str(seed), "--out", str(d)]) == 0
        assert run(["bf", "--data", str(d), "--out", str(out)]) == 0
        label = json.loads(out.read_text())["bayes_factor"]["label"]
        strong += label in ("strong for M0", "very strong for M0")
    assert strong >= 18


def test_robust_singleton(tmp_path, data_file):
    out = tmp_path / "rb.json"
    assert run(["robust", "--data", str(data_file), "--g0", "vee", "--seed", "2", "--mc-samples", "5000",
                "--out", str(out)]) == 0
    band = json.loads(out.read_text())["band"]
    assert band["width"] <= 2 * band["mc_se"]


def test_select_j(tmp_path, data_file):
    out = tmp_path / "sj.json"
    assert run(["select-j", "--data", str(data_file), "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert str(res["J_best"]) in res["log_m1"]


def test_g0_from_file(tmp_path, data_file):
    g0 = tmp_path / "g0.csv"
    xs = np.linspace(0, 1, 41)
    g0.write_text("x,g0\n" + "".join(f"{a},{np.cos(2 * np.pi * a)}\n" for a in xs))
    out = tmp_path / "bf.json"
    assert run(["bf", "--data", str(data_file), "--g0", str(g0), "--out", str(out)]) == 0


def test_exit_codes_and_atomicity(tmp_path, data_file):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0.1,abc\n")
    out, curve = tmp_path / "o.json", tmp_path / "c.csv"
    assert run(["fit", "--data", str(bad), "--out", str(out), "--curve-out", str(curve)]) == 3
    assert not out.exists() and not curve.exists()
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]
    assert run(["fit", "--data", str(tmp_path / "none.csv"), "--out", str(out)]) == 2
    assert run(["fit", "--data", str(data_file), "--out", str(out), "--c", "0.5"]) == 4
    assert run(["robust", "--data", str(data_file), "--out", str(out)]) == 4  # no seed
    assert run(["fit", "--data", str(data_file), "--out", str(out), "--membership", "student-t"]) == 4
    assert run(["bf", "--data", str(data_file), "--out", str(out), "--bogus"]) == 4
    assert run(["bf", "--data", str(data_file), "--out", str(out), "--g0", "nonexistent"]) == 2
    assert not out.exists()


def test_numerical_failure_exit(tmp_path, monkeypatch, data_file):
    import fuzzywave.cli as cli

    def boom(*a, **k):
        raise ArithmeticError("synthetic")

    monkeypatch.setattr(cli, "bayes_factor_from_problem", boom)
    assert run(["bf", "--data", str(data_file), "--out", str(tmp_path / "o.json")]) == 5
