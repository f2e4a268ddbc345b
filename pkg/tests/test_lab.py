import json
import math

import numpy as np
import pytest

from subcrit.errors import UsageError
from subcrit.lab import experiments as ex
from subcrit.lab.cli import main
from subcrit.lab.report import ExperimentReport, verdict
from subcrit.lab.verify import CriterionResult, hygiene_report


# -- reports ----------------------------------------------------------------------------


@pytest.mark.parametrize("rule,value,expected", [("<", 1, True), ("<", 2, False), ("<=", 2, True), (">", 2, False),
                                                  (">=", 2, True), ("is", True, False)])
def test_verdict_rules(rule, value, expected):
    assert verdict("x", value, 2, rule)["passed"] is expected


def test_nan_never_passes():
    assert not verdict("x", float("nan"), 1.0, "<")["passed"]
    assert not verdict("x", np.float64("nan"), 1.0, ">=")["passed"]


def test_unknown_rule():
    with pytest.raises(ValueError):
        verdict("x", 1, 1, "~")


def test_report_json_handles_numpy():
    r = ExperimentReport("demo", "trees", {"n": np.int64(3)}, {"arr": np.arange(3), "code": b"\x01", "f": np.float32(1)},
                         [verdict("v", np.float64(0.1), 0.2)])
    d = json.loads(r.to_json())
    assert d["passed"] and d["statistics"]["arr"] == [0, 1, 2] and d["statistics"]["code"] == "01"


def test_criterion_summary_lists_failures():
    bad = ExperimentReport("demo", "trees", {}, {}, [verdict("too big", 3, 1)])
    res = CriterionResult(4, [bad])
    assert res.summary() == "criterion 4 [sampler exactness]: FAIL (demo/trees: too big)"
    assert CriterionResult(7, [ExperimentReport("d", "t", {}, {}, [verdict("ok", 0, 1)])]).summary().endswith("PASS")
    assert not CriterionResult(1).passed


# -- statistics ----------------------------------------------------------------------------


def test_tail_envelope_on_gaussian_squares():
    # T = D^2 with D half-normal has P(T >= s) = erfc(sqrt(s/2)) <= exp(-s/2)
    rng = np.random.default_rng(0)
    t = np.abs(rng.standard_normal(20000)) ** 2
    env = ex.tail_envelope(t)
    assert env["holds"] and 0.1 < env["c"] < 0.5
    assert env["points"] > 1000


def test_tail_envelope_degenerate():
    env = ex.tail_envelope(np.ones(100))
    assert not env["holds"] and env["c"] == 0.0


def _synthetic(c, n, samples, seed=0):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(int(0.9 * n), int(1.1 * n) + 1, samples)
    pair = np.round(rng.rayleigh(1.0, samples) * np.sqrt(sizes) / (2 * c))
    return {"cls": "trees", "n": n, "samples": samples, "seed": seed, "window": 0.1, "method": "decomposition",
            "sizes": sizes, "pair": pair, "diameter": 2 * pair + 1, "bias": 0.0, "seconds": 0.0}


def test_rayleigh_accepts_matching_law():
    c = ex._context("trees").cOmega
    r = ex.run_rayleigh("trees", data=_synthetic(c, 10**6, 5000))
    assert r.passed, r.failures()


def test_rayleigh_rejects_corrupted_constant():
    c = ex._context("trees").cOmega
    r = ex.run_rayleigh("trees", data=_synthetic(c, 10**6, 5000), c_omega=2 * c)
    assert "ks to Rayleigh(1)" in r.failures() and "mean relative error" in r.failures()


def test_distance_samples_do_not_depend_on_threads():
    a = ex.distance_samples("trees", 200, 300, seed=5, threads=1)
    b = ex.distance_samples("trees", 200, 300, seed=5, threads=2)
    for key in ("sizes", "pair", "diameter"):
        assert np.array_equal(a[key], b[key])


def test_thread_env(monkeypatch):
    monkeypatch.setenv("SUBCRIT_THREADS", "3")
    assert ex.thread_count() == 3
    monkeypatch.setenv("SUBCRIT_THREADS", "many")
    with pytest.raises(UsageError):
        ex.thread_count()


def test_distances_bounded_by_diameter():
    d = ex.distance_samples("outerplanar", 300, 100, seed=1)
    assert (d["pair"] <= d["diameter"]).all() and (d["diameter"] < d["sizes"]).all()
    assert 0 < d["bias"] < 0.1


def test_census_radius_zero_is_trivial():
    r = ex.run_bs_census("trees", 100, 0, samples=10, stability=False)
    assert r.statistics["tv"] == 0.0 and r.statistics["codes_unrooted"] == 1


def test_census_small_trees():
    r = ex.run_bs_census("trees", 500, 1, samples=40, seed=3)
    assert r.statistics["tv"] < 0.05 and r.statistics["codes_rooted"] > 3


def test_census_rejects_negative_radius():
    with pytest.raises(UsageError):
        ex.run_bs_census("trees", 10, -1)


def test_fragments_small():
    r = ex.run_fragments("trees", 200, samples=1000, seed=2)
    s = r.statistics
    assert 0 < s["p_empty"] < 1 and s["median_size"] <= 10
    assert s["tv"] < 0.15


def test_counting_report():
    r = ex.run_counting("trees", 7)
    assert r.passed, r.failures()


def test_uniformity_report_small():
    r = ex.run_uniformity("trees", 6, rooted=False, method="orbit-rejection", samples=30000, seed=1)
    assert r.passed, r.failures()
    assert r.statistics["classes"] == 6


def test_hygiene_report():
    r = hygiene_report(trials=5)
    assert r.passed, r.failures()


# -- command line ------------------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_cli_count(capsys):
    code, out = run(capsys, "count", "--class", "trees", "--n", "8")
    d = json.loads(out.out)
    assert code == 0 and d["unrooted"][1:] == [1, 1, 1, 2, 3, 6, 11, 23]


def test_cli_count_float(capsys):
    code, out = run(capsys, "count", "--class", "outerplanar", "--n", "200", "--mode", "float")
    d = json.loads(out.out)
    assert code == 0 and d["rooted"][3] == pytest.approx(3.0) and math.isfinite(d["rooted"][200])


def test_cli_unknown_class(capsys):
    code, out = run(capsys, "count", "--class", "planar", "--n", "5")
    assert code == 2 and "planar" in out.err


def test_cli_bad_arguments():
    with pytest.raises(SystemExit) as e:
        main(["sample", "--class", "trees"])
    assert e.value.code == 2


def test_cli_sample_json(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _ = run(capsys, "sample", "--class", "outerplanar", "--size", "30", "--seed", "4", "--count", "3",
                  "--out", str(out))
    d = json.loads(out.read_text())
    assert code == 0 and len(d["graphs"]) == 3 and all(g["n"] == 30 for g in d["graphs"])


def test_cli_sample_is_reproducible(capsys):
    _, a = run(capsys, "sample", "--class", "trees", "--size", "20", "--seed", "9")
    _, b = run(capsys, "sample", "--class", "trees", "--size", "20", "--seed", "9")
    assert a.out == b.out


def test_cli_sample_graph6(capsys):
    code, out = run(capsys, "sample", "--class", "trees", "--size", "10", "--rooted", "--format", "graph6",
                    "--count", "2")
    lines = out.out.split()
    assert code == 0 and len(lines) == 2 and all(line[0] == chr(63 + 10) for line in lines)


def test_cli_empty_size_is_usage_error(capsys):
    code, out = run(capsys, "sample", "--class", "trees", "--size", "0")
    assert code == 2 and "size" in out.err


def test_cli_experiment(capsys):
    code, out = run(capsys, "experiment", "bs-census", "--class", "trees", "--n", "100", "--samples", "10",
                    "--k", "0")
    assert code == 0 and json.loads(out.out)["statistics"]["tv"] == 0.0


def test_cli_constants(capsys):
    code, out = run(capsys, "constants", "--class", "outerplanar")
    d = json.loads(out.out)
    assert code == 0 and d["passed"] and abs(d["statistics"]["cOmega"] / 0.9864689 - 1) < 1e-3


def test_cli_verify_quick(capsys):
    code, out = run(capsys, "verify", "--class", "trees", "--quick")
    d = json.loads(out.out)
    assert code == 0 and d["passed"] and [c["criterion"] for c in d["criteria"]] == [2, 3, 5, 7]
    assert "criterion 2" in out.err
