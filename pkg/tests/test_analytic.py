import math

import pytest

from subcrit.analytic import (
    DEFAULT_ORDER,
    EFunction,
    compute_constants,
    compute_family,
    eta_outerplanar,
    lattice_span,
    locate_singularity,
    ratio_estimate,
    solved,
    subcriticality_check,
)
from subcrit.errors import UsageError
from subcrit.lab.experiments import OUTERPLANAR_REFERENCE, THRESHOLDS
from subcrit.series import FLOAT

# Otter's constants for rooted trees
OTTER_RHO = 0.3383218568992076951961126
OTTER_ROOTED = 0.4399240125710253040409033


@pytest.fixture(scope="module")
def trees():
    return compute_constants("trees")


@pytest.fixture(scope="module")
def outer():
    return compute_constants("outerplanar")


def test_tree_radius_and_rooted_constant(trees):
    assert abs(trees.rho - OTTER_RHO) < 1e-12
    assert abs(trees.cA - OTTER_ROOTED) < 1e-9


@pytest.mark.parametrize("field", ["a", "E_u", "varXi", "etaMean"])
def test_forced_tree_values(trees, field):
    assert abs(getattr(trees, field) - 1) < THRESHOLDS["forced_abs"]


def test_tree_scaling_constant_formula(trees):
    assert math.isclose(trees.cOmega, math.sqrt(1 + trees.zetaMean) / 2, rel_tol=1e-12)


@pytest.mark.parametrize("key", sorted(k for k in OUTERPLANAR_REFERENCE if k != "eta0_prime"))
def test_outerplanar_reference(outer, key):
    assert abs(getattr(outer, key) / OUTERPLANAR_REFERENCE[key] - 1) < THRESHOLDS["constants_rel"]


def test_outerplanar_block_distance_two_routes(outer):
    # the 3x3 linear system and its closed-form solution
    aux = outer.auxiliaries
    assert math.isclose(aux["eta0_prime"], aux["eta0_prime_closed_form"], rel_tol=1e-12)
    assert abs(aux["eta0_prime"] / OUTERPLANAR_REFERENCE["eta0_prime"] - 1) < THRESHOLDS["constants_rel"]


def test_eta_is_a_weighted_mean(outer):
    eta, aux = eta_outerplanar(outer.a, outer.b)
    lo, hi = min(aux["eta0"], aux["eta1"], aux["eta2"]), max(aux["eta0"], aux["eta1"], aux["eta2"])
    assert lo <= eta <= hi
    assert eta == outer.etaMean


@pytest.mark.parametrize("name", ["trees", "outerplanar"])
def test_newton_residuals(name):
    assert compute_constants(name).diagnostics["newton_residual"] < THRESHOLDS["newton_residual"]


@pytest.mark.parametrize("name", ["trees", "outerplanar"])
def test_singularity_equations(name):
    ctx, fam = solved(name)
    v = EFunction(fam).evaluate(ctx.rho, ctx.a)
    assert abs(v.E - ctx.a) < 1e-12 and abs(v.E_u - 1) < 1e-12


def test_order_ladder_converges():
    lo = compute_constants("outerplanar", DEFAULT_ORDER // 4)
    hi = compute_constants("outerplanar", DEFAULT_ORDER)
    for key in ("rho", "a", "cOmega"):
        assert abs(getattr(lo, key) / getattr(hi, key) - 1) < 1e-6


def test_ratio_estimate_brackets_radius(trees):
    fam = compute_family("trees", 400, FLOAT)
    est = ratio_estimate(fam)
    assert abs(est["aitken"] - trees.rho) < 1e-6
    assert abs(est["aitken"] - trees.rho) <= abs(est["raw"] - trees.rho)


def test_singularity_needs_float_family():
    with pytest.raises(UsageError):
        locate_singularity("trees", compute_family("trees", 10))


def test_lattice_span_needs_exact_family():
    with pytest.raises(UsageError):
        lattice_span("trees", compute_family("trees", 10, FLOAT, theta=1.0))


def test_context_serialises(outer):
    import json

    d = json.loads(outer.to_json())
    assert d["cls"] == "outerplanar" and math.isclose(d["rho"], outer.rho)


@pytest.mark.parametrize("name,eps", [("trees", 1e-3), ("outerplanar", 1e-4)])
def test_subcritical_margin_is_consistent(name, eps):
    ctx, fam = solved(name)
    rep = subcriticality_check(name, fam, eps, ctx)
    assert rep["verdict"] == "consistent" and math.isfinite(rep["g_value"])


def test_outerplanar_margin_to_block_radius(outer):
    # a sits just below the radius of the dissection series
    ctx, fam = solved("outerplanar")
    assert subcriticality_check("outerplanar", fam, 1e-3, ctx)["verdict"] == "inconsistent"
    assert 0 < 0.1715728752538097 - outer.a < 1e-3


def test_far_outside_is_inconsistent():
    ctx, fam = solved("trees")
    assert subcriticality_check("trees", fam, 0.5, ctx)["verdict"] == "inconsistent"
