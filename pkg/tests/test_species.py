import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcrit.analytic import compute_family, lattice_span
from subcrit.errors import DomainError, UnsupportedFeature, UsageError
from subcrit.graphs import enumerate_class, enumerate_cycle_pointed
from subcrit.series import FLOAT, TruncatedSeries, eval_at, exp, mul, substitute_power
from subcrit.species import (
    DISSECTION_RADIUS,
    block_cis_eval,
    block_cis_partials,
    cb_series,
    cv_series,
    dissection_derivative,
    dissection_series,
    dissection_value,
    get_class,
    outerplanar_block_cis,
    unrooted_count_series,
)

ROOTED_TREES = [1, 1, 2, 4, 9, 20, 48, 115, 286, 719, 1842, 4766]
FREE_TREES = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551]


@pytest.fixture(scope="module")
def trees12():
    return compute_family("trees", 12)


@pytest.fixture(scope="module")
def outer8():
    return compute_family("outerplanar", 8)


def ints(series, lo=1):
    return [int(c) for c in series.coeffs[lo:]]


# -- dissections ---------------------------------------------------------------


def test_dissection_counts():
    assert ints(dissection_series(8)) == [1, 1, 3, 11, 45, 197, 903, 4279]


def test_dissection_float_matches_exact():
    e, f = dissection_series(40), dissection_series(40, FLOAT)
    assert all(math.isclose(float(a), b, rel_tol=1e-12) for a, b in zip(e.coeffs, f.coeffs))


@given(st.floats(0.0, DISSECTION_RADIUS * 0.9))
def test_dissection_closed_form_solves_its_equation(s):
    # the dissection series is the small root of 2 D^2 - (1 + s) D + s = 0
    d = dissection_value(s)
    assert abs(2 * d * d - (1 + s) * d + s) < 1e-12


@given(st.floats(0.01, DISSECTION_RADIUS * 0.8))
@settings(max_examples=30)
def test_dissection_derivative_by_differences(s):
    h = 1e-6
    fd = (dissection_value(s + h) - dissection_value(s - h)) / (2 * h)
    assert math.isclose(dissection_derivative(s), fd, rel_tol=1e-6)


def test_dissection_outside_radius():
    with pytest.raises(DomainError):
        dissection_value(0.2)


# -- block cycle index sums ---------------------------------------------------------


def test_block_sum_on_series_matches_numbers():
    x = 0.05
    z = TruncatedSeries.variable(60, FLOAT)
    composed = outerplanar_block_cis([z, z * z])
    assert math.isclose(float(eval_at(composed, x).value), float(block_cis_eval("outerplanar", x, x * x)),
                        rel_tol=1e-12)


@pytest.mark.parametrize("u,h2", [(0.1, 0.01), (0.15, 0.02)])
def test_block_partials_by_differences(u, h2):
    p1, p2, _ = block_cis_partials("outerplanar", u, h2)
    h = 1e-6
    d1 = (block_cis_eval("outerplanar", u + h, h2) - block_cis_eval("outerplanar", u - h, h2)) / (2 * h)
    d2 = (block_cis_eval("outerplanar", u, h2 + h) - block_cis_eval("outerplanar", u, h2 - h)) / (2 * h)
    assert math.isclose(p1, d1, rel_tol=1e-7) and math.isclose(p2, d2, rel_tol=1e-7)


def test_tree_block_sum_is_identity():
    assert block_cis_eval("trees", 0.3, 0.09) == 0.3


def test_unknown_class():
    with pytest.raises(UsageError):
        get_class("planar")


# -- rooted and unrooted counts --------------------------------------------------------


def test_rooted_trees(trees12):
    assert ints(trees12.rooted) == ROOTED_TREES


def test_free_trees(trees12):
    assert ints(unrooted_count_series("trees", trees12)) == FREE_TREES


def test_tree_counts_are_integral_to_high_order():
    fam = compute_family("trees", 60)
    c = unrooted_count_series("trees", fam)
    assert all(x.denominator == 1 for x in c.coeffs)
    assert int(c[60]) > 0


def test_triangle_cacti_support():
    fam = compute_family("triangle-cacti", 9)
    assert ints(fam.rooted) == [1, 0, 1, 0, 2, 0, 5, 0, 13]
    assert lattice_span("triangle-cacti", fam) == 2


def test_span_one(trees12, outer8):
    assert lattice_span("trees", trees12) == 1 == lattice_span("outerplanar", outer8)


@pytest.mark.parametrize("name,n_max", [("trees", 7), ("outerplanar", 6)])
def test_pointing_summands_match_enumeration(name, n_max):
    fam = compute_family(name, n_max)
    cv, cb = cv_series(name, fam), cb_series(name, fam)
    for n in range(1, n_max + 1):
        brute = enumerate_cycle_pointed(n, name)
        assert (brute["fixed"], brute["vertex"], brute["block"]) == (fam.rooted[n], cv[n], cb[n]), n


def test_outerplanar_unrooted_matches_enumeration(outer8):
    c = unrooted_count_series("outerplanar", outer8)
    assert ints(c)[:7] == [len(enumerate_class(n, "outerplanar")) for n in range(1, 8)]


def test_outerplanar_unrooted_values(outer8):
    assert ints(unrooted_count_series("outerplanar", outer8)) == [1, 1, 2, 5, 13, 46, 172, 777]


def test_cb_needs_symmetry_data():
    fam = compute_family("triangle-cacti", 7)
    cls = get_class("triangle-cacti")
    if cls.symmetric_pointed is None:
        with pytest.raises(UnsupportedFeature):
            cb_series(cls, fam)
    else:
        cb_series(cls, fam, allow_lower_bound=True)


def test_float_family_agrees_with_exact():
    e = compute_family("outerplanar", 30)
    f = compute_family("outerplanar", 30, FLOAT, theta=1.0)
    for n in range(31):
        assert math.isclose(float(e.rooted[n]), f.rooted[n], rel_tol=1e-12, abs_tol=1e-300)


def test_rescaled_family_coefficients():
    e = compute_family("trees", 40)
    f = compute_family("trees", 40, FLOAT, theta=0.3)
    assert math.isclose(f.coefficient(40), float(e.rooted[40]), rel_tol=1e-10)


def test_rooted_tree_functional_equation(trees12):
    # A = z exp(sum_i A(z^i) / i)
    a = trees12.rooted
    n = a.order
    inner = TruncatedSeries.zero(n)
    for i in range(1, n + 1):
        inner = inner + substitute_power(a, i) * Fraction(1, i)
    rhs = mul(TruncatedSeries.variable(n), exp(inner))
    assert rhs == a
