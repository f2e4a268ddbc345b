from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcrit.errors import DomainError, UsageError
from subcrit.series import EXACT, FLOAT, TruncatedSeries, eval_at, exp, log, mul, point, sqrt, substitute_power
from subcrit.species import dissection_series


def S(coeffs, order=None, mode=EXACT):
    return TruncatedSeries(coeffs, mode=mode, order=order)


small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=7)


@st.composite
def exact_series(draw, max_order=12, constant=None):
    order = draw(st.integers(1, max_order))
    c = draw(st.lists(small_fracs, min_size=order + 1, max_size=order + 1))
    if constant is not None:
        c[0] = Fraction(constant)
    return S(c)


@st.composite
def float_series(draw, constant, max_order=128):
    order = draw(st.integers(1, max_order))
    seed = draw(st.integers(0, 2**32 - 1))
    c = np.random.default_rng(seed).uniform(-1, 1, order + 1) * 0.7 ** np.arange(order + 1)
    c[0] = constant
    return S(c, mode=FLOAT)


def rel_err(a, b):
    x, y = np.asarray(a.coeffs, float), np.asarray(b.coeffs, float)
    return np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(y)))


# -- mul ---------------------------------------------------------------------


def test_difference_of_squares():
    assert mul(S([1, 1], 2), S([1, -1], 2)) == S([1, 0, -1])


def test_mul_identity():
    a = S([Fraction(1, 3), 2, -5, 7])
    assert mul(a, S([1], 3)) == a


def test_dissection_squared():
    d = dissection_series(4)
    assert list(mul(d, d).coeffs) == [0, 0, 1, 2, 7]


def test_mul_truncates_to_smaller_order():
    assert mul(S([1, 1, 1]), S([1, 1])).order == 1


def test_mul_mode_mismatch():
    with pytest.raises(UsageError):
        mul(S([1, 1]), S([1.0, 1.0], mode=FLOAT))


@given(exact_series(), exact_series(), exact_series())
def test_mul_commutes_and_associates(a, b, c):
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


# -- exp / log / sqrt --------------------------------------------------------


def test_exp_of_z():
    assert exp(S([0, 1, 0, 0])) == S([1, 1, Fraction(1, 2), Fraction(1, 6)])


def test_exp_of_zero():
    assert exp(S([0], 4)) == S([1], 4)


def test_exp_needs_zero_constant():
    with pytest.raises(DomainError):
        exp(S([1, 1]))


def test_sqrt_example():
    assert list(sqrt(S([1, -6, 1, 0, 0])).coeffs) == [1, -3, -4, -12, -44]


def test_sqrt_of_one():
    assert sqrt(S([1], 3)) == S([1], 3)


@pytest.mark.parametrize("c0", [0, -1])
def test_sqrt_needs_positive_constant(c0):
    with pytest.raises(DomainError):
        sqrt(S([c0, 1]))
    with pytest.raises(DomainError):
        sqrt(S([float(c0), 1.0], mode=FLOAT))


@given(exact_series(constant=0))
@settings(max_examples=60)
def test_log_exp_round_trip_exact(a):
    assert log(exp(a)) == a


@given(exact_series(constant=1))
@settings(max_examples=60)
def test_sqrt_square_round_trip_exact(a):
    s = sqrt(a)
    assert mul(s, s) == a and s[0] == 1


@given(float_series(0.0))
@settings(max_examples=40, deadline=None)
def test_log_exp_round_trip_float(a):
    assert rel_err(log(exp(a)), a) <= 1e-12


@given(float_series(1.0))
@settings(max_examples=40, deadline=None)
def test_sqrt_square_round_trip_float(a):
    s = sqrt(a)
    assert rel_err(mul(s, s), a) <= 1e-12


# -- substitution and pointing ---------------------------------------------------


def test_substitute_square():
    assert substitute_power(S([0, 1, 1, 0, 0]), 2) == S([0, 0, 1, 0, 1])


def test_substitute_identity():
    a = S([3, 1, 4, 1, 5])
    assert substitute_power(a, 1) == a


def test_rooted_trees_at_square():
    from subcrit.analytic import compute_family

    a = compute_family("trees", 6).rooted
    assert list(substitute_power(a, 2).coeffs) == [0, 0, 1, 0, 1, 0, 2]


def test_substitute_rejects_zero():
    with pytest.raises(UsageError):
        substitute_power(S([1, 1]), 0)


@given(exact_series(max_order=20), st.integers(1, 4), st.integers(1, 4))
def test_substitution_composes(a, j, k):
    assert substitute_power(substitute_power(a, j), k) == substitute_power(a, j * k)


def test_point_simple():
    assert point(S([0, 1, 2])) == S([0, 1, 4])


def test_point_constant():
    assert point(S([5], 3)) == S([0], 3)


def test_point_rooted_trees():
    from subcrit.analytic import compute_family

    assert list(point(compute_family("trees", 4).rooted).coeffs) == [0, 1, 2, 6, 16]


@given(exact_series())
def test_point_at_one(a):
    assert sum(point(a).coeffs) == sum(n * c for n, c in enumerate(a.coeffs))


# -- evaluation --------------------------------------------------------------------


def test_geometric_at_half():
    r = eval_at(S([1] * 61, mode=FLOAT), 0.5)
    assert abs(r.value - 2.0) < 1e-12 and not r.diverged


def test_eval_at_zero():
    assert eval_at(S([Fraction(7, 3), 1, 1]), 0).value == Fraction(7, 3)


def test_eval_divergence_flagged():
    r = eval_at(S([1] * 30, mode=FLOAT), 1.5)
    assert r.diverged and r.flagged


def test_eval_negative_point():
    with pytest.raises(DomainError):
        eval_at(S([1, 1]), -0.1)


def test_partial_sum_at_singularity_is_flagged():
    # coefficients decay like n^{-3/2} there, so the truncation is visible
    from subcrit.analytic import solved

    ctx, fam = solved("outerplanar")
    r = fam.value(ctx.rho)
    assert r.flagged and not r.diverged
    assert 0 < ctx.a - r.value < 1e-2


def test_series_immutable_and_hashable():
    a = S([1.0, 2.0], mode=FLOAT)
    with pytest.raises(ValueError):
        a.coeffs[0] = 3.0
    assert hash(S([1, 2])) == hash(S([Fraction(1), Fraction(2)]))
