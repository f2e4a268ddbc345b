"""Graph-class definitions and the composite generating series.

A class is described by the cycle index sum of its derived blocks,
``Z(s_1, s_2, ...)``, evaluated either at numbers or at truncated series.
The built-in classes are unlabelled trees (only block: an edge) and
unlabelled outerplanar graphs.  A third class, cacti whose blocks are all
triangles, is registered as a worked extension; it has lattice span 2 and
needs ``s_3`` for its underived block.

Every evaluator below is written once and works for floats and for
:class:`~subcrit.series.TruncatedSeries` arguments alike: only ring
operations, division and ``_sqrt`` are used.

Series families computed in float mode live in a rescaled variable
``w = z / theta`` (``theta`` close to the radius of convergence) so that
coefficients stay representable at large orders.  Everything returned by
this module for a family uses the family's variable; exact families have
``theta == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import ConsistencyError, DomainError, UnsupportedFeature, UsageError
from .series import EXACT, FLOAT, TruncatedSeries, eval_at, point, substitute_power

DISSECTION_RADIUS = 3.0 - 2.0 * math.sqrt(2.0)


def _is_series(x) -> bool:
    return isinstance(x, TruncatedSeries)


def _sqrt(x):
    if _is_series(x):
        return x.sqrt()
    if x < 0:
        raise DomainError(f"square root of negative value {x!r}")
    return math.sqrt(x)


def _check_dissection_arg(s):
    if _is_series(s):
        if s[0] != 0:
            raise DomainError("dissection series composed with a series of nonzero constant term")
        return
    if s < 0 or s > DISSECTION_RADIUS:
        raise DomainError(f"dissection parameter {s!r} outside [0, 3-2*sqrt(2)]")


# -- dissections --------------------------------------------------------------


def dissection_value(s):
    """``D(s) = (1 + s - sqrt(s^2 - 6s + 1)) / 4`` in the cancellation-free form."""
    _check_dissection_arg(s)
    r = _sqrt(s * s - 6 * s + 1)
    return 2 * s / (1 + s + r)


def dissection_ratio(s):
    """``D(s) / s``, analytic at 0 with value 1."""
    _check_dissection_arg(s)
    r = _sqrt(s * s - 6 * s + 1)
    return 2 / (1 + s + r)


def dissection_derivative(s):
    _check_dissection_arg(s)
    r = _sqrt(s * s - 6 * s + 1)
    return (r + 3 - s) / (4 * r)


def dissection_second_derivative(s):
    _check_dissection_arg(s)
    r = _sqrt(s * s - 6 * s + 1)
    return 2 / (r * r * r)


def _dissection_ratio_derivative(s):
    r = _sqrt(s * s - 6 * s + 1)
    q = 1 + s + r
    return -2 * (1 + (s - 3) / r) / (q * q)


def _dissection_by_recursion(order: int, mode: str) -> TruncatedSeries:
    # D = s + D^2/(1-D)  <=>  D = s + 2 D^2 - s D, read off coefficientwise
    zero = Fraction(0) if mode == EXACT else 0.0
    d = [zero] * (order + 1)
    for m in range(1, order + 1):
        acc = zero + (1 if m == 1 else 0)
        acc += 2 * sum(d[k] * d[m - k] for k in range(1, m))
        acc -= d[m - 1]
        d[m] = acc
    return TruncatedSeries(d, mode=mode)


def dissection_series(order: int, mode: str = EXACT) -> TruncatedSeries:
    """Edge-rooted polygon dissections counted by non-origin vertices.

    The functional-equation recursion and the closed form are both computed
    and must agree.
    """
    if order < 1:
        raise UsageError("dissection_series needs order >= 1")
    by_recursion = _dissection_by_recursion(order, mode)
    s = TruncatedSeries.variable(order, mode)
    closed = (1 + s - (s * s - 6 * s + 1).sqrt()) / 4
    if mode == EXACT:
        if closed != by_recursion:
            raise ConsistencyError("dissection closed form disagrees with the recursion")
    else:
        scale = max(1.0, float(max(abs(c) for c in by_recursion.coeffs)))
        err = float(max(abs(x - y) for x, y in zip(closed.coeffs, by_recursion.coeffs)))
        if err > 1e-9 * scale:
            raise ConsistencyError(f"dissection closed form disagrees with recursion by {err}")
    return by_recursion


# -- outerplanar derived blocks -----------------------------------------------
#
# Z0: asymmetric derived blocks (identity only), Z1: reflection whose axis is the
# edge from * to the other fixed vertex, Z2: axis through * and a fixed vertex
# with no edge along it, Z3: axis through * and the midpoint of an edge.


def outerplanar_z0(s1):
    return (dissection_value(s1) + s1) / 2


def outerplanar_z1(s1, s2):
    return s1 * (dissection_ratio(s2) - 1) / 2


def outerplanar_z2(s1, s2):
    d = dissection_value(s2)
    _check_reflection_denominator(d)
    return s1 * dissection_ratio(s2) * d / (1 - 2 * d)


def outerplanar_z3(s2):
    d = dissection_value(s2)
    _check_reflection_denominator(d)
    return d / (2 * (1 - 2 * d))


def _check_reflection_denominator(d):
    if not _is_series(d) and 1 - 2 * d <= 0:
        raise DomainError("1 - 2 D(s2) <= 0: reflection branches diverge")


def outerplanar_parts(s1, s2):
    """(Z0, Z1, Z2, Z3) at (s1, s2)."""
    return (outerplanar_z0(s1), outerplanar_z1(s1, s2), outerplanar_z2(s1, s2), outerplanar_z3(s2))


def outerplanar_block_cis(s):
    s1, s2 = s[0], s[1]
    z0, z1, z2, z3 = outerplanar_parts(s1, s2)
    return z0 + z1 + z2 + z3


def _reflection_p(s2):
    # coefficient of s1 in Z1 + Z2
    v, d = dissection_ratio(s2), dissection_value(s2)
    _check_reflection_denominator(d)
    return (v - 1) / 2 + v * d / (1 - 2 * d)


def _reflection_p_derivative(s2):
    v, d = dissection_ratio(s2), dissection_value(s2)
    _check_reflection_denominator(d)
    vp, dp = _dissection_ratio_derivative(s2), dissection_derivative(s2)
    g = 1 - 2 * d
    return vp / 2 + vp * d / g + v * dp / (g * g)


def _reflection_q_derivative(s2):
    d = dissection_value(s2)
    _check_reflection_denominator(d)
    g = 1 - 2 * d
    return dissection_derivative(s2) / (2 * g * g)


def outerplanar_gradient(s):
    s1, s2 = s[0], s[1]
    d1 = (dissection_derivative(s1) + 1) / 2 + _reflection_p(s2)
    d2 = s1 * _reflection_p_derivative(s2) + _reflection_q_derivative(s2)
    return (d1, d2)


def outerplanar_d11(s):
    return dissection_second_derivative(s[0]) / 2


def outerplanar_d12(s):
    return _reflection_p_derivative(s[1])


def _log1m(x):
    if _is_series(x):
        return (1 - x).log()
    return math.log1p(-x)


def outerplanar_symmetric_pointed(s, t):
    """Block sum ``2 t_2 dZ_B/ds_2``: every symmetry of a block with a marked 2-cycle.

    Reflections fixing a vertex integrate the reflection part of the derived
    sum in ``s_1``: ``s_1 Q(s_2) + s_1^2 P(s_2) / 2``.  Reflections without a
    fixed vertex pair the two halves of the Hamilton cycle, with rungs allowed
    between consecutive dissection pieces: ``s_2/2 + s_2 D/(4(1 - 2D))`` (the
    first term is the edge).  Half-turns are centred in a face,
    ``(-log(1 - D) - D)/4``, or on a chord, ``(D - s_2)/4`` (with ``D = D(s_2)``).
    Rotations of order ``r >= 3`` only contribute to ``t_r`` and are handled by
    :func:`outerplanar_higher_pointed`.
    """
    s1, s2, t2 = s[0], s[1], t[1]
    d = dissection_value(s2)
    _check_reflection_denominator(d)
    dp = dissection_derivative(s2)
    g = 1 - 2 * d
    half_turns = dp / (4 * (1 - d)) + 0.25 if not _is_exact_like(s2) else dp / (4 * (1 - d)) + Fraction(1, 4)
    free = (d - 2 * d * d + s2 * dp) / (4 * g * g)
    fixed = s1 * _reflection_q_derivative(s2) + s1 * s1 * _reflection_p_derivative(s2) / 2
    return 2 * t2 * (half_turns + free + fixed)


def outerplanar_higher_pointed(s, t):
    """Inner term ``H`` with ``sum_{r>=3} r t_r dZ_B/ds_r = sum_{r>=3} H(z^r)``.

    A rotation of order ``r >= 3`` is centred in a face whose sides form ``j``
    periodic dissection pieces, and turns by ``q`` periods for each unit ``q``
    modulo ``r``; up to orientation that gives
    ``phi(r)/(2r) sum_j D(s_r)^j/j``.  The ``phi(r)/2`` factor lives in
    :func:`rotation_weight`.
    """
    return t[0] * dissection_derivative(s[0]) / (1 - dissection_value(s[0]))


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def rotation_weight(r: int):
    return Fraction(euler_phi(r), 2)


def outerplanar_symmetric_pointed_reflections(s, t):
    """Only the reflections fixing a vertex; a lower bound kept for comparison."""
    s1, s2, t2 = s[0], s[1], t[1]
    return 2 * t2 * (s1 * _reflection_q_derivative(s2) + s1 * s1 * _reflection_p_derivative(s2) / 2)


# -- class descriptions -------------------------------------------------------


@dataclass(frozen=True)
class GraphClassSpec:
    """A block class with zero/one (or general, series-only) weights.

    ``block_cis(s)`` evaluates the derived-block cycle index sum at
    ``s = (s_1, ..., s_k)`` with ``k = cycle_lengths``; ``block_gradient`` its
    first partials, ``block_d11`` the second ``s_1`` partial.  ``symmetric_pointed``
    evaluates ``sum_{l >= 2} l t_l dZ_B/ds_l`` over underived blocks, at
    ``underived_cycle_lengths`` variables; ``symmetric_pointed_exact`` says
    whether it is complete.  Classes with unboundedly long block cycles put the
    remaining terms in ``higher_pointed``, an inner term ``H(s, t)`` summed as
    ``sum_{r >= underived_cycle_lengths + 1} H`` at ``z^r``.
    """

    name: str
    cycle_lengths: int
    block_cis: Callable
    block_gradient: Callable
    block_d11: Callable
    block_d12: Optional[Callable] = None
    symmetric_pointed: Optional[Callable] = None
    symmetric_pointed_exact: bool = False
    higher_pointed: Optional[Callable] = None
    higher_pointed_weight: Optional[Callable] = None
    underived_cycle_lengths: int = 2
    weight_kind: str = "zero-one"
    declared_span: Optional[int] = None
    membership: Optional[str] = None  # key understood by graphs.class_predicate
    block_radius: float = math.inf  # radius of convergence of Z in s_1
    description: str = ""
    extras: dict = field(default_factory=dict, compare=False, hash=False)

    def __str__(self):
        return self.name


def _tree_cis(s):
    return s[0]


def _tree_gradient(s):
    return (1,)


def _zero2(s):
    return 0


TREES = GraphClassSpec(
    name="trees",
    cycle_lengths=1,
    block_cis=_tree_cis,
    block_gradient=_tree_gradient,
    block_d11=_zero2,
    block_d12=_zero2,
    symmetric_pointed=lambda s, t: t[1],  # Z_{K2} = (s1^2 + s2)/2
    symmetric_pointed_exact=True,
    underived_cycle_lengths=2,
    declared_span=1,
    membership="trees",
    description="unlabelled trees; the only block is an edge",
)

OUTERPLANAR = GraphClassSpec(
    name="outerplanar",
    cycle_lengths=2,
    block_cis=outerplanar_block_cis,
    block_gradient=outerplanar_gradient,
    block_d11=outerplanar_d11,
    block_d12=outerplanar_d12,
    symmetric_pointed=outerplanar_symmetric_pointed,
    symmetric_pointed_exact=True,
    higher_pointed=outerplanar_higher_pointed,
    higher_pointed_weight=rotation_weight,
    underived_cycle_lengths=2,
    declared_span=1,
    membership="outerplanar",
    block_radius=DISSECTION_RADIUS,
    description="unlabelled connected outerplanar graphs",
)

TRIANGLE_CACTI = GraphClassSpec(
    name="triangle-cacti",
    cycle_lengths=2,
    block_cis=lambda s: (s[0] * s[0] + s[1]) / 2,
    block_gradient=lambda s: (s[0], Fraction(1, 2) if _is_exact_like(s[0]) else 0.5),
    block_d11=lambda s: 1,
    block_d12=_zero2,
    # Z_B(triangle) = (s1^3 + 3 s1 s2 + 2 s3)/6
    symmetric_pointed=lambda s, t: t[1] * s[0] + t[2],
    symmetric_pointed_exact=True,
    underived_cycle_lengths=3,
    declared_span=2,
    membership="triangle-cacti",
    description="connected graphs whose blocks are all triangles (extension fixture)",
)


def _is_exact_like(x) -> bool:
    if _is_series(x):
        return x.exact
    return isinstance(x, (int, Fraction))


REGISTRY = {c.name: c for c in (TREES, OUTERPLANAR, TRIANGLE_CACTI)}


def get_class(name) -> GraphClassSpec:
    if isinstance(name, GraphClassSpec):
        return name
    try:
        return REGISTRY[name]
    except KeyError:
        raise UsageError(f"unknown graph class {name!r}; known: {sorted(REGISTRY)}") from None


def register_class(spec: GraphClassSpec) -> GraphClassSpec:
    """Make a user-defined class available by name (CLI included)."""
    REGISTRY[spec.name] = spec
    return spec


# -- evaluator front ends ------------------------------------------------------


def _svals(cls: GraphClassSpec, u, h2, higher=()):
    vals = [u, h2, *higher]
    if len(vals) < cls.cycle_lengths:
        raise UsageError(f"class {cls.name} needs {cls.cycle_lengths} cycle-index variables")
    return vals


def block_cis_eval(cls, u, h2, *higher):
    """``Z_{B'}(s_1 <- u, s_2 <- h2, ...)``."""
    cls = get_class(cls)
    return cls.block_cis(_svals(cls, u, h2, higher))


def block_cis_partials(cls, u, h2, *higher):
    """``(dZ/ds1, dZ/ds2, d2Z/ds1^2)``."""
    cls = get_class(cls)
    s = _svals(cls, u, h2, higher)
    grad = tuple(cls.block_gradient(s)) + (0,) * 2
    return grad[0], grad[1], cls.block_d11(s)


def pointed_block_cis(cls, s_values: Sequence, t_values: Sequence):
    """Cycle-pointed derived blocks: ``sum_l l * t_l * dZ/ds_l``."""
    cls = get_class(cls)
    grad = cls.block_gradient(list(s_values))
    total = 0
    for ell, g in enumerate(grad, start=1):
        if _is_series(g) or g != 0:
            total = total + ell * t_values[ell - 1] * g
    return total


# -- series families -----------------------------------------------------------


@dataclass(frozen=True)
class SeriesFamily:
    """Rooted series of a zero/one class, stored as ``Y(w) = A(theta * w)``.

    All members ``A^{omega^i}`` coincide for zero/one weights; ``member(i)``
    returns it truncated at ``N // i``, the order that survives substituting ``z^i``.
    """

    cls: GraphClassSpec
    rooted: TruncatedSeries
    theta: float | Fraction = 1
    diagnostics: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def order(self) -> int:
        return self.rooted.order

    @property
    def mode(self) -> str:
        return self.rooted.mode

    def member(self, i: int) -> TruncatedSeries:
        return self.rooted.truncate(self.order // i)

    @property
    def members(self) -> dict:
        return {i: self.member(i) for i in range(1, self.order + 1)}

    def substituted(self, series: TruncatedSeries, k: int) -> TruncatedSeries:
        """``F(z^k)`` in this family's variable, for ``series = F(theta w)``."""
        if k == 1:
            return series
        if self.theta == 1:
            return substitute_power(series, k)
        return substitute_power(series.dilate(self.theta ** (k - 1)), k)

    def rooted_at_power(self, k: int) -> TruncatedSeries:
        return self.substituted(self.rooted, k)

    def pointed_at_power(self, k: int) -> TruncatedSeries:
        return self.substituted(point(self.rooted), k)

    # numbers in the original variable z

    def coefficient(self, n: int):
        c = self.rooted[n]
        if self.theta == 1:
            return c
        return float(c) * math_exp_safe(-n * math.log(self.theta))

    def log_coefficient(self, n: int, series: TruncatedSeries | None = None) -> float:
        c = float((self.rooted if series is None else series)[n])
        if c <= 0:
            return -math.inf
        return math.log(c) - n * math.log(float(self.theta))

    def value(self, x, series: TruncatedSeries | None = None):
        s = self.rooted if series is None else series
        if self.theta == 1:
            return eval_at(s, x)
        return eval_at(s, float(x) / float(self.theta))

    def derivative_value(self, x, series: TruncatedSeries | None = None):
        s = self.rooted if series is None else series
        r = self.value(x, s.derivative())
        return r._replace(value=float(r.value) / float(self.theta), tail=r.tail / float(self.theta))


def math_exp_safe(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _class_svals(fam: SeriesFamily, k: int, base: int = 1):
    return [fam.rooted_at_power(base * ell) for ell in range(1, k + 1)]


def _class_tvals(fam: SeriesFamily, k: int, base: int = 1):
    return [fam.pointed_at_power(base * ell) for ell in range(1, k + 1)]


def composed_block_series(fam: SeriesFamily) -> TruncatedSeries:
    """``G(z) = Z_{B'}(A(z), A(z^2), ...)``: derived blocks with rooted attachments."""
    cls = fam.cls
    return _as_series(cls.block_cis(_class_svals(fam, cls.cycle_lengths)), fam)


def _as_series(value, fam: SeriesFamily) -> TruncatedSeries:
    if _is_series(value):
        return value
    return TruncatedSeries.constant(value, fam.order, fam.mode)


def _power_sum(fam: SeriesFamily, inner: TruncatedSeries, start: int = 2, weight=None):
    """``sum_{i >= start} w(i) * inner(z^i)`` truncated at the family order.

    Term ``i`` has valuation >= i when ``inner`` vanishes at 0, so ``i <= N`` is exact.
    """
    total = TruncatedSeries.zero(fam.order, fam.mode)
    for i in range(start, fam.order + 1):
        term = fam.substituted(inner, i)
        if weight is not None:
            term = term * weight(i)
        total = total + term
    return total


def pv_series(cls, fam: SeriesFamily) -> TruncatedSeries:
    """Series of cycles of derived-block compositions of length >= 2 around a vertex."""
    cls = get_class(cls)
    k = cls.cycle_lengths
    inner = _as_series(pointed_block_cis(cls, _class_svals(fam, k), _class_tvals(fam, k)), fam)
    return _power_sum(fam, inner)


def cv_series(cls, fam: SeriesFamily) -> TruncatedSeries:
    return pv_series(cls, fam) * fam.rooted


def cb_series(cls, fam: SeriesFamily, allow_lower_bound: bool = False) -> TruncatedSeries:
    """Symmetric cycle-pointed graphs whose marked cycle is centred at a block."""
    cls = get_class(cls)
    if cls.symmetric_pointed is None:
        raise UnsupportedFeature(f"class {cls.name} provides no symmetric-pointed block data")
    if not cls.symmetric_pointed_exact and not allow_lower_bound:
        raise UnsupportedFeature(
            f"class {cls.name}: only a lower bound for the block-centred series is available; "
            "pass allow_lower_bound=True to accept it"
        )
    k = cls.underived_cycle_lengths
    s = _class_svals(fam, k)
    t = _class_tvals(fam, k)
    total = _as_series(cls.symmetric_pointed(s, t), fam)
    if cls.higher_pointed is not None:
        inner = _as_series(cls.higher_pointed(_class_svals(fam, 1), _class_tvals(fam, 1)), fam)
        w = cls.higher_pointed_weight
        if w is not None and fam.mode != EXACT:
            w = (lambda f: (lambda r: float(f(r))))(w)
        total = total + _power_sum(fam, inner, start=k + 1, weight=w)
    return total


def divide_by_index(series: TruncatedSeries) -> TruncatedSeries:
    """Coefficient ``n`` divided by ``n`` (constant term dropped)."""
    c = series.coeffs
    if series.exact:
        out = [Fraction(0)] + [c[n] / n for n in range(1, series.order + 1)]
        return TruncatedSeries(out, mode=EXACT)
    import numpy as np

    out = np.zeros(series.order + 1)
    out[1:] = np.asarray(c[1:]) / np.arange(1, series.order + 1)
    return TruncatedSeries(out, mode=FLOAT)


def unrooted_count_series(cls, fam: SeriesFamily, cb_override: TruncatedSeries | None = None) -> TruncatedSeries:
    """Connected unrooted series from ``n c_n = a_n + cv_n + cb_n``.

    ``cb_override`` substitutes exact block-centred counts (for instance from
    brute-force enumeration); the result is then truncated to its order.
    """
    cls = get_class(cls)
    cv = cv_series(cls, fam)
    if cb_override is not None:
        cb = cb_override if cb_override.mode == fam.mode else cb_override.to_float()
    else:
        cb = cb_series(cls, fam)
    total = fam.rooted + cv + cb
    result = divide_by_index(total)
    if result.exact and cls.weight_kind == "zero-one":
        for n, c in enumerate(result.coeffs):
            if c.denominator != 1 or c < 0:
                raise ConsistencyError(f"{cls.name}: unrooted count at n={n} is {c}, not a nonnegative integer")
    return result
