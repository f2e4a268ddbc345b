"""Rooted series, singularity location and the scaling constants.

The rooted series solves ``A(z) = E(z, A(z))`` with

    E(z, u) = z exp( Z(u, A(z^2), ...) + sum_{i>=2} Z(A(z^i), A(z^{2i}), ...) / i ).

Coefficients are produced by Newton iteration on truncated series, doubling
the number of correct coefficients per step: once ``A`` is known modulo
``z^{m+1}``, every substituted series ``A(z^k)`` with ``k >= 2`` and the whole
``i >= 2`` power sum are known modulo ``z^{2m+2}``, and a Newton step in the
remaining ``u``-dependence fixes the next ``m + 1`` coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

import numpy as np

from .errors import DomainError, NumericError, UsageError
from .series import EXACT, FLOAT, TruncatedSeries
from .species import (
    OUTERPLANAR,
    TREES,
    GraphClassSpec,
    SeriesFamily,
    _is_series,
    composed_block_series,
    dissection_derivative,
    dissection_value,
    get_class,
    outerplanar_z1,
    outerplanar_z2,
)

DEFAULT_ORDER = 2048
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200
NEWTON_DAMPING = 0.5
MACHINE_EPS = np.finfo(float).eps
PRELIMINARY_ORDER = 160


# -- rooted series ---------------------------------------------------------------


def _substituted(y: TruncatedSeries, k: int, theta) -> TruncatedSeries:
    if k == 1:
        return y
    if theta != 1:
        y = y.dilate(theta ** (k - 1))
    return y.substitute_power(k)


def _newton_solve(cls: GraphClassSpec, order: int, mode: str, theta) -> tuple[TruncatedSeries, dict]:
    kk = cls.cycle_lengths
    y = TruncatedSeries([0, theta], mode=mode)
    m, steps = 1, 0
    while m < order:
        big = min(2 * m + 1, order)
        y = y.truncate(big)
        svals = [y] + [_substituted(y, ell, theta) for ell in range(2, kk + 1)]
        z_here = _ensure_series(cls.block_cis(svals), big, mode)
        power_sum = TruncatedSeries.zero(big, mode)
        for i in range(2, big + 1):
            weight = Fraction(1, i) if mode == EXACT else 1.0 / i
            power_sum = power_sum + _substituted(z_here, i, theta) * weight
        k_series = z_here + power_sum
        f = k_series.exp().shift(1) * theta
        zu = cls.block_gradient(svals)[0]
        phi = y - f
        dphi = 1 - (f * zu if _is_series(zu) else f * zu)
        y = y - phi / dphi
        m = big
        steps += 1
    residual = _fixed_point_residual(cls, y, theta)
    return y, {"newton_steps": steps, "fixed_point_residual": residual}


def _ensure_series(value, order, mode):
    if _is_series(value):
        return value
    return TruncatedSeries.constant(value, order, mode)


def _fixed_point_residual(cls, y, theta) -> float:
    mode, order = y.mode, y.order
    svals = [y] + [_substituted(y, ell, theta) for ell in range(2, cls.cycle_lengths + 1)]
    z_here = _ensure_series(cls.block_cis(svals), order, mode)
    total = z_here
    for i in range(2, order + 1):
        weight = Fraction(1, i) if mode == EXACT else 1.0 / i
        total = total + _substituted(z_here, i, theta) * weight
    diff = y - total.exp().shift(1) * theta
    if mode == EXACT:
        return float(max(abs(c) for c in diff.coeffs))
    scale = max(1.0, float(np.max(np.abs(y.coeffs))))
    return float(np.max(np.abs(diff.coeffs))) / scale


def compute_family(cls, order: int, mode: str = EXACT, theta=None) -> SeriesFamily:
    """Rooted series of ``cls`` to ``order``.

    Exact mode gives the unlabelled rooted counts.  Float mode rescales the
    variable by ``theta`` (estimated from a preliminary run when not given)
    so that large orders do not overflow.
    """
    cls = get_class(cls)
    if order < 1:
        raise UsageError("compute_family needs order >= 1")
    if mode == EXACT:
        y, diag = _newton_solve(cls, order, EXACT, Fraction(1))
        return SeriesFamily(cls, y, Fraction(1) if theta is None else theta, diag)
    if mode != FLOAT:
        raise UsageError(f"unknown mode {mode!r}")
    if theta is None:
        if order <= PRELIMINARY_ORDER:
            theta = 1.0
        else:
            pre, _ = _newton_solve(cls, PRELIMINARY_ORDER, FLOAT, 1.0)
            pre_fam = SeriesFamily(cls, pre, 1.0)
            theta = ratio_estimate(pre_fam)["aitken"]
    y, diag = _newton_solve(cls, order, FLOAT, float(theta))
    diag["theta"] = float(theta)
    return SeriesFamily(cls, y, float(theta), diag)


# -- coefficient-ratio extrapolation -------------------------------------------


def _span_from_coeffs(fam: SeriesFamily) -> int:
    support = [n - 1 for n in range(1, fam.order + 1) if fam.rooted[n] != 0]
    return reduce(math.gcd, support, 0) or 1


def ratio_estimate(fam: SeriesFamily, exponent: float = 1.5) -> dict:
    """Estimates of the radius from consecutive coefficient ratios.

    ``a_n / a_{n+d}`` corrected for the ``n^{-3/2}`` factor converges like
    ``1/n^2``; Aitken's delta-squared and a Richardson step are both reported.
    """
    d = _span_from_coeffs(fam)
    top = fam.order - d
    idx = [n for n in range(max(1, top - 2 * d * 3), top + 1) if (n - 1) % d == 0]
    if len(idx) < 3:
        raise NumericError("too few coefficients for a ratio estimate", order=fam.order)

    def rho_n(n):
        la, lb = fam.log_coefficient(n), fam.log_coefficient(n + d)
        return math.exp((la - lb) / d + exponent / d * math.log(n / (n + d)))

    r = [rho_n(n) for n in idx[-3:]]
    den = r[2] - 2 * r[1] + r[0]
    aitken = r[2] - (r[2] - r[1]) ** 2 / den if den != 0 else r[2]
    n_hi = idx[-1]
    n_lo = n_hi // 2
    n_lo -= (n_lo - 1) % d
    rh, rl = rho_n(n_hi), rho_n(n_lo)
    ratio = (n_hi / n_lo) ** 2
    richardson = (ratio * rh - rl) / (ratio - 1)
    return {"raw": r[-1], "aitken": aitken, "richardson": richardson, "span": d, "n": n_hi}


# -- the bivariate function E(z, u) -------------------------------------------


@dataclass
class EValues:
    E: float
    E_z: float
    E_u: float
    E_uu: float
    E_uz: float
    power_terms: int


class EFunction:
    """Numeric ``E(z, u)`` and its partials for a solved family."""

    def __init__(self, fam: SeriesFamily):
        self.fam = fam
        self.cls = fam.cls
        self._der = fam.rooted.derivative()

    def A(self, x: float) -> float:
        return float(self.fam.value(x).value)

    def A_prime(self, x: float) -> float:
        return float(self.fam.value(x, self._der).value) / float(self.fam.theta)

    def _svals(self, z, first=None):
        k = self.cls.cycle_lengths
        vals = [self.A(z) if first is None else first]
        vals += [self.A(z ** ell) for ell in range(2, k + 1)]
        return vals

    def evaluate(self, z: float, u: float, mixed: bool = True) -> EValues:
        cls = self.cls
        k = cls.cycle_lengths
        s = [u] + [self.A(z ** ell) for ell in range(2, k + 1)]
        base = float(cls.block_cis(s))
        grad = [float(g) for g in cls.block_gradient(s)] + [0.0] * k
        d11 = float(cls.block_d11(s))
        L = base
        Lz = sum(grad[ell - 1] * ell * z ** (ell - 1) * self.A_prime(z ** ell) for ell in range(2, k + 1))
        i = 2
        while True:
            zi = z ** i
            if zi < MACHINE_EPS * abs(L) or i > 4096:
                break
            si = [self.A(zi ** ell) for ell in range(1, k + 1)]
            L += float(cls.block_cis(si)) / i
            gi = [float(g) for g in cls.block_gradient(si)]
            Lz += sum(gi[ell - 1] * ell * z ** (i * ell - 1) * self.A_prime(zi ** ell) for ell in range(1, len(gi) + 1))
            i += 1
        e = z * math.exp(L)
        e_z = math.exp(L) + e * Lz
        e_u = e * grad[0]
        e_uu = e * (grad[0] ** 2 + d11)
        e_uz = math.nan
        if mixed:
            if cls.block_d12 is not None and k <= 2:
                dgrad1_dz = float(cls.block_d12(s)) * 2 * z * self.A_prime(z * z) if k == 2 else 0.0
                e_uz = e_z * grad[0] + e * dgrad1_dz
            else:
                h = 1e-6 * z
                up = self.evaluate(z + h, u, mixed=False).E_u
                dn = self.evaluate(z - h, u, mixed=False).E_u
                e_uz = (up - dn) / (2 * h)
        return EValues(e, e_z, e_u, e_uu, e_uz, i - 1)


# -- singularity ----------------------------------------------------------------


@dataclass
class SingularityResult:
    rho: float
    a: float
    residual: float
    iterations: int
    initial: tuple
    history: list = field(default_factory=list)


def _residual(ef: EFunction, z: float, u: float):
    v = ef.evaluate(z, u)
    return np.array([v.E - u, v.E_u - 1.0]), v


def locate_singularity(cls, fam: SeriesFamily, tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER,
                       damping: float = NEWTON_DAMPING) -> SingularityResult:
    """Damped Newton on ``E(rho, a) = a``, ``E_u(rho, a) = 1``."""
    cls = get_class(cls)
    if fam.mode != FLOAT:
        raise UsageError("locate_singularity needs a float-mode family")
    ef = EFunction(fam)
    est = ratio_estimate(fam)
    z = est["aitken"] if math.isfinite(est["aitken"]) else est["raw"]
    part = fam.value(z)
    u = float(part.value) + (part.tail if math.isfinite(part.tail) else 0.0)
    u = min(u, 0.999 * cls.block_radius) if math.isfinite(cls.block_radius) else u
    initial = (z, u)
    r, v = _residual(ef, z, u)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    for it in range(1, max_iter + 1):
        if norm < tol:
            return SingularityResult(z, u, norm, it - 1, initial, history)
        jac = np.array([[v.E_z, v.E_u - 1.0], [v.E_uz, v.E_uu]])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise NumericError("singular Jacobian in singularity search", z=z, u=u) from exc
        lam = 1.0
        for _ in range(60):
            zn, un = z + lam * step[0], u + lam * step[1]
            try:
                if not (0 < zn < 1 and un > 0):
                    raise DomainError("left the admissible region")
                rn, vn = _residual(ef, zn, un)
                nn = float(np.max(np.abs(rn)))
                if math.isfinite(nn) and nn < norm:
                    break
            except (DomainError, OverflowError, ValueError):
                pass
            lam *= damping
        else:
            raise NumericError("damped Newton could not reduce the residual", z=z, u=u, residual=norm,
                               history=history)
        z, u, r, v, norm = zn, un, rn, vn, nn
        history.append(norm)
    if norm < tol:
        return SingularityResult(z, u, norm, max_iter, initial, history)
    raise NumericError("singularity search did not converge", z=z, u=u, residual=norm, history=history)


# -- expected distances in bi-pointed derived blocks ---------------------------


def eta_outerplanar(a: float, b: float) -> tuple[float, dict]:
    """Mean distance between ``*`` and a marked fixed atom of a derived block.

    Asymmetric blocks use the 3x3 linear system for dissections; reflections
    whose axis is an edge contribute distance 1; axis-through-vertex
    reflections contribute ``(2 - 2D(b)) / (1 - 2D(b))``.
    """
    w = dissection_value(a)
    m = np.array(
        [
            [2 * w**4 - 4 * w**3 + 3 * w - 1, -(w**3) + w**2, w**3 - 2 * w**2 + w],
            [-(w**3) + w**2, 2 * w**4 - 4 * w**3 + 3 * w - 1, w**3 - 2 * w**2 + w],
            [-(w**2) + w, -(w**2) + w, 2 * w**4 - 4 * w**3 + w**2 + 2 * w - 1],
        ]
    )
    rhs = np.array([2 * w**4 - 4 * w**3 - w**2 + 3 * w - 1, -w, -(w**2)])
    det = float(np.linalg.det(m))
    if abs(det) < 1e-14:
        raise NumericError("singular distance system", determinant=det, w=w)
    eta0_prime, r_aux, s_aux = np.linalg.solve(m, rhs)
    closed = (8 * w**4 - 16 * w**3 + 4 * w - 1) / ((4 * w**3 - 6 * w**2 - 2 * w + 1) * (2 * w - 1))
    dpoint = a * dissection_derivative(a)
    eta0 = a / (dpoint + a) + dpoint / (dpoint + a) * eta0_prime
    db = dissection_value(b)
    if 1 - 2 * db <= 0:
        raise DomainError("1 - 2 D(b) <= 0")
    eta1 = 1.0
    eta2 = (2 - 2 * db) / (1 - 2 * db)
    w0 = (dpoint + a) / 2
    w1 = outerplanar_z1(a, b)
    w2 = outerplanar_z2(a, b)
    total = w0 + w1 + w2
    eta = (w0 * eta0 + w1 * eta1 + w2 * eta2) / total
    aux = {
        "w": w,
        "eta0_prime": float(eta0_prime),
        "eta0_prime_closed_form": closed,
        "R": float(r_aux),
        "S": float(s_aux),
        "determinant": det,
        "eta0": eta0,
        "eta1": eta1,
        "eta2": eta2,
        "weights": [w0, w1, w2],
        "pointed_block_sum": total,
    }
    return float(eta), aux


def _eta_for(cls: GraphClassSpec, a: float, b: float):
    if cls is OUTERPLANAR or cls.name == "outerplanar":
        return eta_outerplanar(a, b)
    if "eta" in cls.extras:
        return cls.extras["eta"](a, b)
    if cls is TREES or cls.name in ("trees", "triangle-cacti"):
        # every pointed vertex is adjacent to the root in an edge or a triangle
        return 1.0, {}
    raise UsageError(f"class {cls.name} does not define the mean block distance")


# -- constants ------------------------------------------------------------------


@dataclass
class BoltzmannContext:
    cls: str
    rho: float
    a: float
    b: float
    powers: list
    E_z: float
    E_u: float
    E_uu: float
    cA: float
    varXi: float
    zetaMean: float
    etaMean: float
    cOmega: float
    span: int
    auxiliaries: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=float, **kw)


_CONTEXT_CACHE: dict = {}


def compute_constants(cls, order: int = DEFAULT_ORDER, family: Optional[SeriesFamily] = None,
                      use_cache: bool = True) -> BoltzmannContext:
    cls = get_class(cls)
    key = (cls.name, order)
    if family is None and use_cache and key in _CONTEXT_CACHE:
        return _CONTEXT_CACHE[key]
    fam = family if family is not None else compute_family(cls, order, FLOAT)
    sing = locate_singularity(cls, fam)
    ef = EFunction(fam)
    rho, a = sing.rho, sing.a
    v = ef.evaluate(rho, a)
    d = _span_from_coeffs(fam)
    powers = [a]
    i = 2
    while rho**i > MACHINE_EPS * 1e-3 and i <= 64:
        powers.append(ef.A(rho**i))
        i += 1
    b = powers[1]
    var_xi = v.E_uu * a
    zeta = v.E_z * rho / a - 1.0
    eta, aux = _eta_for(cls, a, b)
    c_omega = math.sqrt((1 + zeta) * var_xi) / (2 * eta)
    c_a = d * math.sqrt(rho * v.E_z / (2 * math.pi * v.E_uu))
    ctx = BoltzmannContext(
        cls=cls.name,
        rho=rho,
        a=a,
        b=b,
        powers=powers,
        E_z=v.E_z,
        E_u=v.E_u,
        E_uu=v.E_uu,
        cA=c_a,
        varXi=var_xi,
        zetaMean=zeta,
        etaMean=eta,
        cOmega=c_omega,
        span=d,
        auxiliaries=aux,
        diagnostics={
            "order": fam.order,
            "theta": float(fam.theta),
            "newton_residual": sing.residual,
            "newton_iterations": sing.iterations,
            "initial_guess": list(sing.initial),
            "power_sum_terms": v.power_terms,
            "family": dict(fam.diagnostics),
        },
    )
    if family is None and use_cache:
        _CONTEXT_CACHE[key] = ctx
        _FAMILY_CACHE[key] = fam
    return ctx


_FAMILY_CACHE: dict = {}


def solved(cls, order: int = DEFAULT_ORDER) -> tuple[BoltzmannContext, SeriesFamily]:
    """Cached (constants, float family) pair used by samplers and experiments."""
    cls = get_class(cls)
    ctx = compute_constants(cls, order)
    return ctx, _FAMILY_CACHE[(cls.name, order)]


# -- diagnostics ------------------------------------------------------------------


def subcriticality_check(cls, fam: SeriesFamily, epsilon: float, ctx: Optional[BoltzmannContext] = None) -> dict:
    """Finite-truncation evidence for ``g(a + eps, rho + eps) < inf``.

    Reports the margin of the first argument against the radius of the block
    sum, tail ratios of the truncated ``A(y^i)`` series, and the value of the
    truncated ``g`` when everything converges.  The verdict is only ever
    "consistent" or "inconsistent".
    """
    cls = get_class(cls)
    ctx = ctx or compute_constants(cls, fam.order, family=fam)
    x, y = ctx.a + epsilon, ctx.rho + epsilon
    report = {"class": cls.name, "epsilon": epsilon, "x": x, "y": y, "checks": []}
    ok = True

    def note(name, margin, detail=None):
        nonlocal ok
        passed = margin is not None and math.isfinite(margin) and margin > 0
        ok = ok and passed
        report["checks"].append({"check": name, "margin": margin, "passed": passed, "detail": detail})

    note("block sum radius in s1", 1 - x / cls.block_radius if math.isfinite(cls.block_radius) else 1.0,
         {"radius": cls.block_radius})
    note("outer power sum (geometric in y)", 1 - y)
    svals_y = []
    if y < 1:
        for ell in range(2, 2 * cls.cycle_lengths + 1):
            r = fam.value(y**ell)
            note(f"A(y^{ell}) tail ratio", 1 - r.ratio if not r.diverged else -1.0,
                 {"ratio": r.ratio, "tail": r.tail})
            svals_y.append(float(r.value))
    value = None
    if ok:
        try:
            ef = EFunction(fam)
            k = cls.cycle_lengths
            s = [x] + [ef.A(y**ell) for ell in range(2, k + 1)]
            total = float(cls.block_cis(s))
            i = 2
            while y**i > MACHINE_EPS * abs(total) and i < 4096:
                total += float(cls.block_cis([ef.A(y ** (i * ell)) for ell in range(1, k + 1)])) / i
                i += 1
            value = math.exp(total)
            note("truncated g finite", 1.0 if math.isfinite(value) else -1.0, {"value": value})
        except (DomainError, OverflowError) as exc:
            note("truncated g finite", -1.0, {"error": str(exc)})
    report["g_value"] = value
    report["verdict"] = "consistent" if ok else "inconsistent"
    report["note"] = "the third requirement on the connected cycle index is not evaluated"
    return report


def lattice_span(cls, fam: SeriesFamily) -> int:
    """gcd of ``n - 1`` over sizes carrying a graph.

    A connected graph of size ``n`` exists exactly when a rooted one does,
    so the rooted coefficients decide the support.
    """
    if fam.mode != EXACT:
        raise UsageError("lattice_span needs an exact family")
    support = [n - 1 for n in range(1, fam.order + 1) if fam.rooted[n] > 0]
    if not support:
        raise DomainError("no graph of positive weight up to the computed order")
    return reduce(math.gcd, support, 0) or 1
