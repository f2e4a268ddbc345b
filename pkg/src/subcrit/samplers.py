"""Boltzmann and rejection samplers for unlabelled graphs of the built-in classes.

The recursive work happens in :mod:`subcrit.kernel`.  This module prepares
the per-level tables the kernel reads, turns kernel output into
:class:`~subcrit.graphs.Graph` objects and implements the conditioned,
unrooted, multiset and fragment samplers on top.

Randomness: every public sampler takes a :class:`numpy.random.Generator`.
Compiled code keeps its own generator state; it is reseeded from the
caller's generator at the start of each request, so ``(seed, stream,
arguments)`` fix the output.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import kernel
from .analytic import EFunction, solved
from .errors import BudgetExhausted, DomainError, UnsupportedFeature, UsageError
from .graphs import Graph, aut_orbit_count, canonical_code, class_predicate
from .series import TruncatedSeries, exp as series_exp
from .species import (
    DISSECTION_RADIUS,
    cb_series,
    composed_block_series,
    cv_series,
    dissection_value,
    get_class,
    outerplanar_parts,
    unrooted_count_series,
)

DEFAULT_BUDGET = 10**8  # elementary node creations per request
POISSON_TERM_CUTOFF = 1e-14
POISSON_TAIL_CUTOFF = 1e-12
DEFAULT_MAX_SIZE = 10**5
MIN_LEVELS = 64
_INNER_ATTEMPTS = 10**7

_CLASS_CODES = {"trees": kernel.CLASS_TREES, "outerplanar": kernel.CLASS_OUTERPLANAR,
                "triangle-cacti": kernel.CLASS_TRIANGLES}
# classes whose block-centred part has a sampler
_CB_SAMPLER = {"trees"}


def make_rng(seed: Optional[int] = None, stream: int = 0) -> np.random.Generator:
    """Generator for ``(seed, stream)``; different streams are independent."""
    ss = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def _seed_kernel(rng: np.random.Generator) -> None:
    kernel.seed(int(rng.integers(0, 2**32 - 1)))


def _class_code(cls) -> int:
    try:
        return _CLASS_CODES[cls.name]
    except KeyError:
        raise UnsupportedFeature(f"no compiled sampler for class {cls.name!r}") from None


# -- parameter tables ----------------------------------------------------------------


def rooted_value(cls, x: float) -> float:
    """``A(x)`` for ``0 < x <= rho``; at ``rho`` this is the solved ``a``.

    Below ``rho`` the value is the root of ``u = E(x, u)`` in ``(0, a)``,
    which is accurate right up to the singularity where the truncated series
    is not.
    """
    cls = get_class(cls)
    ctx, fam = solved(cls)
    if x <= 0:
        raise DomainError("the Boltzmann parameter must be positive")
    if x > ctx.rho * (1 + 1e-12):
        raise DomainError(f"x = {x} exceeds the radius {ctx.rho} of the rooted series")
    if x >= ctx.rho:
        return ctx.a
    if x < 0.9 * ctx.rho:
        return float(fam.value(x).value)
    ef = EFunction(fam)
    return brentq(lambda u: ef.evaluate(x, u, mixed=False).E - u, 0.0, ctx.a, xtol=1e-16, rtol=1e-15)


@dataclass(frozen=True)
class SamplerTables:
    cls: str
    x: float
    tmax: int
    tabs: np.ndarray
    cum2: np.ndarray
    code: int
    rooted_values: np.ndarray  # A(x^t), t = 0..2 tmax
    block_values: np.ndarray  # Z_{B'}(A(x^t), A(x^{2t})), t = 0..tmax
    poisson_bias: float  # omitted Poisson mean beyond tmax

    @property
    def A(self) -> float:
        return float(self.rooted_values[1])


def _block_value(cls, s1, s2):
    return float(cls.block_cis([s1, s2]))


@lru_cache(maxsize=64)
def _tables_cached(name: str, x: float, min_levels: int) -> SamplerTables:
    cls = get_class(name)
    code = _class_code(cls)
    _, fam = solved(cls)
    ef = EFunction(fam)
    a1 = rooted_value(cls, x)

    def A(t):
        return a1 if t == 1 else ef.A(x**t)

    # levels until the Poisson means are negligible (they decay like x^t)
    t = 1
    while True:
        t += 1
        zt = _block_value(cls, A(t), A(2 * t))
        tail = zt / t * x / (1 - x)
        if t >= min_levels and zt / t < POISSON_TERM_CUTOFF and tail < POISSON_TAIL_CUTOFF:
            break
    tmax = t
    rv = np.zeros(2 * tmax + 2)
    for t in range(1, 2 * tmax + 2):
        rv[t] = A(t)
    zb = np.zeros(tmax + 1)
    for t in range(1, tmax + 1):
        zb[t] = _block_value(cls, rv[t], rv[2 * t])
    # omitted mean at level 1: terms j > tmax
    bias = sum(_block_value(cls, A(j), A(2 * j)) / j for j in range(tmax + 1, tmax + 40))

    tabs = np.zeros((tmax + 1, kernel.NCOLS))
    cum2 = np.zeros((tmax + 1, tmax + 1))
    for t in range(1, tmax + 1):
        s1, s2 = rv[t], rv[2 * t]
        tabs[t, kernel.T_LAM1] = zb[t]
        acc = 0.0
        for j in range(2, tmax + 1):
            if t * j <= tmax:
                acc += zb[t * j] / j
            cum2[t, j] = acc
        tabs[t, kernel.T_LAM2] = acc
        tabs[t, kernel.T_LAMT] = zb[t] + acc
        tabs[t, kernel.T_EXPN] = math.exp(-(zb[t] + acc))
        tabs[t, kernel.T_S1] = s1
        tabs[t, kernel.T_S2] = s2
        if code == kernel.CLASS_OUTERPLANAR:
            tabs[t, kernel.T_D1] = dissection_value(s1)
            tabs[t, kernel.T_D2] = dissection_value(s2)
            w = outerplanar_parts(s1, s2)
            for k, col in enumerate((kernel.T_W0, kernel.T_W1, kernel.T_W2, kernel.T_W3)):
                tabs[t, col] = float(w[k])
    tabs.setflags(write=False)
    cum2.setflags(write=False)
    rv.setflags(write=False)
    zb.setflags(write=False)
    return SamplerTables(cls.name, x, tmax, tabs, cum2, code, rv, zb, bias)


def build_tables(cls, x: Optional[float] = None, size_hint: int = MIN_LEVELS) -> SamplerTables:
    """Per-level kernel tables at parameter ``x`` (default: the singularity).

    Levels run to ``tmax >= min(size_hint, 64)``; beyond it only the omitted
    Poisson mass ``poisson_bias`` is lost.  When ``tmax`` is at least the
    largest admissible size nothing is lost at all under size conditioning,
    since any structure above level ``tmax`` would be repeated more than
    ``tmax`` times.
    """
    cls = get_class(cls)
    ctx, _ = solved(cls)
    x = ctx.rho if x is None else float(x)
    return _tables_cached(cls.name, x, int(max(2, min(size_hint, MIN_LEVELS))))


# -- cycle-pointed part tables ---------------------------------------------------------


@lru_cache(maxsize=8)
def _series_for(name: str):
    cls = get_class(name)
    _, fam = solved(cls)
    g = composed_block_series(fam)
    cv = cv_series(cls, fam)
    try:
        cb = cb_series(cls, fam)
    except UnsupportedFeature:
        cb = None
    return fam, g, cv, cb


def _log_weights(series: TruncatedSeries, theta: float, mmax: int):
    c = np.asarray(series.coeffs[: mmax + 1], dtype=float)
    with np.errstate(divide="ignore"):
        lc = np.log(np.where(c > 0, c, 0.0))
    return lc - np.arange(mmax + 1) * math.log(theta)


@dataclass(frozen=True)
class PartTables:
    pcum: np.ndarray
    pi: np.ndarray
    pm: np.ndarray
    p_mass: float  # sum over the table of m g_m x^{i m}
    bcum: np.ndarray
    bm: np.ndarray
    b_mass: float


def _cumulative(logw: np.ndarray, shift: float):
    w = np.exp(logw - shift)
    return np.cumsum(w), float(w.sum()) * math.exp(shift)


@lru_cache(maxsize=32)
def _parts_cached(name: str, x: float, hi: int, tmax: int) -> PartTables:
    fam, g, cv, cb = _series_for(name)
    theta = float(fam.theta)
    order = fam.order
    lx = math.log(x)
    mmax = min(order, hi - 1)
    lg = _log_weights(g, theta, mmax)
    tab_i, tab_m, tab_w = [], [], []
    for i in range(2, min(tmax, hi - 1) + 1):
        mtop = min(mmax, (hi - 1) // i)
        if mtop < 1:
            break
        m = np.arange(1, mtop + 1)
        lw = np.log(m) + lg[1 : mtop + 1] + i * m * lx
        ok = np.isfinite(lw)
        tab_i.append(np.full(ok.sum(), i))
        tab_m.append(m[ok])
        tab_w.append(lw[ok])
    if tab_w:
        pi = np.concatenate(tab_i).astype(np.int64)
        pm = np.concatenate(tab_m).astype(np.int64)
        lw = np.concatenate(tab_w)
        keep = lw > lw.max() - 700
        pi, pm, lw = pi[keep], pm[keep], lw[keep]
        pcum, p_mass = _cumulative(lw, lw.max())
    else:
        pi = pm = np.zeros(1, np.int64)
        pcum, p_mass = np.zeros(1), 0.0
    if cb is not None and name in _CB_SAMPLER and hi >= 2:
        la = _log_weights(fam.rooted, theta, min(order, hi // 2))
        m = np.arange(1, min(order, hi // 2) + 1)
        lw = np.log(m) + la[1:] + 2 * m * lx
        ok = np.isfinite(lw)
        bm = m[ok].astype(np.int64)
        bcum, b_mass = _cumulative(lw[ok], lw[ok].max())
    else:
        bm = np.zeros(1, np.int64)
        bcum, b_mass = np.zeros(1), 0.0
    for arr in (pcum, pi, pm, bcum, bm):
        arr.setflags(write=False)
    return PartTables(pcum, pi, pm, p_mass, bcum, bm, b_mass)


# -- workspaces and graph construction --------------------------------------------------


def _ws(cap: int, slot: int = 0):
    # two independent workspaces per capacity; small capacities share a bucket
    cap = max(64, 1 << (int(cap) - 1).bit_length())
    return _workspace_slot(cap, slot)


@lru_cache(maxsize=8)
def _workspace_slot(cap: int, slot: int):
    return kernel.make_workspace(cap)


def _start(ws, budget: int):
    ctr = ws[0]
    ctr[kernel.BUDGET] = int(budget)
    ctr[kernel.CREATED] = 0


def _edges_of(ws):
    ctr, eu, ev = ws[0], ws[1], ws[2]
    ne = int(ctr[kernel.NE])
    return np.stack([eu[:ne], ev[:ne]], axis=1)


def _graph_from_ws(ws, root=0, marked=None, meta=None) -> Graph:
    n = int(ws[0][kernel.NV])
    e = _edges_of(ws)
    return Graph.from_edges(n, e.tolist(), root=root, marked_cycle=marked, meta=meta)


def _window(n: int, delta: float) -> tuple[int, int]:
    if n < 1:
        raise UsageError("size must be at least 1")
    if delta < 0:
        raise UsageError("window must be nonnegative")
    lo = max(1, math.ceil(n * (1 - delta) - 1e-9))
    hi = max(lo, math.floor(n * (1 + delta) + 1e-9))
    return lo, hi


# -- dissections and block symmetries ----------------------------------------------------


def sample_dissection(x: float, rng: np.random.Generator) -> Graph:
    """Boltzmann dissection of a polygon rooted at the edge ``(0, 1)``.

    The size is the number of polygon sides other than the root edge, so a
    single edge has size 1; ``meta["size"]`` records it.
    """
    if not 0 < x < DISSECTION_RADIUS:
        raise DomainError(f"dissections need 0 < x < 3 - 2 sqrt 2, got {x}")
    d = float(dissection_value(x))
    edges = []
    pending = [(0, 1)]
    nv = 2
    while pending:
        a, b = pending.pop()
        edges.append((a, b))
        if rng.random() * d < x:
            continue
        k = 1 + int(rng.geometric(1.0 - d))
        chain = [a] + list(range(nv, nv + k - 1)) + [b]
        nv += k - 1
        pending.extend(zip(chain[:-1], chain[1:]))
    # the outer path 0 -> ... -> 1 has nv - 1 sides besides the root edge
    return Graph.from_edges(nv, edges, root=0, meta={"size": nv - 1, "root_edge": (0, 1)})


@dataclass
class SymmetryDraw:
    block: Graph  # vertex 0 is the attachment vertex *
    automorphism: list
    marked_cycle: Optional[list] = None
    branch: int = 0


def sample_block_symmetry(cls, x: float, rng: np.random.Generator) -> SymmetryDraw:
    """Derived block with an automorphism fixing ``*``, weighted by its monomial."""
    cls = get_class(cls)
    tabs = build_tables(cls, x, size_hint=2)
    _seed_kernel(rng)
    ws = _ws(1 << 16)
    ws[0][kernel.CAP] = 1 << 16
    br, nloc, ne, ab = kernel.block_symmetry(tabs.code, tabs.tabs, ws[0], ws[3], ws[4], ws[5], ws[6])
    if ab:
        raise BudgetExhausted("block symmetry exceeded the scratch capacity", capacity=1 << 16)
    nloc, ne = int(nloc), int(ne)
    lu, lv, lpart = ws[3][:ne], ws[4][:ne], ws[5][:nloc]
    block = Graph.from_edges(nloc, zip(lu.tolist(), lv.tolist()), root=0, meta={"branch": int(br)})
    perm = [int(p) if p >= 0 else v for v, p in enumerate(lpart.tolist())]
    return SymmetryDraw(block=block, automorphism=perm, branch=int(br))


# -- rooted ---------------------------------------------------------------------------------


def sample_rooted(cls, x: Optional[float], rng: np.random.Generator, max_size: int = DEFAULT_MAX_SIZE,
                  budget: int = DEFAULT_BUDGET) -> Graph:
    """Unconditioned Pólya-Boltzmann rooted graph at ``x`` (default ``rho``).

    Draws larger than ``max_size`` raise :class:`BudgetExhausted` rather
    than being silently cut.
    """
    cls = get_class(cls)
    t = build_tables(cls, x)
    ws = _ws(max_size + 1)
    _seed_kernel(rng)
    _start(ws, budget)
    ws[0][kernel.CAP] = max_size
    size, ab = kernel.draw(0, 1, t.code, t.tabs, t.cum2, t.tmax, *ws)
    if ab != 0:
        raise BudgetExhausted(f"rooted draw exceeded {max_size} vertices", max_size=max_size)
    return _graph_from_ws(ws, meta={"method": "boltzmann", "x": t.x, "poisson_bias": t.poisson_bias})


def sample_rooted_sized(cls, n: int, window: float = 0.0, rng: Optional[np.random.Generator] = None,
                        budget: int = DEFAULT_BUDGET) -> Graph:
    """Rooted graph at ``rho`` conditioned on size in ``[n(1-δ), n(1+δ)]``."""
    cls = get_class(cls)
    rng = rng if rng is not None else make_rng()
    lo, hi = _window(n, window)
    t = build_tables(cls, None, size_hint=hi)
    ws = _ws(hi + 2)
    _seed_kernel(rng)
    _start(ws, budget)
    size, attempts, st = kernel.draw_sized(0, 1, lo, hi, t.code, t.tabs, t.cum2, t.tmax, *ws, 2**62)
    created = int(ws[0][kernel.CREATED])
    if st != 0:
        raise BudgetExhausted(f"no rooted draw of size in [{lo}, {hi}] within the budget",
                              attempts=int(attempts), created=created, budget=budget)
    meta = {"method": "rejection", "attempts": int(attempts), "created": created, "window": [lo, hi],
            "poisson_bias": t.poisson_bias, "exact": True}
    return _graph_from_ws(ws, meta=meta)


def rooted_keys(cls, n: int, count: int, rng: np.random.Generator, window: float = 0.0,
                budget: int = DEFAULT_BUDGET * 100):
    """``count`` conditioned rooted draws as labelled edge bitmasks (n <= 11)."""
    cls = get_class(cls)
    lo, hi = _window(n, window)
    if hi > 11:
        raise UsageError("edge keys need at most 11 vertices")
    t = build_tables(cls, None, size_hint=hi)
    ws = _ws(hi + 2)
    _seed_kernel(rng)
    _start(ws, budget)
    keys, sizes, attempts, st = kernel.rooted_keys(count, lo, hi, t.code, t.tabs, t.cum2, t.tmax, ws, 2**62)
    if st != 0:
        raise BudgetExhausted("rooted key batch ran out of budget", done=len(keys), attempts=int(attempts))
    return keys, sizes, int(attempts)


def key_graph(key: int, n: int, root: Optional[int] = 0) -> Graph:
    """Graph of an edge bitmask produced by :func:`kernel.edge_key`."""
    edges = []
    for b in range(1, n):
        for a in range(b):
            if key >> (b * (b - 1) // 2 + a) & 1:
                edges.append((a, b))
    return Graph.from_edges(n, edges, root=root)


# -- cycle-pointed and unrooted ------------------------------------------------------------


def _summand_weights(name: str, n: int, x: float, t: SamplerTables, parts: PartTables):
    """Mixture weights at ``x`` and, when available, the size-``n`` coefficients."""
    fam, g, cv, cb = _series_for(name)
    mix = np.array([t.A, t.A * parts.p_mass, parts.b_mass if name in _CB_SAMPLER else 0.0])
    if n > fam.order:
        # the omitted share decays geometrically; report it at the last computed size
        _, _, bias = _summand_weights(name, fam.order, x, t, parts)
        return mix, None, bias
    an = float(fam.rooted[n])
    cvn = float(cv[n])
    cbn = float(cb[n]) if cb is not None else 0.0
    used_cb = cbn if name in _CB_SAMPLER else 0.0
    exact = np.array([an, cvn, used_cb])
    bias = (cbn - used_cb) / (an + cvn + cbn)
    return mix, exact, bias


def _unrooted_setup(cls, lo: int, hi: int):
    t = build_tables(cls, None, size_hint=hi)
    parts = _parts_cached(cls.name, t.x, hi, t.tmax)
    return t, parts


def _decomposition_draw(cls, lo, hi, rng, fixed_part: int, budget: int, fixed_weights=None):
    t, parts = _unrooted_setup(cls, lo, hi)
    mix, exact, bias = _summand_weights(cls.name, lo, t.x, t, parts)
    ws, wsp = _ws(hi + 2, 0), _ws(hi + 2, 1)
    _seed_kernel(rng)
    _start(ws, budget)
    if fixed_part < 0 and fixed_weights is not None:
        u = rng.random() * fixed_weights.sum()
        fixed_part = int(np.searchsorted(np.cumsum(fixed_weights), u, side="right"))
    st, part, attempts, i, m, marked = kernel.draw_unrooted(
        lo, hi, mix, fixed_part, t.code, t.tabs, t.cum2, t.tmax, parts.pcum, parts.pi, parts.pm,
        parts.bcum, parts.bm, ws, wsp, 2**62, _INNER_ATTEMPTS)
    if st != 0:
        raise BudgetExhausted(f"no cycle-pointed draw of size in [{lo}, {hi}] within the budget",
                              attempts=int(attempts), created=int(ws[0][kernel.CREATED]), budget=budget)
    return ws, int(part), int(attempts), int(i), int(m), int(marked), t, bias


def sample_cv_pointed(cls, n: int, rng: np.random.Generator, window: float = 0.0,
                      budget: int = DEFAULT_BUDGET) -> Graph:
    """Symmetric cycle-pointed graph whose marked cycle is centred at a vertex.

    A rooted graph and ``i >= 2`` copies of one composed block are glued at
    the root; the copies are cyclically permuted by an automorphism and the
    marked cycle takes one vertex from each copy.
    """
    cls = get_class(cls)
    lo, hi = _window(n, window)
    ws, part, attempts, i, m, marked, t, _ = _decomposition_draw(cls, lo, hi, rng, 1, budget)
    nv = int(ws[0][kernel.NV])
    a = nv - i * m
    cycle = [a - 1 + marked + c * m for c in range(i)]
    meta = {"method": "cv", "attempts": attempts, "cycle_length": i, "piece_size": m, "rooted_size": a,
            "centre": 0, "exact": True, "pointing": "marked vertex uniform within the piece"}
    return _graph_from_ws(ws, root=0, marked=cycle, meta=meta)


@dataclass
class CbDraw:
    graph: Graph
    hull_size: int
    slot_count: int
    components: list


def sample_cb_pointed(cls, n: int, rng: np.random.Generator, window: float = 0.0,
                      budget: int = DEFAULT_BUDGET) -> CbDraw:
    """Symmetric cycle-pointed graph whose marked cycle is centred at a block (trees)."""
    cls = get_class(cls)
    if cls.name not in _CB_SAMPLER:
        raise UnsupportedFeature(f"no block-centred sampler for {cls.name}; use orbit rejection")
    lo, hi = _window(n, window)
    ws, part, attempts, i, m, marked, t, _ = _decomposition_draw(cls, lo, hi, rng, 2, budget)
    g = _graph_from_ws(ws, root=None, marked=[0, m],
                       meta={"method": "cb", "attempts": attempts, "exact": True})
    half = g.induced(list(range(m)), root=0)
    other = g.induced(list(range(m, 2 * m)), root=m)
    return CbDraw(graph=g, hull_size=0, slot_count=2, components=[half, other])


def sample_unrooted_sized(cls, n: int, method: str = "decomposition", rng: Optional[np.random.Generator] = None,
                          window: float = 0.0, budget: int = DEFAULT_BUDGET) -> Graph:
    """Unrooted connected graph, uniform at size ``n`` (or mixed over a window).

    ``decomposition`` samples one of the rooted / vertex-centred /
    block-centred cycle-pointed parts and forgets the pointing.  It is exact
    when the class has a block-centred sampler; otherwise that part is left
    out and ``meta["bias"]`` is its share of the size-``n`` mass.
    ``orbit-rejection`` keeps a uniform rooted graph with probability
    ``1 / r(C)``, ``r`` the number of vertex orbits, and is exact for every
    class.
    """
    cls = get_class(cls)
    rng = rng if rng is not None else make_rng()
    lo, hi = _window(n, window)
    if method == "decomposition":
        exact_size = lo == hi
        fixed = None
        if exact_size:
            t, parts = _unrooted_setup(cls, lo, hi)
            _, fixed, _ = _summand_weights(cls.name, lo, t.x, t, parts)
        ws, part, attempts, i, m, marked, t, bias = _decomposition_draw(
            cls, lo, hi, rng, -1, budget, fixed_weights=fixed)
        exact = cls.name in _CB_SAMPLER
        meta = {"method": "decomposition", "summand": ["rooted", "cv", "cb"][part], "attempts": attempts,
                "exact": exact, "bias": 0.0 if exact else bias}
        return _graph_from_ws(ws, root=None, meta=meta)
    if method == "orbit-rejection":
        return _orbit_rejection(cls, lo, hi, rng, budget)
    raise UsageError(f"unknown method {method!r}; use 'decomposition' or 'orbit-rejection'")


def orbit_floor(cls, lo: int) -> int:
    """A lower bound on the number of vertex orbits of every graph of size >= ``lo``.

    Accepting with probability ``floor / r`` instead of ``1 / r`` keeps the
    output uniform and saves rejections.  A tree on at least three vertices
    has its centre and its leaves in different orbits, so the bound is 2.
    """
    return 2 if get_class(cls).name == "trees" and lo >= 3 else 1


def _orbit_rejection(cls, lo, hi, rng, budget):
    t = build_tables(cls, None, size_hint=hi)
    ws = _ws(hi + 2)
    _seed_kernel(rng)
    _start(ws, budget)
    floor = orbit_floor(cls, lo)
    rounds = 0
    attempts = 0
    while True:
        rounds += 1
        remaining = budget - int(ws[0][kernel.CREATED])
        if remaining <= 0:
            raise BudgetExhausted("orbit rejection ran out of budget", rounds=rounds, attempts=attempts)
        size, att, st = kernel.draw_sized(0, 1, lo, hi, t.code, t.tabs, t.cum2, t.tmax, *ws, 2**62)
        attempts += int(att)
        if st != 0:
            raise BudgetExhausted("orbit rejection ran out of budget", rounds=rounds, attempts=attempts)
        g = _graph_from_ws(ws, root=None)
        r = aut_orbit_count(g)
        if rng.random() * r < floor:
            g.meta.update({"method": "orbit-rejection", "rounds": rounds, "attempts": attempts, "orbits": r,
                           "exact": True})
            return g


def unrooted_keys(cls, n: int, count: int, rng: np.random.Generator, budget: int = DEFAULT_BUDGET * 1000):
    """``count`` exact-size decomposition draws as edge bitmasks plus summand ids."""
    cls = get_class(cls)
    if n > 11:
        raise UsageError("edge keys need at most 11 vertices")
    t, parts = _unrooted_setup(cls, n, n)
    mix, fixed, bias = _summand_weights(cls.name, n, t.x, t, parts)
    ws, wsp = _ws(n + 2, 0), _ws(n + 2, 1)
    _seed_kernel(rng)
    _start(ws, budget)
    keys, summ, attempts, st = kernel.unrooted_keys(
        count, n, n, mix, fixed, t.code, t.tabs, t.cum2, t.tmax, parts.pcum, parts.pi, parts.pm,
        parts.bcum, parts.bm, ws, wsp, 2**62, _INNER_ATTEMPTS)
    if st != 0:
        raise BudgetExhausted("unrooted key batch ran out of budget", done=len(keys))
    return keys, summ, int(attempts), bias


def sample_edge_array(cls, n: int, rooted: bool = False, method: str = "decomposition", window: float = 0.0,
                      rng: Optional[np.random.Generator] = None, budget: int = DEFAULT_BUDGET):
    """Sized draw returned as ``(n_vertices, eu, ev, meta)`` without building a :class:`Graph`.

    Same laws as :func:`sample_rooted_sized` (vertex 0 is the root) and
    :func:`sample_unrooted_sized`; meant for bulk statistics on large graphs.
    """
    cls = get_class(cls)
    rng = rng if rng is not None else make_rng()
    lo, hi = _window(n, window)
    if rooted:
        t = build_tables(cls, None, size_hint=hi)
        ws = _ws(hi + 2)
        _seed_kernel(rng)
        _start(ws, budget)
        size, attempts, st = kernel.draw_sized(0, 1, lo, hi, t.code, t.tabs, t.cum2, t.tmax, *ws, 2**62)
        if st != 0:
            raise BudgetExhausted(f"no rooted draw of size in [{lo}, {hi}] within the budget",
                                  attempts=int(attempts), budget=budget)
        meta = {"method": "rejection", "attempts": int(attempts), "exact": True}
    elif method == "decomposition":
        ws, part, attempts, *_rest, bias = _decomposition_draw(cls, lo, hi, rng, -1, budget)
        exact = cls.name in _CB_SAMPLER
        meta = {"method": "decomposition", "summand": part, "attempts": attempts, "exact": exact,
                "bias": 0.0 if exact else bias}
    elif method == "orbit-rejection":
        g = _orbit_rejection(cls, lo, hi, rng, budget)
        e = np.array(g.edges(), dtype=np.int64).reshape(-1, 2)
        return g.n, np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1]), g.meta
    else:
        raise UsageError(f"unknown method {method!r}; use 'decomposition' or 'orbit-rejection'")
    ctr = ws[0]
    nv, ne = int(ctr[kernel.NV]), int(ctr[kernel.NE])
    return nv, ws[1][:ne].copy(), ws[2][:ne].copy(), meta


class KeyCanonizer:
    """Caches canonical codes (and orbit counts) of labelled edge keys."""

    def __init__(self, n: int, rooted: bool):
        self.n = n
        self.rooted = rooted
        self._code: dict = {}
        self._orbits: dict = {}

    def code(self, key: int) -> bytes:
        c = self._code.get(key)
        if c is None:
            g = key_graph(key, self.n, 0 if self.rooted else None)
            c = canonical_code(g, 0 if self.rooted else None)
            self._code[key] = c
        return c

    def orbits(self, key: int) -> int:
        r = self._orbits.get(key)
        if r is None:
            r = aut_orbit_count(key_graph(key, self.n, None))
            self._orbits[key] = r
        return r

    def counts(self, keys) -> Counter:
        out = Counter()
        for k, c in Counter(keys.tolist()).items():
            out[self.code(k)] += c
        return out


def rooted_code_counts(cls, n: int, count: int, rng: np.random.Generator) -> Counter:
    keys, _, _ = rooted_keys(cls, n, count, rng)
    return KeyCanonizer(n, rooted=True).counts(keys)


def unrooted_code_counts(cls, n: int, count: int, rng: np.random.Generator, method: str = "decomposition",
                         chunk: int = 200000) -> tuple[Counter, dict]:
    """Canonical-code histogram of ``count`` unrooted draws at size ``n``."""
    cls = get_class(cls)
    canon = KeyCanonizer(n, rooted=False)
    stats = {"method": method, "count": count}
    if method == "decomposition":
        keys, summ, attempts, bias = unrooted_keys(cls, n, count, rng)
        stats.update(attempts=attempts, bias=bias, summands=np.bincount(summ, minlength=3).tolist())
        return canon.counts(keys), stats
    if method != "orbit-rejection":
        raise UsageError(f"unknown method {method!r}")
    floor = orbit_floor(cls, n)
    out = Counter()
    produced = 0
    drawn = 0
    while produced < count:
        keys, _, _ = rooted_keys(cls, n, min(chunk, 8 * (count - produced) + 1000), rng)
        drawn += len(keys)
        u = rng.random(len(keys))
        for key, ui in zip(keys.tolist(), u.tolist()):
            if ui * canon.orbits(key) < floor:
                out[canon.code(key)] += 1
                produced += 1
                if produced == count:
                    break
    stats.update(rooted_draws=drawn, orbit_floor=floor)
    return out, stats


# -- disconnected graphs ------------------------------------------------------------------


@lru_cache(maxsize=8)
def _multiset_series(name: str):
    """Scaled unrooted and multiset series ``C(theta w)``, ``G(theta w)``."""
    cls = get_class(name)
    _, fam = solved(cls)
    c = unrooted_count_series(cls, fam)
    total = c
    for j in range(2, fam.order + 1):
        total = total + fam.substituted(c, j) * (1.0 / j)
    g = series_exp(total)
    return fam, np.asarray(c.coeffs, float), np.asarray(g.coeffs, float)


def _uniform_connected(cls, size: int, rng, budget) -> Graph:
    if size == 1:
        return Graph(1, [[]])
    method = "decomposition" if cls.name in _CB_SAMPLER else "orbit-rejection"
    return sample_unrooted_sized(cls, size, method=method, rng=rng, budget=budget)


def _disjoint_union(parts: list[Graph], meta=None) -> Graph:
    edges = []
    off = 0
    for p in parts:
        edges.extend((u + off, v + off) for u, v in p.edges())
        off += p.n
    return Graph.from_edges(off, edges, meta=meta)


@lru_cache(maxsize=4096)
def _nw_table(name: str, rest: int):
    # (j, d) with probability d c_d g_{rest - j d} / (rest g_rest), in the scaled variable
    fam, c, g = _multiset_series(name)
    log_theta = math.log(float(fam.theta))
    cand_d, cand_j, cand_w = [], [], []
    for d in range(1, rest + 1):
        if c[d] <= 0:
            continue
        j = np.arange(1, rest // d + 1)
        w = d * c[d] * np.exp((j - 1) * d * log_theta) * g[rest - j * d]
        cand_d.append(np.full(len(j), d))
        cand_j.append(j)
        cand_w.append(w)
    return np.concatenate(cand_d), np.concatenate(cand_j), np.cumsum(np.concatenate(cand_w))


def multiset_profile(cls, n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Component sizes of a uniform size-``n`` multiset as ``(size, multiplicity)`` pairs.

    Recursive method of Nijenhuis and Wilf on the exact multiset
    coefficients; the shapes are chosen separately, one uniform connected
    graph per pair.
    """
    cls = get_class(cls)
    fam, _, _ = _multiset_series(cls.name)
    if n > fam.order:
        raise UnsupportedFeature(f"multiset sampling is limited to n <= {fam.order}")
    out = []
    rest = n
    while rest > 0:
        d_arr, j_arr, cum = _nw_table(cls.name, rest)
        k = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), len(cum) - 1)
        d, j = int(d_arr[k]), int(j_arr[k])
        out.append((d, j))
        rest -= j * d
    return out


def _nijenhuis_wilf(cls, n: int, rng, budget):
    comps = []
    for d, j in multiset_profile(cls, n, rng):
        comps.extend([_uniform_connected(cls, d, rng, budget)] * j)
    return comps


def sample_multiset(cls, n: int, rng: np.random.Generator, budget: int = DEFAULT_BUDGET) -> Graph:
    """Uniform unlabelled graph on ``n`` vertices whose components lie in the class."""
    cls = get_class(cls)
    if n < 0:
        raise UsageError("size must be nonnegative")
    comps = _nijenhuis_wilf(cls, n, rng, budget) if n else []
    sizes = sorted((p.n for p in comps), reverse=True)
    return _disjoint_union(comps, meta={"method": "nijenhuis-wilf", "component_sizes": sizes, "exact": True})


@lru_cache(maxsize=8)
def fragment_size_law(name: str, residue: int = 1):
    """Truncated law of ``|G|`` for the fragment limit, plus the estimated missing mass.

    ``P(|G| = k) ∝ g_k rho^k`` over ``k ≡ residue - 1 (mod span)``.  The tail
    beyond the truncation is estimated from ``g_k rho^k ~ C k^{-5/2}``.
    """
    cls = get_class(name)
    ctx, _ = solved(cls)
    fam, _, g = _multiset_series(name)
    k = np.arange(len(g))
    with np.errstate(divide="ignore"):
        lw = np.log(np.where(g > 0, g, 0.0)) + k * (math.log(ctx.rho) - math.log(float(fam.theta)))
    w = np.exp(lw)
    d = ctx.span
    w[(k % d) != ((residue - 1) % d)] = 0.0
    top = int(np.nonzero(w)[0][-1])
    const = w[top] * top**2.5
    tail = const * (2.0 / 3.0) * (top + 0.5) ** -1.5 / d
    total = w.sum() + tail
    return w / total, tail / total


def sample_fragment_limit(cls, residue: int = 1, rng: Optional[np.random.Generator] = None,
                          tolerance: float = 1e-3, budget: int = DEFAULT_BUDGET) -> Graph:
    """Draw from the limit law of the non-giant part: ``P(G) ∝ rho^|G|``.

    Sizes come from the truncated table of :func:`fragment_size_law`; the
    graph given its size is uniform.  ``meta["mass_deficit"]`` is the
    probability not covered by the table and ``meta["flagged"]`` marks a
    deficit above ``tolerance``.
    """
    cls = get_class(cls)
    rng = rng if rng is not None else make_rng()
    p, deficit = fragment_size_law(cls.name, residue)
    cum = np.cumsum(p)
    size = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    comps = _nijenhuis_wilf(cls, size, rng, budget) if size else []
    meta = {"method": "fragment-limit", "size": size, "mass_deficit": float(deficit),
            "flagged": bool(deficit > tolerance), "component_sizes": sorted((c.n for c in comps), reverse=True)}
    return _disjoint_union(comps, meta=meta)


def membership(cls):
    """Class membership predicate for emitted graphs."""
    return class_predicate(get_class(cls).membership)
