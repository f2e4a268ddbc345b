"""Compiled core of the Boltzmann samplers.

One recursive generator handles both rooted graphs (``mode 0``) and composed
derived blocks hanging from a given vertex (``mode 1``).  A structure drawn
once is copied when it is repeated along a cycle of an automorphism: the
vertices and edges produced by a call are contiguous, so a copy is an
offset shift that leaves the shared attachment vertex alone.

Levels are exponents of the Boltzmann parameter: a structure at level ``t``
is drawn at ``x**t``.  ``tabs`` carries, per level, the values the draw
needs (see :func:`subcrit.samplers.build_tables`).
"""

from __future__ import annotations

import numpy as np
from numba import njit

CLASS_TREES = 0
CLASS_OUTERPLANAR = 1
CLASS_TRIANGLES = 2

# counter slots; SC_BASE is the first local vertex of the block being drawn
NV, NE, ABORT, SC_EDGE, SC_VERT, CREATED, CAP, BUDGET, SC_BASE = range(9)
NCTR = 9

# per-level table columns
T_LAM1, T_LAM2, T_S1, T_S2, T_D1, T_D2, T_W0, T_W1, T_W2, T_W3, T_LAMT, T_EXPN = range(12)
NCOLS = 12


@njit(cache=True)
def seed(s):
    np.random.seed(s)


@njit(cache=True, inline='always')
def _new_vertex(ctr):
    v = ctr[NV]
    if v >= ctr[CAP]:
        ctr[ABORT] = 1
        return -1
    ctr[NV] = v + 1
    ctr[CREATED] += 1
    if ctr[CREATED] > ctr[BUDGET]:
        ctr[ABORT] = 2
    return v


@njit(cache=True, inline='always')
def _add_edge(ctr, eu, ev, a, b):
    e = ctr[NE]
    if e >= eu.shape[0]:
        ctr[ABORT] = 1
        return
    eu[e] = a
    ev[e] = b
    ctr[NE] = e + 1


@njit(cache=True, inline='always')
def _copy_range(ctr, eu, ev, v0, v1, e0, e1):
    """Append a copy of vertices ``[v0, v1)`` with edges ``[e0, e1)``; returns the offset."""
    nv = ctr[NV]
    count = v1 - v0
    if nv + count > ctr[CAP]:
        ctr[ABORT] = 1
        return 0
    off = nv - v0
    ctr[NV] = nv + count
    ctr[CREATED] += count
    if ctr[CREATED] > ctr[BUDGET]:
        ctr[ABORT] = 2
    for e in range(e0, e1):
        a = eu[e]
        b = ev[e]
        if a >= v0:
            a += off
        if b >= v0:
            b += off
        _add_edge(ctr, eu, ev, a, b)
    return off


@njit(cache=True, inline='always')
def _local_edge(ctr, lu, lv, a, b):
    k = ctr[SC_EDGE]
    if k >= lu.shape[0]:
        ctr[ABORT] = 1
        return
    lu[k] = a
    lv[k] = b
    ctr[SC_EDGE] = k + 1


@njit(cache=True, inline='always')
def _local_vertex(ctr, lpart):
    k = ctr[SC_VERT]
    # each pending local vertex becomes at least one more vertex of the draw
    if k >= lpart.shape[0] or ctr[NV] + k - ctr[SC_BASE] > ctr[CAP]:
        ctr[ABORT] = 1
        return 0
    lpart[k] = -1
    ctr[SC_VERT] = k + 1
    return k


@njit(cache=True)
def _dissection(ctr, lu, lv, lpart, pend, a, b, s, dval):
    """Boltzmann dissection on root edge ``(a, b)`` with local vertex ids.

    A side is a single edge with probability ``s / D(s)``; otherwise it is a
    face with ``k >= 2`` further sides, ``P(k) ∝ D(s)^k``.
    """
    top = 0
    pend[0] = a
    pend[1] = b
    top = 1
    while top > 0 and ctr[ABORT] == 0:
        top -= 1
        x = pend[2 * top]
        y = pend[2 * top + 1]
        _local_edge(ctr, lu, lv, x, y)
        if np.random.random() * dval < s:
            continue
        k = 1 + np.random.geometric(1.0 - dval)
        prev = x
        for i in range(k - 1):
            w = _local_vertex(ctr, lpart)
            if ctr[ABORT] != 0:
                return
            if 2 * top + 2 > pend.shape[0]:
                ctr[ABORT] = 1
                return
            pend[2 * top] = prev
            pend[2 * top + 1] = w
            top += 1
            prev = w
        if 2 * top + 2 > pend.shape[0]:
            ctr[ABORT] = 1
            return
        pend[2 * top] = prev
        pend[2 * top + 1] = y
        top += 1


@njit(cache=True)
def _half_and_mirror(ctr, lu, lv, lpart, pend, base, s, dval, pieces, fixed_end):
    """Pieces along one half of the root face, then the mirror image.

    Returns the local ids of the path ``*, u_1, ..., u_pieces`` and of its
    mirror image.  Vertex ``base`` is ``*``.  When ``fixed_end`` the last path vertex is a
    fixed point of the reflection.
    """
    e_start = ctr[SC_EDGE]
    v_start = ctr[SC_VERT]
    path = np.empty(pieces + 1, np.int64)
    path[0] = base
    for i in range(pieces):
        path[i + 1] = _local_vertex(ctr, lpart)
    for i in range(pieces):
        _dissection(ctr, lu, lv, lpart, pend, path[i], path[i + 1], s, dval)
        if ctr[ABORT] != 0:
            return path, path
    v_end = ctr[SC_VERT]
    e_end = ctr[SC_EDGE]
    fixed = path[pieces] if fixed_end else -1
    mirror = np.full(v_end - v_start, -1, np.int64)
    for l in range(v_start, v_end):
        if l == fixed:
            continue
        m = _local_vertex(ctr, lpart)
        mirror[l - v_start] = m
        lpart[l] = m
        lpart[m] = l
    for e in range(e_start, e_end):
        a = lu[e]
        b = lv[e]
        ma = a if (a == base or a == fixed) else mirror[a - v_start]
        mb = b if (b == base or b == fixed) else mirror[b - v_start]
        _local_edge(ctr, lu, lv, ma, mb)
    out = np.empty(pieces + 1, np.int64)
    for i in range(pieces + 1):
        p = path[i]
        out[i] = p if (p == base or p == fixed) else mirror[p - v_start]
    return path, out


@njit(cache=True)
def _block_structure(cls, t, tabs, ctr, lu, lv, lpart, pend):
    """Draw a derived-block symmetry at level ``t`` into the local scratch.

    Local vertex ``ctr[SC_VERT]`` at entry is ``*``.  ``lpart[l]`` is the
    partner of ``l`` under the automorphism (``-1`` for fixed atoms).
    Returns the branch index.
    """
    ctr[SC_BASE] = ctr[SC_VERT] + 1
    star = _local_vertex(ctr, lpart)
    if cls == CLASS_TREES:
        b = _local_vertex(ctr, lpart)
        _local_edge(ctr, lu, lv, star, b)
        return 0
    if cls == CLASS_TRIANGLES:
        s1 = tabs[t, T_S1]
        s2 = tabs[t, T_S2]
        u = _local_vertex(ctr, lpart)
        w = _local_vertex(ctr, lpart)
        _local_edge(ctr, lu, lv, star, u)
        _local_edge(ctr, lu, lv, star, w)
        _local_edge(ctr, lu, lv, u, w)
        if np.random.random() * (s1 * s1 + s2) < s2:
            lpart[u] = w
            lpart[w] = u
            return 1
        return 0
    # outerplanar
    w0 = tabs[t, T_W0]
    w1 = tabs[t, T_W1]
    w2 = tabs[t, T_W2]
    w3 = tabs[t, T_W3]
    r = np.random.random() * (w0 + w1 + w2 + w3)
    s1 = tabs[t, T_S1]
    s2 = tabs[t, T_S2]
    d1 = tabs[t, T_D1]
    d2 = tabs[t, T_D2]
    if r < w0:
        b = _local_vertex(ctr, lpart)
        if np.random.random() * (d1 + s1) < d1:
            _dissection(ctr, lu, lv, lpart, pend, star, b, s1, d1)
        else:
            _local_edge(ctr, lu, lv, star, b)
        return 0
    if r < w0 + w1:
        k = 1 + np.random.geometric(1.0 - d2)  # k >= 2, P(k) ∝ D^k
        path, mpath = _half_and_mirror(ctr, lu, lv, lpart, pend, star, s2, d2, k, True)
        if ctr[ABORT] != 0:
            return 1
        _local_edge(ctr, lu, lv, star, path[k])
        return 1
    if r < w0 + w1 + w2:
        k = np.random.geometric(1.0 - 2.0 * d2)  # k >= 1, P(k) ∝ (2D)^k
        path, mpath = _half_and_mirror(ctr, lu, lv, lpart, pend, star, s2, d2, k + 1, True)
        if ctr[ABORT] != 0:
            return 2
        for i in range(1, k + 1):
            if np.random.random() < 0.5:
                _local_edge(ctr, lu, lv, path[i], mpath[i])
        return 2
    k = np.random.geometric(1.0 - 2.0 * d2) - 1  # k >= 0
    path, mpath = _half_and_mirror(ctr, lu, lv, lpart, pend, star, s2, d2, k + 1, False)
    if ctr[ABORT] != 0:
        return 3
    for i in range(1, k + 1):
        if np.random.random() < 0.5:
            _local_edge(ctr, lu, lv, path[i], mpath[i])
    _local_edge(ctr, lu, lv, path[k + 1], mpath[k + 1])
    return 3


# frame layout on the explicit stack ``stk``
FS = 12
F_TYPE, F_PREV, F_LEVEL, F_ROOT, F_A, F_B, F_C, F_D, F_E, F_F, F_G, F_H = range(FS)


@njit(cache=True, inline='always')
def _poisson(lam, enl):
    """Poisson(lam) by inversion; ``enl = exp(-lam)`` comes precomputed."""
    u = np.random.random()
    k = 0
    p = enl
    acc = p
    while u > acc and k < 1000:
        k += 1
        p *= lam / k
        acc += p
    return k


@njit(cache=True, inline='always')
def _poisson_positive(lam, enl):
    """Poisson(lam) conditioned on being at least 1, by inversion."""
    u = enl + np.random.random() * (1.0 - enl)
    k = 0
    p = enl
    acc = p
    while u > acc and k < 1000:
        k += 1
        p *= lam / k
        acc += p
    return max(k, 1)


@njit(cache=True, inline='always')
def _open_rooted(level, tmax, tabs, ctr, stk, free, top, min_one=False):
    """New root vertex; pushes a frame when it gets children.

    Returns ``(root, new_top, new_free)``; ``new_top == top`` means the new
    vertex is a leaf (or the draw aborted).
    """
    root = _new_vertex(ctr)
    if root < 0 or level > tmax:
        return root, top, free
    # one Poisson count for all events; each is a j = 1 event w.p. lam1 / lamT
    if min_one:
        k = _poisson_positive(tabs[level, T_LAMT], tabs[level, T_EXPN])
    else:
        k = _poisson(tabs[level, T_LAMT], tabs[level, T_EXPN])
    if k == 0:
        return root, top, free
    if free + FS > stk.shape[0]:
        ctr[ABORT] = 1
        return -1, top, free
    f = free
    stk[f + F_TYPE] = 0
    stk[f + F_PREV] = top
    stk[f + F_LEVEL] = level
    stk[f + F_ROOT] = root
    stk[f + F_A] = k
    stk[f + F_C] = 0
    return root, f, f + FS


@njit(cache=True, inline='always')
def _open_block(cls, level, star, tabs, ctr, lu, lv, lpart, pend, stk, free, top):
    sc_e0 = ctr[SC_EDGE]
    sc_v0 = ctr[SC_VERT]
    if cls == CLASS_TREES:
        ctr[SC_BASE] = ctr[SC_VERT] + 1
        a = _local_vertex(ctr, lpart)
        b = _local_vertex(ctr, lpart)
        _local_edge(ctr, lu, lv, a, b)
    else:
        _block_structure(cls, level, tabs, ctr, lu, lv, lpart, pend)
    if ctr[ABORT] != 0:
        return top, free
    nloc = ctr[SC_VERT] - sc_v0
    if free + FS + nloc > stk.shape[0]:
        ctr[ABORT] = 1
        return top, free
    f = free
    stk[f + F_TYPE] = 1
    stk[f + F_PREV] = top
    stk[f + F_LEVEL] = level
    stk[f + F_ROOT] = star
    stk[f + F_A] = sc_v0
    stk[f + F_B] = sc_e0
    stk[f + F_C] = ctr[SC_VERT]
    stk[f + F_D] = ctr[SC_EDGE]
    stk[f + F_E] = sc_v0 + 1
    stk[f + F_F] = -1
    stk[f + FS] = star
    return f, f + FS + nloc


@njit(cache=True, inline='always')
def _gen(mode, level, star, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, min_one=False):
    """mode 0: rooted graph at ``level``; mode 1: composed block at ``level`` on ``star``.

    Rooted frames hold the Poisson event counts and the range of the child
    being drawn (for its copies); block frames hold the scratch range of the
    local structure, a cursor over its atoms and the local-to-global map.
    """
    top = -1
    free = 0
    if mode == 0:
        root, top, free = _open_rooted(level, tmax, tabs, ctr, stk, free, top, min_one)
        if top < 0:
            return root
    else:
        top, free = _open_block(cls, level, star, tabs, ctr, lu, lv, lpart, pend, stk, free, top)
        if top < 0:
            return -1
    ret = -1
    returning = False
    while True:
        if ctr[ABORT] != 0:
            return -1
        f = top
        if stk[f + F_TYPE] == 0:
            lev = stk[f + F_LEVEL]
            if returning:
                returning = False
                j = stk[f + F_D]
                v0 = stk[f + F_E]
                e0 = stk[f + F_F]
                v1 = ctr[NV]
                e1 = ctr[NE]
                for c in range(j - 1):
                    _copy_range(ctr, eu, ev, v0, v1, e0, e1)
                    if ctr[ABORT] != 0:
                        return -1
            idx = stk[f + F_C]
            if idx >= stk[f + F_A]:
                ret = stk[f + F_ROOT]
                top = stk[f + F_PREV]
                free = f
                returning = True
                if top < 0:
                    return ret
                continue
            j = 1
            u = np.random.random() * tabs[lev, T_LAMT] - tabs[lev, T_LAM1]
            if u >= 0.0:
                j = 2
                jmax = tmax // lev
                while j < jmax and cum2[lev, j] < u:
                    j += 1
            stk[f + F_C] = idx + 1
            stk[f + F_D] = j
            stk[f + F_E] = ctr[NV]
            stk[f + F_F] = ctr[NE]
            if cls == CLASS_TREES:
                # the block is one edge without symmetry: hang the child directly
                child, nt, free = _open_rooted(lev * j, tmax, tabs, ctr, stk, free, top)
                if ctr[ABORT] != 0:
                    return -1
                _add_edge(ctr, eu, ev, stk[f + F_ROOT], child)
                if nt == top:
                    returning = True
                else:
                    top = nt
                continue
            nt, free = _open_block(cls, lev * j, stk[f + F_ROOT], tabs, ctr, lu, lv, lpart, pend, stk, free, top)
            if ctr[ABORT] != 0:
                return -1
            top = nt
            continue
        # block frame
        lev = stk[f + F_LEVEL]
        sc_v0 = stk[f + F_A]
        sc_v1 = stk[f + F_C]
        g0 = f + FS - sc_v0  # stk[g0 + l] is the global vertex of local l
        if returning:
            returning = False
            l = stk[f + F_E]
            p = stk[f + F_F]
            if p >= 0:
                off = _copy_range(ctr, eu, ev, stk[f + F_G], ctr[NV], stk[f + F_H], ctr[NE])
                stk[g0 + l] = ret
                stk[g0 + p] = ret + off
            else:
                stk[g0 + l] = ret
            stk[f + F_E] = l + 1
        l = stk[f + F_E]
        p = -1
        while l < sc_v1:
            p = lpart[l]
            if p >= 0 and p < l:
                l += 1
                continue
            break
        stk[f + F_E] = l
        if l >= sc_v1:
            sc_e0 = stk[f + F_B]
            sc_e1 = stk[f + F_D]
            for e in range(sc_e0, sc_e1):
                _add_edge(ctr, eu, ev, stk[g0 + lu[e]], stk[g0 + lv[e]])
            ctr[SC_EDGE] = sc_e0
            ctr[SC_VERT] = sc_v0
            ret = stk[f + F_ROOT]
            top = stk[f + F_PREV]
            free = f
            returning = True
            if top < 0:
                return ret
            continue
        if p < 0:
            stk[f + F_F] = -1
            child_level = lev
        else:
            stk[f + F_F] = p
            stk[f + F_G] = ctr[NV]
            stk[f + F_H] = ctr[NE]
            child_level = 2 * lev
        root, nt, free = _open_rooted(child_level, tmax, tabs, ctr, stk, free, top)
        if ctr[ABORT] != 0:
            return -1
        if nt == top:
            ret = root
            returning = True
        else:
            top = nt


def make_workspace(cap: int):
    cap = int(cap)
    ctr = np.zeros(NCTR, np.int64)
    ctr[CAP] = cap
    eu = np.empty(2 * cap + 8, np.int64)
    ev = np.empty(2 * cap + 8, np.int64)
    lu = np.empty(4 * cap + 64, np.int64)
    lv = np.empty(4 * cap + 64, np.int64)
    lpart = np.empty(2 * cap + 64, np.int64)
    pend = np.empty(4 * cap + 64, np.int64)
    stk = np.empty(FS * (2 * cap + 64) + 4 * cap + 64, np.int64)
    return ctr, eu, ev, lu, lv, lpart, pend, stk


@njit(cache=True, inline='always')
def _reset(ctr):
    ctr[NV] = 0
    ctr[NE] = 0
    ctr[ABORT] = 0
    ctr[SC_EDGE] = 0
    ctr[SC_VERT] = 0


@njit(cache=True, inline='always')
def draw(mode, level, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, min_one=False):
    """One unconditioned draw; returns ``(size, aborted)``.

    In mode 1 the attachment vertex is vertex 0 and is excluded from the size.
    """
    _reset(ctr)
    if mode == 0:
        _gen(0, level, -1, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, min_one)
        return ctr[NV], ctr[ABORT]
    s = _new_vertex(ctr)
    _gen(1, level, s, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk)
    return ctr[NV] - 1, ctr[ABORT]


@njit(cache=True)
def draw_sized(mode, level, lo, hi, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, max_attempts):
    """Repeat :func:`draw` until the size lies in ``[lo, hi]``.

    The cap makes draws bigger than ``hi`` abort early.  Returns
    ``(size, attempts, status)`` with status 0 on success, 2 when the node
    budget ran out and 3 when ``max_attempts`` was reached.
    """
    extra = 1 if mode == 1 else 0
    ctr[CAP] = hi + extra
    attempts = 0
    # a rooted draw is a lone vertex with probability exp(-lamT); when that
    # size is out of the window, settle it with one uniform
    skip_leaf = mode == 0 and lo > 1 and level <= tmax
    while True:
        attempts += 1
        if skip_leaf:
            if np.random.random() < tabs[level, T_EXPN]:
                ctr[CREATED] += 1
                if ctr[CREATED] > ctr[BUDGET]:
                    return 1, attempts, 2
                if attempts >= max_attempts:
                    return 1, attempts, 3
                continue
        size, ab = draw(mode, level, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, skip_leaf)
        if ab == 2:
            return size, attempts, 2
        if ab == 0 and lo <= size <= hi:
            return size, attempts, 0
        if attempts >= max_attempts:
            return size, attempts, 3


# -- bulk graph statistics -----------------------------------------------------------


@njit(cache=True)
def csr(n, eu, ev, ne):
    deg = np.zeros(n + 1, np.int64)
    for e in range(ne):
        deg[eu[e] + 1] += 1
        deg[ev[e] + 1] += 1
    for i in range(n):
        deg[i + 1] += deg[i]
    nbr = np.empty(2 * ne, np.int64)
    fill = deg[:-1].copy()
    for e in range(ne):
        a = eu[e]
        b = ev[e]
        nbr[fill[a]] = b
        fill[a] += 1
        nbr[fill[b]] = a
        fill[b] += 1
    return deg, nbr


@njit(cache=True)
def bfs(n, ptr, nbr, src, dist, queue):
    for i in range(n):
        dist[i] = -1
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for k in range(ptr[v], ptr[v + 1]):
            u = nbr[k]
            if dist[u] < 0:
                dist[u] = dv
                queue[tail] = u
                tail += 1
    return tail


@njit(cache=True)
def _ecc(n, dist):
    e = 0
    for i in range(n):
        if dist[i] > e:
            e = dist[i]
    return e


@njit(cache=True)
def diameter_csr(n, ptr, nbr):
    """Exact diameter, the compiled twin of :func:`subcrit.graphs.diameter`."""
    if n <= 1:
        return 0
    dist = np.empty(n, np.int64)
    da = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    bfs(n, ptr, nbr, 0, dist, queue)
    a = np.argmax(dist)
    bfs(n, ptr, nbr, a, da, queue)
    b = np.argmax(da)
    lower = da[b]
    u = b
    while da[u] > lower // 2:
        for k in range(ptr[u], ptr[u + 1]):
            w = nbr[k]
            if da[w] == da[u] - 1:
                u = w
                break
    du = np.empty(n, np.int64)
    bfs(n, ptr, nbr, u, du, queue)
    level = _ecc(n, du)
    if level > lower:
        lower = level
    order = np.argsort(-du, kind="mergesort")
    idx = 0
    i = level
    while i > 0 and lower < 2 * i:
        while idx < n and du[order[idx]] == i:
            bfs(n, ptr, nbr, order[idx], dist, queue)
            e = _ecc(n, dist)
            if e > lower:
                lower = e
            idx += 1
        i -= 1
    return lower


@njit(cache=True)
def link_paths(n, ptr, nbr):
    """Path lengths of every vertex link, for the radius-one census.

    The link of ``v`` is the subgraph induced by its neighbours.  When it is
    a disjoint union of paths, the sorted path orders describe the rooted
    ball of radius one up to isomorphism; ``ok[v] = 0`` marks the other
    links.  Returns ``(sizes, off, ok)`` with the orders of ``v`` in
    ``sizes[off[v]:off[v + 1]]``, largest first.
    """
    sizes = np.zeros(ptr[n], np.int64)
    off = np.zeros(n + 1, np.int64)
    ok = np.ones(n, np.int64)
    mark = np.full(n, -1, np.int64)
    seen = np.full(n, -1, np.int64)
    ideg = np.zeros(n, np.int64)
    pos = 0
    for v in range(n):
        off[v] = pos
        for k in range(ptr[v], ptr[v + 1]):
            mark[nbr[k]] = v
        for k in range(ptr[v], ptr[v + 1]):
            u = nbr[k]
            c = 0
            for q in range(ptr[u], ptr[u + 1]):
                if mark[nbr[q]] == v:
                    c += 1
            ideg[u] = c
            if c > 2:
                ok[v] = 0
        start = pos
        if ok[v] == 1:
            for k in range(ptr[v], ptr[v + 1]):
                u = nbr[k]
                if seen[u] == v or ideg[u] == 2:
                    continue
                # walk the path starting at the end u
                length = 0
                prev = -1
                cur = u
                while cur >= 0:
                    seen[cur] = v
                    length += 1
                    nxt = -1
                    for q in range(ptr[cur], ptr[cur + 1]):
                        w = nbr[q]
                        if mark[w] == v and w != prev and seen[w] != v:
                            nxt = w
                            break
                    prev = cur
                    cur = nxt
                sizes[pos] = length
                pos += 1
            for k in range(ptr[v], ptr[v + 1]):
                if seen[nbr[k]] != v:
                    ok[v] = 0
        if ok[v] == 1:
            sizes[start:pos] = -np.sort(-sizes[start:pos])
        else:
            pos = start
    off[n] = pos
    return sizes, off, ok


@njit(cache=True)
def block_symmetry(cls, tabs, ctr, lu, lv, lpart, pend):
    """Derived-block symmetry at level 1; returns ``(branch, n_local, n_edges, aborted)``."""
    _reset(ctr)
    br = _block_structure(cls, 1, tabs, ctr, lu, lv, lpart, pend)
    return br, ctr[SC_VERT], ctr[SC_EDGE], ctr[ABORT]


# -- cycle-pointed parts ---------------------------------------------------------------


@njit(cache=True)
def _pick(cum, total):
    u = np.random.random() * total
    lo = 0
    hi = cum.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cum[mid] < u:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _append_copies(ctr, eu, ev, src_u, src_v, src_ne, src_nv, copies, centre):
    """Append ``copies`` copies of a structure whose vertex 0 is glued to ``centre``."""
    for c in range(copies):
        base = ctr[NV] - 1
        if ctr[NV] + src_nv - 1 > ctr[CAP]:
            ctr[ABORT] = 1
            return
        ctr[NV] += src_nv - 1
        ctr[CREATED] += src_nv - 1
        for e in range(src_ne):
            a = src_u[e]
            b = src_v[e]
            a = centre if a == 0 else a + base
            b = centre if b == 0 else b + base
            _add_edge(ctr, eu, ev, a, b)


@njit(cache=True)
def attempt_cv(lo, hi, cls, tabs, cum2, tmax, pcum, pi, pm, ws, wsp, max_inner):
    """One attempt at a vertex-centred symmetric cycle-pointed graph in the size window.

    The marked part is ``i`` copies of a composed block of size ``m`` with
    ``(i, m) ∝ m g_m x^{i m}``; it is glued to the root of a rooted draw.
    Returns ``(status, i, m, marked_local)``; status 0 is success,
    1 a rejection and 2 an exhausted node budget.
    """
    ctr, eu, ev, lu, lv, lpart, pend, stk = ws
    pctr, peu, pev, plu, plv, plpart, ppend, pstk = wsp
    k = _pick(pcum, pcum[-1])
    i = pi[k]
    m = pm[k]
    pctr[BUDGET] = ctr[BUDGET] - ctr[CREATED]
    pctr[CREATED] = 0
    size, att, st = draw_sized(1, i, m, m, cls, tabs, cum2, tmax, pctr, peu, pev, plu, plv, plpart, ppend, pstk, max_inner)
    ctr[CREATED] += pctr[CREATED]
    if st == 2 or ctr[CREATED] > ctr[BUDGET]:
        return 2, i, m, 0
    if st != 0:
        return 1, i, m, 0
    rest = hi - i * m
    if rest < 1:
        return 1, i, m, 0
    ctr[CAP] = rest
    a, ab = draw(0, 1, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk)
    if ab == 2:
        return 2, i, m, 0
    if ab != 0 or a + i * m < lo:
        return 1, i, m, 0
    ctr[CAP] = hi
    _append_copies(ctr, eu, ev, peu, pev, pctr[NE], pctr[NV], i, 0)
    marked = 1 + np.random.randint(m)
    return 0, i, m, marked


@njit(cache=True)
def attempt_cb_edge(lo, hi, cls, tabs, cum2, tmax, bcum, bm, ws, max_inner):
    """One attempt at a block-centred symmetric graph whose block is an edge.

    ``m ∝ m a_m x^{2m}``; a rooted draw of size exactly ``m`` at level 2 is
    mirrored and the two roots joined.
    """
    ctr, eu, ev, lu, lv, lpart, pend, stk = ws
    k = _pick(bcum, bcum[-1])
    m = bm[k]
    if 2 * m < lo or 2 * m > hi:
        return 1, m
    size, att, st = draw_sized(0, 2, m, m, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, max_inner)
    if st == 2:
        return 2, m
    if st != 0:
        return 1, m
    ctr[CAP] = 2 * m
    off = _copy_range(ctr, eu, ev, 0, m, 0, ctr[NE])
    _add_edge(ctr, eu, ev, 0, off)
    return 0, m


@njit(cache=True)
def attempt_rooted(lo, hi, cls, tabs, cum2, tmax, ws):
    ctr, eu, ev, lu, lv, lpart, pend, stk = ws
    ctr[CAP] = hi
    a, ab = draw(0, 1, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk)
    if ab == 2:
        return 2
    if ab != 0 or a < lo:
        return 1
    return 0


@njit(cache=True)
def draw_unrooted(lo, hi, weights, fixed_part, cls, tabs, cum2, tmax, pcum, pi, pm, bcum, bm, ws, wsp,
                  max_attempts, max_inner):
    """Cycle-pointed draw conditioned on the window, summand by summand.

    ``fixed_part >= 0`` keeps the summand fixed (exact-size sampling where it
    was chosen from the coefficients); otherwise every attempt first picks
    the summand from ``weights`` (the Boltzmann mixture at the parameter).
    Returns ``(status, summand, attempts, i, m, marked)``.
    """
    attempts = 0
    total = weights[0] + weights[1] + weights[2]
    while attempts < max_attempts:
        attempts += 1
        part = fixed_part
        if part < 0:
            u = np.random.random() * total
            part = 0 if u < weights[0] else (1 if u < weights[0] + weights[1] else 2)
        i = 0
        m = 0
        marked = 0
        if part == 0:
            st = attempt_rooted(lo, hi, cls, tabs, cum2, tmax, ws)
        elif part == 1:
            st, i, m, marked = attempt_cv(lo, hi, cls, tabs, cum2, tmax, pcum, pi, pm, ws, wsp, max_inner)
        else:
            st, m = attempt_cb_edge(lo, hi, cls, tabs, cum2, tmax, bcum, bm, ws, max_inner)
        if st == 2:
            return 2, part, attempts, i, m, marked
        if st == 0:
            return 0, part, attempts, i, m, marked
    return 3, -1, attempts, 0, 0, 0


@njit(cache=True)
def edge_key(ne, eu, ev):
    """Bitmask of the labelled edge set (graphs with at most 11 vertices)."""
    key = 0
    for e in range(ne):
        a = eu[e]
        b = ev[e]
        if a > b:
            a, b = b, a
        key |= 1 << (b * (b - 1) // 2 + a)
    return key


@njit(cache=True)
def rooted_keys(count, lo, hi, cls, tabs, cum2, tmax, ws, max_attempts):
    """``count`` size-conditioned rooted draws reduced to labelled edge keys."""
    ctr, eu, ev, lu, lv, lpart, pend, stk = ws
    keys = np.empty(count, np.int64)
    sizes = np.empty(count, np.int64)
    total_attempts = 0
    for c in range(count):
        size, att, st = draw_sized(0, 1, lo, hi, cls, tabs, cum2, tmax, ctr, eu, ev, lu, lv, lpart, pend, stk, max_attempts)
        total_attempts += att
        if st != 0:
            return keys[:c], sizes[:c], total_attempts, st
        keys[c] = edge_key(ctr[NE], eu, ev)
        sizes[c] = size
    return keys, sizes, total_attempts, 0


@njit(cache=True)
def unrooted_keys(count, lo, hi, weights, fixed_weights, cls, tabs, cum2, tmax, pcum, pi, pm, bcum, bm, ws, wsp,
                  max_attempts, max_inner):
    """``count`` decomposition draws as labelled edge keys plus their summands.

    With ``fixed_weights`` the summand of each sample is drawn once from it
    (exact size) and kept for the rejection loop.
    """
    ctr = ws[0]
    keys = np.empty(count, np.int64)
    parts = np.empty(count, np.int64)
    total_attempts = 0
    ftot = fixed_weights[0] + fixed_weights[1] + fixed_weights[2]
    for c in range(count):
        fixed = -1
        if ftot > 0:
            u = np.random.random() * ftot
            fixed = 0 if u < fixed_weights[0] else (1 if u < fixed_weights[0] + fixed_weights[1] else 2)
        st, part, att, i, m, marked = draw_unrooted(lo, hi, weights, fixed, cls, tabs, cum2, tmax, pcum, pi, pm,
                                                    bcum, bm, ws, wsp, max_attempts, max_inner)
        total_attempts += att
        if st != 0:
            return keys[:c], parts[:c], total_attempts, st
        keys[c] = edge_key(ctr[NE], ws[1], ws[2])
        parts[c] = part
    return keys, parts, total_attempts, 0
