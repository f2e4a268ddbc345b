"""Graph type and the algorithms used by samplers, oracles and experiments.

Everything here is written for tree-like graphs (every block an edge or a
2-connected outerplanar graph) first, with a general backtracking path for
small arbitrary graphs.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import DomainError, UnsupportedFeature

GENERAL_CANON_LIMIT = 64
ENUMERATION_LIMIT = 7
HEREDITARY_ENUMERATION_LIMIT = 10


class Graph:
    """Simple undirected graph on ``0..n-1`` with an optional root and marked cycle."""

    __slots__ = ("n", "adj", "root", "marked_cycle", "meta")

    def __init__(self, n: int, adj: Sequence[Sequence[int]], root: Optional[int] = None,
                 marked_cycle: Optional[Sequence[int]] = None, meta: Optional[dict] = None,
                 validate: bool = True):
        self.n = n
        self.adj = [sorted(set(a)) for a in adj] if validate else [list(a) for a in adj]
        self.root = root
        self.marked_cycle = list(marked_cycle) if marked_cycle is not None else None
        self.meta = dict(meta or {})
        if validate:
            self._validate()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], root=None, marked_cycle=None, meta=None):
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, adj, root, marked_cycle, meta)

    @classmethod
    def path(cls, n):
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n):
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n):
        return cls.from_edges(n, itertools.combinations(range(n), 2))

    @classmethod
    def star(cls, leaves):
        return cls.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @classmethod
    def complete_bipartite(cls, p, q):
        return cls.from_edges(p + q, [(i, p + j) for i in range(p) for j in range(q)])

    def _validate(self):
        for v, nb in enumerate(self.adj):
            for u in nb:
                if u == v:
                    raise DomainError(f"loop at vertex {v}")
                if not 0 <= u < self.n:
                    raise DomainError(f"neighbour {u} out of range")
        for v, nb in enumerate(self.adj):
            for u in nb:
                if v not in self._index(u):
                    raise DomainError("adjacency is not symmetric")
        if self.root is not None and not 0 <= self.root < self.n:
            raise DomainError("root out of range")
        if self.marked_cycle is not None and len(set(self.marked_cycle)) != len(self.marked_cycle):
            raise DomainError("marked cycle repeats a vertex")

    def _index(self, u):
        return set(self.adj[u])

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def has_edge(self, u, v) -> bool:
        a = self.adj[u]
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == v

    def degree(self, v) -> int:
        return len(self.adj[v])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image under ``v -> perm[v]``."""
        adj = [None] * self.n
        for v in range(self.n):
            adj[perm[v]] = [perm[u] for u in self.adj[v]]
        root = perm[self.root] if self.root is not None else None
        cyc = [perm[v] for v in self.marked_cycle] if self.marked_cycle is not None else None
        return Graph(self.n, adj, root, cyc, self.meta)

    def induced(self, vertices: Sequence[int], root=None) -> "Graph":
        index = {v: i for i, v in enumerate(vertices)}
        adj = [[index[u] for u in self.adj[v] if u in index] for v in vertices]
        r = index[root] if root is not None else None
        return Graph(len(vertices), adj, r, validate=False)

    def unrooted(self) -> "Graph":
        return Graph(self.n, self.adj, None, None, self.meta, validate=False)

    def to_dict(self) -> dict:
        d = {"n": self.n, "edges": [list(e) for e in self.edges()]}
        if self.root is not None:
            d["root"] = self.root
        if self.marked_cycle is not None:
            d["marked_cycle"] = list(self.marked_cycle)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Graph":
        return cls.from_edges(d["n"], [tuple(e) for e in d["edges"]], d.get("root"), d.get("marked_cycle"))

    def to_graph6(self) -> str:
        n = self.n
        if n > 62:
            raise UnsupportedFeature("graph6 export is limited to n <= 62")
        bits = [1 if self.has_edge(i, j) else 0 for j in range(n) for i in range(j)]
        bits += [0] * (-len(bits) % 6)
        out = [chr(63 + n)]
        for k in range(0, len(bits), 6):
            out.append(chr(63 + int("".join(map(str, bits[k:k + 6])) or "0", 2)))
        return "".join(out)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, root={self.root})"

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n and self.adj == other.adj
                and self.root == other.root and self.marked_cycle == other.marked_cycle)

    __hash__ = None


# -- traversal -------------------------------------------------------------------


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    q = deque([source])
    adj = g.adj
    while q:
        v = q.popleft()
        dv = dist[v] + 1
        for u in adj[v]:
            if dist[u] < 0:
                dist[u] = dv
                q.append(u)
    return dist


def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, q = [s], deque([s])
        while q:
            v = q.popleft()
            for u in g.adj[v]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
                    q.append(u)
        out.append(sorted(comp))
    return out


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(components(g)) == 1


def _require_connected(g: Graph):
    if g.n == 0 or not is_connected(g):
        raise DomainError("graph must be connected and non-empty")


def distance(g: Graph, u: int, v: int) -> int:
    d = bfs_distances(g, u)[v]
    if d < 0:
        raise DomainError("vertices lie in different components")
    return d


def diameter(g: Graph) -> int:
    """Exact diameter by a double sweep followed by fringe eccentricities.

    The second sweep gives a lower bound and a longest path found so far; its
    middle vertex ``u`` is the centre.  Levels of ``u`` are processed from
    the outside in; two vertices at levels at most ``i`` are within ``2 i``
    of each other, so once the lower bound reaches ``2 i`` the remaining
    levels cannot improve it.
    """
    _require_connected(g)
    if g.n == 1:
        return 0
    d0 = bfs_distances(g, 0)
    a = max(range(g.n), key=d0.__getitem__)
    da = bfs_distances(g, a)
    b = max(range(g.n), key=da.__getitem__)
    lower = da[b]
    # walk back from b to the middle of the a-b path
    u = b
    while da[u] > lower // 2:
        u = next(w for w in g.adj[u] if da[w] == da[u] - 1)
    du = bfs_distances(g, u)
    level = max(du)
    lower = max(lower, level)
    by_level: list[list[int]] = [[] for _ in range(level + 1)]
    for v, d in enumerate(du):
        by_level[d].append(v)
    i = level
    while i > 0 and lower < 2 * i:
        lower = max([lower] + [max(bfs_distances(g, v)) for v in by_level[i]])
        i -= 1
    return lower


def diameter_naive(g: Graph) -> int:
    _require_connected(g)
    return max(max(bfs_distances(g, v)) for v in range(g.n))


def largest_component_split(g: Graph) -> tuple[Graph, Graph]:
    """(largest component, remainder); ties go to the smaller canonical code."""
    comps = components(g)
    if not comps:
        return Graph(0, []), Graph(0, [])
    best = max(len(c) for c in comps)
    cands = [c for c in comps if len(c) == best]
    if len(cands) > 1:
        cands.sort(key=lambda c: canonical_code(g.induced(c)))
    big = cands[0]
    chosen = set(big)
    rest = [v for v in range(g.n) if v not in chosen]
    return g.induced(big), g.induced(rest)


# -- blocks ----------------------------------------------------------------------


@dataclass
class BlockTree:
    blocks: list
    cutvertices: list
    tree_edges: list
    vertex_blocks: list = field(default_factory=list, repr=False)
    block_edges: list = field(default_factory=list, repr=False)


def blocks_and_cutvertices(g: Graph) -> BlockTree:
    """Iterative lowpoint decomposition into blocks."""
    _require_connected(g)
    n = g.n
    if n == 1:
        return BlockTree([[0]], [], [], [[0]], [[]])
    disc = [-1] * n
    low = [0] * n
    t = 0
    blocks, block_edges = [], []
    estack = []
    disc[0] = 0
    low[0] = 0
    t = 1
    it = [0] * n
    parent = [-1] * n
    stack = [0]
    while stack:
        v = stack[-1]
        nb = g.adj[v]
        if it[v] < len(nb):
            u = nb[it[v]]
            it[v] += 1
            if disc[u] < 0:
                parent[u] = v
                disc[u] = low[u] = t
                t += 1
                estack.append((v, u))
                stack.append(u)
            elif u != parent[v] and disc[u] < disc[v]:
                estack.append((v, u))
                if disc[u] < low[v]:
                    low[v] = disc[u]
        else:
            stack.pop()
            if stack:
                p = stack[-1]
                if low[v] < low[p]:
                    low[p] = low[v]
                if low[v] >= disc[p]:
                    edges = []
                    while True:
                        e = estack.pop()
                        edges.append(e)
                        if e == (p, v):
                            break
                    verts = sorted({x for e in edges for x in e})
                    blocks.append(verts)
                    block_edges.append(edges)
    vertex_blocks = [[] for _ in range(n)]
    for i, b in enumerate(blocks):
        for v in b:
            vertex_blocks[v].append(i)
    cut = [v for v in range(n) if len(vertex_blocks[v]) >= 2]
    tree_edges = [(v, i) for v in cut for i in vertex_blocks[v]]
    return BlockTree(blocks, cut, tree_edges, vertex_blocks, block_edges)


# -- outerplanar blocks -----------------------------------------------------------


def hamilton_cycle_outerplanar(vertices: Sequence[int], adj_sets: dict) -> Optional[list]:
    """Hamilton cycle of a 2-connected outerplanar block, or ``None`` if it is not one.

    Degree-2 reduction: a degree-2 vertex lies on the outer cycle between its two
    neighbours; it is contracted into a path, and an existing edge parallel to
    such a path is a chord.  ``adj_sets`` maps each block vertex to its
    neighbours inside the block.
    """
    k = len(vertices)
    if k == 2:
        return list(vertices)
    ext = {v: {u: () for u in adj_sets[v]} for v in vertices}
    queue = [v for v in vertices if len(ext[v]) == 2]
    alive = k
    removed = set()
    while alive > 3:
        v = None
        while queue:
            c = queue.pop()
            if c not in removed and len(ext[c]) == 2:
                v = c
                break
        if v is None:
            return None
        (u, pu), (w, pw) = ext[v].items()
        # pu runs v -> u, so the path u -> v is its reverse
        path = tuple(reversed(pu)) + (v,) + pw
        del ext[u][v]
        del ext[w][v]
        removed.add(v)
        del ext[v]
        alive -= 1
        if w in ext[u]:
            if ext[u][w]:
                return None
            # the existing edge is a chord
        ext[u][w] = path
        ext[w][u] = tuple(reversed(path))
        for x in (u, w):
            if len(ext[x]) == 2:
                queue.append(x)
    rest = [v for v in vertices if v not in removed]
    if any(len(ext[v]) != 2 for v in rest):
        return None
    x = rest[0]
    y, z = ext[x]
    if z not in ext[y]:
        return None
    cycle = [x, *ext[x][y], y, *ext[y][z], z, *ext[z][x]]
    if len(cycle) != k or len(set(cycle)) != k:
        return None
    pos = {v: i for i, v in enumerate(cycle)}
    for i, v in enumerate(cycle):
        if cycle[(i + 1) % k] not in adj_sets[v]:
            return None
    chords = _chords(cycle, pos, adj_sets)
    if not _non_crossing(chords):
        return None
    return cycle


def _chords(cycle, pos, adj_sets):
    k = len(cycle)
    out = []
    for v in cycle:
        i = pos[v]
        for u in adj_sets[v]:
            j = pos[u]
            if i < j and j - i not in (1, k - 1):
                out.append((i, j))
    return out


def _non_crossing(chords) -> bool:
    chords = sorted(chords)
    for (a, b), (c, d) in itertools.combinations(chords, 2):
        if a < c < b < d or c < a < d < b:
            return False
    return True


def _block_adjacency(g: Graph, verts):
    s = set(verts)
    return {v: {u for u in g.adj[v] if u in s} for v in verts}


def outerplanarity_check(g: Graph) -> bool:
    """True iff every block is an edge, a vertex, or 2-connected outerplanar."""
    for comp in components(g):
        h = g.induced(comp)
        if h.n <= 2:
            continue
        bt = blocks_and_cutvertices(h)
        for verts in bt.blocks:
            if len(verts) <= 2:
                continue
            if hamilton_cycle_outerplanar(verts, _block_adjacency(h, verts)) is None:
                return False
    return True


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.m == g.n - 1 and is_connected(g)


def is_triangle_cactus(g: Graph) -> bool:
    if not is_connected(g) or g.n == 0:
        return False
    if g.n == 1:
        return True
    bt = blocks_and_cutvertices(g)
    return all(len(b) == 3 and len(e) == 3 for b, e in zip(bt.blocks, bt.block_edges))


# -- tree-like canonical labelling ------------------------------------------------


class _BlockCutTree:
    """Block-cut incidence tree with Hamilton orders of the outerplanar blocks."""

    def __init__(self, g: Graph):
        self.g = g
        self.bt = blocks_and_cutvertices(g)
        self.cycles = []
        for verts in self.bt.blocks:
            if len(verts) <= 2:
                self.cycles.append(list(verts))
                continue
            cyc = hamilton_cycle_outerplanar(verts, _block_adjacency(g, verts))
            if cyc is None:
                raise UnsupportedFeature("block is not outerplanar; tree-like canonization does not apply")
            self.cycles.append(cyc)
        self.chordsets = []
        for verts, cyc in zip(self.bt.blocks, self.cycles):
            if len(cyc) < 3:
                self.chordsets.append(set())
                continue
            cs = set()
            vs = set(verts)
            for a in cyc:
                for b in g.adj[a]:
                    if b in vs and a < b:
                        cs.add((a, b))
            self.chordsets.append(cs)
        nv = g.n
        self.size = nv + len(self.bt.blocks)
        self.nbrs = [[] for _ in range(self.size)]
        for v in range(nv):
            for b in self.bt.vertex_blocks[v]:
                self.nbrs[v].append(nv + b)
                self.nbrs[nv + b].append(v)

    def is_block(self, x):
        return x >= self.g.n

    def rooted_order(self, root):
        parent = [-1] * self.size
        depth = [0] * self.size
        order = [root]
        parent[root] = root
        for x in order:
            for y in self.nbrs[x]:
                if parent[y] < 0:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    order.append(y)
        parent[root] = -1
        return order, parent, depth

    def center(self):
        if self.g.n == 1:
            return 0
        order, _, depth = self.rooted_order(0)
        far = max(order, key=depth.__getitem__)
        order, parent, depth = self.rooted_order(far)
        other = max(order, key=depth.__getitem__)
        path = [other]
        while parent[path[-1]] >= 0:
            path.append(parent[path[-1]])
        return path[len(path) // 2]

    def oriented(self, bidx, start, direction):
        cyc = self.cycles[bidx]
        k = len(cyc)
        i = cyc.index(start)
        seq = [cyc[(i + direction * j) % k] for j in range(k)]
        pos = {v: j for j, v in enumerate(seq)}
        chords = tuple(sorted(tuple(sorted((pos[a], pos[b]))) for a, b in self.chordsets[bidx]
                              if (abs(pos[a] - pos[b]) not in (1, k - 1))))
        return seq, chords


def _label_tree(bct: _BlockCutTree, root: int) -> tuple:
    """Bottom-up canonical labels of the block-cut tree rooted at a vertex or block node.

    Returns the layered table (one sorted list of distinct signatures per depth),
    the labels, orientation data and the order, so callers can both serialize and
    recover symmetry classes.
    """
    order, parent, depth = bct.rooted_order(root)
    nv = bct.g.n
    children = [[] for _ in range(bct.size)]
    for x in order[1:]:
        children[parent[x]].append(x)
    maxd = max(depth[x] for x in order)
    by_depth = [[] for _ in range(maxd + 1)]
    for x in order:
        by_depth[depth[x]].append(x)
    label = [0] * bct.size
    info = {}
    table = []
    for d in range(maxd, -1, -1):
        sigs = {}
        for x in by_depth[d]:
            if not bct.is_block(x):
                sig = ("v", tuple(sorted(label[c] for c in children[x])))
            else:
                b = x - nv
                if parent[x] < 0:
                    sig, sym = _unrooted_block_signature(bct, b, label)
                else:
                    sig, sym = _rooted_block_signature(bct, b, parent[x], label)
                info[x] = sym
            sigs[x] = sig
        distinct = sorted(set(sigs.values()))
        rank = {s: i for i, s in enumerate(distinct)}
        for x, s in sigs.items():
            label[x] = rank[s]
        table.append(distinct)
    table.reverse()
    return table, label, info, order, parent, children


def _rooted_block_signature(bct, b, entry, label):
    cyc = bct.cycles[b]
    if len(cyc) == 2:
        other = cyc[0] if cyc[1] == entry else cyc[1]
        return ("e", label[other]), {"seqs": [[entry, other]]}
    best, seqs = None, []
    for direction in (1, -1):
        seq, chords = bct.oriented(b, entry, direction)
        sig = ("b", len(seq), chords, tuple(label[v] for v in seq[1:]))
        if best is None or sig < best:
            best, seqs = sig, [seq]
        elif sig == best:
            seqs.append(seq)
    return best, {"seqs": seqs}


def _unrooted_block_signature(bct, b, label):
    cyc = bct.cycles[b]
    best, seqs = None, []
    starts = cyc
    dirs = (1,) if len(cyc) == 2 else (1, -1)
    for s in starts:
        for direction in dirs:
            if len(cyc) == 2:
                seq = [s, cyc[1] if s == cyc[0] else cyc[0]]
                sig = ("E", tuple(label[v] for v in seq))
            else:
                seq, chords = bct.oriented(b, s, direction)
                sig = ("B", len(seq), chords, tuple(label[v] for v in seq))
            if best is None or sig < best:
                best, seqs = sig, [seq]
            elif sig == best:
                seqs.append(seq)
    return best, {"seqs": seqs}


def _serialize(kind: str, n: int, payload) -> bytes:
    body = repr(payload).replace(" ", "").encode()
    return kind.encode() + n.to_bytes(4, "big") + len(body).to_bytes(8, "big") + body


def treelike_code(g: Graph, root: Optional[int] = None) -> bytes:
    """Canonical code of a connected tree-like graph via its block-cut tree.

    Unrooted codes root the block-cut tree at its centre (unique because all
    leaves are vertices); per-block minima over the dihedral images of the
    Hamilton cycle make the labels canonical.
    """
    _require_connected(g)
    bct = _BlockCutTree(g)
    if root is None:
        centre = bct.center()
        table, label, _, _, _, _ = _label_tree(bct, centre)
        kind = "B" if bct.is_block(centre) else "V"
        return _serialize("T" + kind, g.n, table)
    table, _, _, _, _, _ = _label_tree(bct, root)
    return _serialize("TR", g.n, table)


def treelike_orbits(g: Graph) -> list[int]:
    """Vertex orbit ids under the automorphism group of a tree-like graph."""
    _require_connected(g)
    bct = _BlockCutTree(g)
    centre = bct.center()
    _, label, info, order, parent, children = _label_tree(bct, centre)
    orbit = {}
    orbit[centre] = ("root", label[centre])
    if bct.is_block(centre):
        seqs = info[centre]["seqs"]
        for v in bct.cycles[centre - g.n]:
            cls = min(seq.index(v) for seq in seqs)
            orbit[v] = (orbit[centre], cls)
    for x in order:
        if x == centre:
            continue
        if bct.is_block(x):
            orbit[x] = (orbit[parent[x]], label[x])
            seqs = info[x]["seqs"]
            for v in bct.cycles[x - g.n]:
                if v == parent[x]:
                    continue
                cls = min(seq.index(v) for seq in seqs)
                orbit[v] = (orbit[x], cls)
    ids = {}
    out = []
    for v in range(g.n):
        key = orbit[v]
        if key not in ids:
            ids[key] = len(ids)
        out.append(ids[key])
    return out


def _is_treelike(g: Graph) -> bool:
    try:
        _BlockCutTree(g)
        return True
    except UnsupportedFeature:
        return False


# -- general canonical labelling -------------------------------------------------


def _refine(g: Graph, cells: list[list[int]]) -> list[list[int]]:
    """Equitable refinement by neighbour counts into each cell."""
    cells = [list(c) for c in cells]
    changed = True
    while changed:
        changed = False
        cell_of = {}
        for i, c in enumerate(cells):
            for v in c:
                cell_of[v] = i
        new_cells = []
        for c in cells:
            if len(c) == 1:
                new_cells.append(c)
                continue
            keyed = {}
            for v in c:
                cnt = [0] * len(cells)
                for u in g.adj[v]:
                    cnt[cell_of[u]] += 1
                keyed.setdefault(tuple(cnt), []).append(v)
            if len(keyed) > 1:
                changed = True
                for k in sorted(keyed):
                    new_cells.append(sorted(keyed[k]))
            else:
                new_cells.append(c)
        cells = new_cells
    return cells


def _perm_code(g: Graph, order: list[int]) -> bytes:
    pos = {v: i for i, v in enumerate(order)}
    n = g.n
    bits = 0
    for v in range(n):
        pv = pos[v]
        for u in g.adj[v]:
            pu = pos[u]
            if pv < pu:
                bits |= 1 << (pu * (pu - 1) // 2 + pv)
    return bits.to_bytes((n * (n - 1) // 2 + 7) // 8 or 1, "big")


def _general_search(g: Graph, root: Optional[int], leaf_budget: int = 200000):
    """Individualization-refinement search; returns (best code, best order, automorphisms found)."""
    n = g.n
    if n > GENERAL_CANON_LIMIT:
        raise UnsupportedFeature(f"general canonical labelling is limited to n <= {GENERAL_CANON_LIMIT}")
    init = [list(range(n))] if root is None else [[root], [v for v in range(n) if v != root]]
    init = [c for c in init if c]
    init = [sorted(c, key=lambda v: len(g.adj[v])) for c in init]
    # split by degree first for speed, keeping a canonical order of cells
    cells = []
    for c in init:
        byd = {}
        for v in c:
            byd.setdefault(len(g.adj[v]), []).append(v)
        cells.extend(byd[d] for d in sorted(byd))
    best = {"code": None, "order": None, "leaves": 0}
    autos = []

    def leaf(order):
        best["leaves"] += 1
        if best["leaves"] > leaf_budget:
            raise UnsupportedFeature("canonical labelling search exceeded its leaf budget")
        code = _perm_code(g, order)
        if best["code"] is None or code < best["code"]:
            best["code"], best["order"] = code, order
        elif code == best["code"]:
            perm = [0] * n
            for a, b in zip(best["order"], order):
                perm[a] = b
            autos.append(perm)

    def search(cells, fixed):
        cells = _refine(g, cells)
        if all(len(c) == 1 for c in cells):
            leaf([c[0] for c in cells])
            return
        idx = next(i for i, c in enumerate(cells) if len(c) > 1)
        target = cells[idx]
        tried = []
        for v in target:
            if tried and _same_orbit(v, tried, fixed, autos):
                continue
            tried.append(v)
            new = cells[:idx] + [[v], [u for u in target if u != v]] + cells[idx + 1:]
            search(new, fixed + [v])

    search(cells, [])
    return best["code"], best["order"], autos


def _same_orbit(v, tried, fixed, autos) -> bool:
    gens = [p for p in autos if all(p[f] == f for f in fixed)]
    if not gens:
        return False
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for p in gens:
            y = p[x]
            if y not in seen:
                if y in tried:
                    return True
                seen.add(y)
                stack.append(y)
    return False


def general_code(g: Graph, root: Optional[int] = None) -> bytes:
    code, _, _ = _general_search(g, root)
    return ("GR" if root is not None else "GU").encode() + g.n.to_bytes(4, "big") + code


def canonical_code(g: Graph, root: Optional[int] = None) -> bytes:
    """Isomorphism-complete code; equal codes iff isomorphic (respecting ``root``)."""
    if g.n == 0:
        return b"empty"
    if not is_connected(g):
        parts = sorted(canonical_code(g.induced(c)) + (b"*" if root in c else b"") for c in components(g))
        if root is not None:
            parts = [canonical_code(g.induced(c), c.index(root)) if root in c else canonical_code(g.induced(c))
                     for c in components(g)]
            parts.sort()
        return b"D" + len(parts).to_bytes(4, "big") + b"|".join(parts)
    try:
        return treelike_code(g, root)
    except UnsupportedFeature:
        return general_code(g, root)


def neighborhood_code(g: Graph, v: int, k: int) -> bytes:
    """Code of the subgraph induced by vertices within distance ``k`` of ``v``, rooted at ``v``."""
    if k < 0:
        raise DomainError("radius must be nonnegative")
    dist = {v: 0}
    q = deque([v])
    while q:
        x = q.popleft()
        if dist[x] == k:
            continue
        for u in g.adj[x]:
            if u not in dist:
                dist[u] = dist[x] + 1
                q.append(u)
    verts = sorted(dist)
    h = g.induced(verts, root=v)
    return canonical_code(h, h.root)


# -- automorphisms ---------------------------------------------------------------


def automorphisms(g: Graph, limit: int = 10**6) -> list[list[int]]:
    """All automorphisms by backtracking (small graphs only)."""
    n = g.n
    adjs = [set(a) for a in g.adj]
    deg = [len(a) for a in g.adj]
    out = []
    perm = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            out.append(perm.copy())
            if len(out) > limit:
                raise UnsupportedFeature("automorphism group too large for enumeration")
            return
        for c in range(n):
            if used[c] or deg[c] != deg[i]:
                continue
            ok = True
            for j in range(i):
                if (j in adjs[i]) != (perm[j] in adjs[c]):
                    ok = False
                    break
            if ok:
                perm[i] = c
                used[c] = True
                extend(i + 1)
                used[c] = False
        perm[i] = -1

    extend(0)
    return out


def _orbits_from_autos(n, autos):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in autos:
        for v in range(n):
            a, b = find(v), find(p[v])
            if a != b:
                parent[a] = b
    return len({find(v) for v in range(n)})


def aut_orbit_count_bruteforce(g: Graph) -> int:
    return _orbits_from_autos(g.n, automorphisms(g))


def aut_orbit_count(g: Graph) -> int:
    """Number of vertex orbits ``r(C)`` of the automorphism group."""
    _require_connected(g)
    try:
        return len(set(treelike_orbits(g)))
    except UnsupportedFeature:
        if g.n > GENERAL_CANON_LIMIT:
            raise
        codes = {general_code(g, v) for v in range(g.n)}
        return len(codes)


# -- exhaustive enumeration ------------------------------------------------------


def _check_enum_size(n, limit=ENUMERATION_LIMIT):
    if n > limit:
        raise UnsupportedFeature(f"exhaustive enumeration is limited to n <= {limit}")


def enumerate_unlabelled(n: int, predicate: Optional[Callable[[Graph], bool]] = None,
                         connected: bool = True, hereditary: bool = False) -> list[Graph]:
    """One graph per isomorphism class on ``n`` vertices satisfying ``predicate``.

    Connected graphs are grown by adding one vertex to the classes on
    ``n - 1`` vertices: every connected graph has a vertex whose deletion
    leaves it connected (a leaf of a spanning tree), so nothing is missed.
    With ``hereditary=True`` the predicate is applied at every level, which is
    valid for classes closed under deleting such a vertex.
    """
    _check_enum_size(n, HEREDITARY_ENUMERATION_LIMIT if hereditary and predicate is not None else ENUMERATION_LIMIT)
    if n == 0:
        return [Graph(0, [])] if not connected else []
    if not connected:
        return _enumerate_all(n, predicate)
    level = {canonical_code(Graph(1, [[]])): Graph(1, [[]])}
    if predicate is not None and hereditary and not predicate(Graph(1, [[]])):
        return []
    for size in range(2, n + 1):
        nxt = {}
        for h in level.values():
            for mask in range(1, 1 << (size - 1)):
                nb = [i for i in range(size - 1) if mask >> i & 1]
                adj = [list(a) for a in h.adj] + [nb]
                for i in nb:
                    adj[i].append(size - 1)
                cand = Graph(size, adj, validate=False)
                if hereditary and predicate is not None and not predicate(cand):
                    continue
                code = canonical_code(cand)
                if code not in nxt:
                    nxt[code] = Graph(size, adj)
        level = nxt
    out = [level[c] for c in sorted(level)]
    if predicate is not None and not hereditary:
        out = [g for g in out if predicate(g)]
    return out


def _enumerate_all(n, predicate):
    seen = {}
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        g = Graph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if predicate is not None and not predicate(g):
            continue
        seen.setdefault(canonical_code(g), g)
    return [seen[c] for c in sorted(seen)]


def enumerate_by_matrices(n: int, predicate=None) -> list[Graph]:
    """Connected classes from all ``2^{n(n-1)/2}`` adjacency matrices (independent oracle)."""
    _check_enum_size(n)
    return _enumerate_all(n, lambda g: is_connected(g) and (predicate is None or predicate(g)))


CLASS_PREDICATES = {
    "trees": is_tree,
    "outerplanar": lambda g: is_connected(g) and outerplanarity_check(g),
    "triangle-cacti": is_triangle_cactus,
}


def class_predicate(name: str):
    try:
        return CLASS_PREDICATES[name]
    except KeyError as exc:
        raise UnsupportedFeature(f"no membership predicate for class {name!r}") from exc


def enumerate_class(n: int, cls_name: str) -> list[Graph]:
    return enumerate_unlabelled(n, class_predicate(cls_name), hereditary=cls_name in ("trees", "outerplanar"))


def count_rooted(graphs: Iterable[Graph]) -> int:
    return sum(aut_orbit_count(g) for g in graphs)


def _cycles_of(p):
    n = len(p)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        c = [s]
        seen[s] = True
        x = p[s]
        while x != s:
            c.append(x)
            seen[x] = True
            x = p[x]
        out.append(c)
    return out


def _normal_cycle(c):
    i = c.index(min(c))
    return tuple(c[i:] + c[:i])


def _cycle_centre(bct: _BlockCutTree, cyc) -> str:
    """'vertex' or 'block': the midpoint of the block-cut-tree path from ``v`` to its image."""
    if len(cyc) == 1:
        return "fixed"
    a, b = cyc[0], cyc[1]
    order, parent, depth = bct.rooted_order(a)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    mid = path[len(path) // 2]
    return "block" if bct.is_block(mid) else "vertex"


def cycle_pointings(g: Graph) -> dict:
    """Counts of cycle-pointed structures on ``g`` split by kind of centre."""
    autos = automorphisms(g)
    cycles = {}
    for p in autos:
        for c in _cycles_of(p):
            cycles[_normal_cycle(c)] = None
    remaining = set(cycles)
    counts = {"fixed": 0, "vertex": 0, "block": 0}
    bct = _BlockCutTree(g) if g.n > 1 else None
    while remaining:
        c = remaining.pop()
        for p in autos:
            img = _normal_cycle([p[x] for x in c])
            remaining.discard(img)
        kind = "fixed" if len(c) == 1 else _cycle_centre(bct, list(c))
        counts[kind] += 1
    return counts


def enumerate_cycle_pointed(n: int, cls_name: str) -> dict:
    """Per-summand counts of cycle-pointed class members of size ``n``."""
    _check_enum_size(n)
    graphs = enumerate_class(n, cls_name)
    totals = {"fixed": 0, "vertex": 0, "block": 0, "graphs": len(graphs)}
    for g in graphs:
        for k, v in cycle_pointings(g).items():
            totals[k] += v
    totals["total"] = totals["fixed"] + totals["vertex"] + totals["block"]
    return totals
