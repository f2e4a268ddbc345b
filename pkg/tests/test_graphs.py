import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subcrit import kernel
from subcrit.errors import DomainError, UnsupportedFeature
from subcrit.graphs import (
    Graph,
    aut_orbit_count,
    aut_orbit_count_bruteforce,
    automorphisms,
    blocks_and_cutvertices,
    canonical_code,
    components,
    count_rooted,
    diameter,
    diameter_naive,
    enumerate_by_matrices,
    enumerate_class,
    enumerate_unlabelled,
    is_tree,
    largest_component_split,
    neighborhood_code,
    outerplanarity_check,
    treelike_code,
)
from subcrit.lab.experiments import census_of_graph


def random_tree(n, rng):
    return Graph.from_edges(n, [(i, rng.randrange(i)) for i in range(1, n)])


def random_connected(n, extra, rng):
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for _ in range(extra if n > 1 else 0):
        u, v = rng.sample(range(n), 2)
        edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def random_outerplanar(n, rng):
    """Cycles with chords from one vertex, glued along a random tree of cut edges."""
    g_edges = []
    offset = 0
    pieces = []
    while offset < n:
        k = min(n - offset, rng.randint(1, 6))
        verts = list(range(offset, offset + k))
        if k >= 3:
            g_edges += [(verts[i], verts[(i + 1) % k]) for i in range(k)]
            # chords from the first vertex never cross
            for j in range(2, k - 1):
                if rng.random() < 0.5:
                    g_edges.append((verts[0], verts[j]))
        elif k == 2:
            g_edges.append((verts[0], verts[1]))
        if pieces:
            g_edges.append((rng.choice([v for p in pieces for v in p]), verts[0]))
        pieces.append(verts)
        offset += k
    return Graph.from_edges(n, g_edges)


def shuffled(g, rng):
    perm = list(range(g.n))
    rng.shuffle(perm)
    return g.relabel(perm), perm


# -- construction -----------------------------------------------------------------


def test_rejects_loops_and_asymmetry():
    with pytest.raises(DomainError):
        Graph(2, [[0], []])
    with pytest.raises(DomainError):
        Graph(2, [[1], []])


def test_round_trip_dict():
    g = Graph.cycle(5)
    assert Graph.from_dict(g.to_dict()) == g


def test_graph6_known_values():
    assert Graph.complete(4).to_graph6() == "C~"
    assert Graph.path(3).to_graph6() == "Bg"


def test_graph6_size_limit():
    with pytest.raises(UnsupportedFeature):
        Graph.path(63).to_graph6()


# -- distances ---------------------------------------------------------------------


def test_diameter_small():
    assert diameter(Graph.path(7)) == 6
    assert diameter(Graph.cycle(7)) == 3
    assert diameter(Graph.star(5)) == 2
    assert diameter(Graph(1, [[]])) == 0


def test_diameter_needs_connected():
    with pytest.raises(DomainError):
        diameter(Graph(2, [[], []]))


@given(st.integers(1, 60), st.integers(0, 30), st.integers(0, 2**32))
@settings(max_examples=150, deadline=None)
def test_diameter_matches_all_pairs(n, extra, seed):
    g = random_connected(n, extra, random.Random(seed))
    assert diameter(g) == diameter_naive(g)


@given(st.integers(2, 200), st.integers(0, 2**32))
@settings(max_examples=100, deadline=None)
def test_kernel_diameter_on_trees(n, seed):
    g = random_tree(n, random.Random(seed))
    eu, ev = np.array([e[0] for e in g.edges()]), np.array([e[1] for e in g.edges()])
    ptr, nbr = kernel.csr(n, eu, ev, len(eu))
    assert kernel.diameter_csr(n, ptr, nbr) == diameter_naive(g)


def test_components_and_split():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    assert sorted(map(len, components(g))) == [1, 2, 3]
    big, rest = largest_component_split(g)
    assert big.n == 3 and rest.n == 3


# -- blocks and membership ------------------------------------------------------------


def test_blocks_of_bowtie():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    bt = blocks_and_cutvertices(g)
    assert sorted(map(sorted, bt.blocks)) == [[0, 1, 2], [2, 3, 4]]
    assert bt.cutvertices == [2]


def test_outerplanarity_forbidden_minors():
    assert not outerplanarity_check(Graph.complete(4))
    assert not outerplanarity_check(Graph.complete_bipartite(2, 3))
    assert outerplanarity_check(Graph.cycle(8))
    # a subdivided K4 is not outerplanar either
    k4s = Graph.from_edges(5, [(0, 1), (0, 2), (0, 4), (4, 3), (1, 2), (1, 3), (2, 3)])
    assert not outerplanarity_check(k4s)


@given(st.integers(1, 40), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_generated_outerplanar_graphs_pass(n, seed):
    rng = random.Random(seed)
    g, _ = shuffled(random_outerplanar(n, rng), rng)
    assert outerplanarity_check(g)


def test_is_tree():
    assert is_tree(Graph.star(3)) and not is_tree(Graph.cycle(3))


# -- canonical forms ----------------------------------------------------------------------


@given(st.integers(1, 40), st.integers(0, 2**32))
@settings(max_examples=80, deadline=None)
def test_code_invariant_under_relabelling(n, seed):
    rng = random.Random(seed)
    g = random_outerplanar(n, rng)
    h, perm = shuffled(g, rng)
    assert canonical_code(g) == canonical_code(h)
    r = rng.randrange(n)
    assert canonical_code(g, r) == canonical_code(h, perm[r])


def test_code_separates_small_graphs():
    for n in range(1, 7):
        graphs = enumerate_class(n, "outerplanar")
        assert len({canonical_code(g) for g in graphs}) == len(graphs)


def test_rooted_codes_separate_orbits():
    g = Graph.path(5)
    assert len({canonical_code(g, v) for v in range(5)}) == 3


def test_treelike_code_agrees_with_general_search():
    # byte formats differ; on their overlap both paths must induce the same partition
    from subcrit.graphs import general_code

    rng = random.Random(3)
    graphs = [g for n in range(1, 7) for g in enumerate_class(n, "outerplanar")]
    graphs += [shuffled(g, rng)[0] for g in graphs]
    fast = [treelike_code(g) for g in graphs]
    slow = [general_code(g) for g in graphs]
    assert len(set(zip(fast, slow))) == len(set(fast)) == len(set(slow))
    rooted = [(g, v) for g in graphs[:40] for v in range(g.n)]
    fast = [treelike_code(g, v) for g, v in rooted]
    slow = [general_code(g, v) for g, v in rooted]
    assert len(set(zip(fast, slow))) == len(set(fast)) == len(set(slow))


def test_enumeration_routes_agree():
    for n in range(1, 6):
        a = {canonical_code(g) for g in enumerate_unlabelled(n)}
        b = {canonical_code(g) for g in enumerate_by_matrices(n)}
        assert a == b


def test_connected_graph_counts():
    assert [len(enumerate_unlabelled(n)) for n in range(1, 7)] == [1, 1, 2, 6, 21, 112]


# -- symmetry ------------------------------------------------------------------------------


def test_orbits_of_small_graphs():
    assert aut_orbit_count(Graph.path(6)) == 3
    assert aut_orbit_count(Graph.cycle(6)) == 1
    assert aut_orbit_count(Graph.star(4)) == 2
    assert len(automorphisms(Graph.cycle(6))) == 12


@given(st.integers(1, 9), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_orbit_count_matches_bruteforce(n, seed):
    g = random_outerplanar(n, random.Random(seed))
    assert aut_orbit_count(g) == aut_orbit_count_bruteforce(g)


def test_count_rooted_trees():
    assert [count_rooted(enumerate_class(n, "trees")) for n in range(1, 8)] == [1, 1, 2, 4, 9, 20, 48]


# -- neighbourhoods -------------------------------------------------------------------------


def test_neighbourhood_code_is_rooted_ball():
    g = Graph.path(5)
    assert neighborhood_code(g, 0, 1) == neighborhood_code(g, 4, 1)
    assert neighborhood_code(g, 0, 1) != neighborhood_code(g, 2, 1)
    assert neighborhood_code(g, 1, 1) == neighborhood_code(g, 2, 1)
    assert neighborhood_code(g, 1, 2) != neighborhood_code(g, 2, 2)


@given(st.integers(1, 50), st.integers(0, 2**32), st.booleans())
@settings(max_examples=80, deadline=None)
def test_link_census_matches_direct_codes(n, seed, extra_edges):
    rng = random.Random(seed)
    g = random_connected(n, n // 3, rng) if extra_edges else random_outerplanar(n, rng)
    eu = np.array([e[0] for e in g.edges()], dtype=np.int64)
    ev = np.array([e[1] for e in g.edges()], dtype=np.int64)
    direct = Counter(neighborhood_code(g, v, 1) for v in range(n))
    assert census_of_graph(n, eu, ev, 1) == direct


def test_census_of_radius_zero():
    assert sum(census_of_graph(4, np.array([0, 1, 2]), np.array([1, 2, 3]), 0).values()) == 4
