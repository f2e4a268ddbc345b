import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from subcrit import samplers as smp
from subcrit.analytic import compute_family, solved
from subcrit.errors import BudgetExhausted, DomainError, UnsupportedFeature, UsageError
from subcrit.graphs import canonical_code, components, enumerate_class, is_connected
from subcrit.lab.experiments import reference_codes
from subcrit.species import cb_series, cv_series, dissection_derivative, dissection_value, unrooted_count_series


def tv(counts, support):
    total = sum(counts.values())
    return 0.5 * sum(abs(counts.get(c, 0) / total - 1 / len(support)) for c in support | set(counts))


def chi2_p(counts, support):
    obs = np.array([counts.get(c, 0) for c in sorted(support)])
    return stats.chisquare(obs).pvalue


# -- dissections and block symmetries ------------------------------------------------


def test_dissection_size_law():
    # E[size] = x D'(x) / D(x) under the Boltzmann law
    x = 0.12
    rng = smp.make_rng(1)
    sizes = np.array([smp.sample_dissection(x, rng).meta["size"] for _ in range(20000)])
    mean = x * dissection_derivative(x) / dissection_value(x)
    assert abs(sizes.mean() - mean) < 4 * sizes.std() / math.sqrt(len(sizes))


def test_dissection_is_outerplanar_polygon():
    rng = smp.make_rng(2)
    member = smp.membership("outerplanar")
    for _ in range(200):
        g = smp.sample_dissection(0.15, rng)
        assert member(g) and g.has_edge(0, 1)
        assert g.m <= max(1, 2 * g.n - 3)


def test_dissection_domain():
    with pytest.raises(DomainError):
        smp.sample_dissection(0.2, smp.make_rng(0))


def test_block_symmetry_is_an_automorphism():
    rng = smp.make_rng(3)
    ctx, _ = solved("outerplanar")
    for _ in range(300):
        d = smp.sample_block_symmetry("outerplanar", ctx.rho, rng)
        p, g = d.automorphism, d.block
        assert p[0] == 0 and sorted(p) == list(range(g.n))
        assert {tuple(sorted((p[u], p[v]))) for u, v in g.edges()} == set(g.edges())


# -- rooted ----------------------------------------------------------------------------


def test_rooted_window_and_membership():
    rng = smp.make_rng(4)
    member = smp.membership("outerplanar")
    for _ in range(50):
        g = smp.sample_rooted_sized("outerplanar", 40, window=0.1, rng=rng)
        assert 36 <= g.n <= 44 and g.root == 0 and is_connected(g) and member(g)


def test_rooted_uniform_trees():
    counts = smp.rooted_code_counts("trees", 7, 48000, smp.make_rng(5))
    support = reference_codes("trees", 7, rooted=True)
    assert len(support) == 48 and set(counts) <= support
    assert tv(counts, support) < 0.02 and chi2_p(counts, support) > 1e-4


def test_rooted_uniform_outerplanar():
    counts = smp.rooted_code_counts("outerplanar", 5, 40000, smp.make_rng(6))
    support = reference_codes("outerplanar", 5, rooted=True)
    assert len(support) == 40 and set(counts) <= support
    assert tv(counts, support) < 0.02 and chi2_p(counts, support) > 1e-4


def test_unconditioned_rooted_size_law():
    # P(size = 1) = x / A(x), with A(x) summed from the series
    x = 0.3
    ax = float(compute_family("trees", 400, "float", theta=1.0).value(x).value)
    assert abs(smp.rooted_value("trees", x) / ax - 1) < 1e-10
    rng = smp.make_rng(7)
    sizes = [smp.sample_rooted("trees", x, rng).n for _ in range(20000)]
    p1 = sizes.count(1) / len(sizes)
    expected = x / ax
    assert abs(p1 - expected) < 4 * math.sqrt(expected * (1 - expected) / len(sizes))


def test_unconditioned_draw_respects_cap():
    rng = smp.make_rng(8)
    with pytest.raises(BudgetExhausted):
        for _ in range(2000):
            smp.sample_rooted("trees", None, rng, max_size=3)


# -- unrooted ---------------------------------------------------------------------------


@pytest.mark.parametrize("method", ["decomposition", "orbit-rejection"])
def test_unrooted_trees_uniform(method):
    counts, st = smp.unrooted_code_counts("trees", 8, 46000, smp.make_rng(9), method=method)
    support = reference_codes("trees", 8, rooted=False)
    assert len(support) == 23 and set(counts) <= support
    assert tv(counts, support) < 0.02 and chi2_p(counts, support) > 1e-4


def test_unrooted_outerplanar_orbit_rejection_uniform():
    counts, st = smp.unrooted_code_counts("outerplanar", 5, 26000, smp.make_rng(10), method="orbit-rejection")
    support = reference_codes("outerplanar", 5, rooted=False)
    assert len(support) == 13
    assert tv(counts, support) < 0.02 and chi2_p(counts, support) > 1e-4


def test_outerplanar_decomposition_reports_its_bias():
    n = 6
    fam = compute_family("outerplanar", n)
    c, cb = unrooted_count_series("outerplanar", fam), cb_series("outerplanar", fam)
    share = float(cb[n] / (n * c[n]))
    _, st = smp.unrooted_code_counts("outerplanar", n, 2000, smp.make_rng(11))
    assert abs(st["bias"] - share) < 1e-9


def test_tree_decomposition_summands():
    # the three parts appear in proportion a_n : cv_n : cb_n
    n = 8
    fam = compute_family("trees", n)
    w = np.array([fam.rooted[n], cv_series("trees", fam)[n], cb_series("trees", fam)[n]], float)
    _, st = smp.unrooted_code_counts("trees", n, 40000, smp.make_rng(12))
    obs = np.array(st["summands"])
    assert stats.chisquare(obs, w / w.sum() * obs.sum()).pvalue > 1e-4


def test_cv_pointing_is_symmetric():
    rng = smp.make_rng(13)
    for _ in range(100):
        g = smp.sample_cv_pointed("outerplanar", 30, rng, window=0.2)
        cyc = g.marked_cycle
        assert len(cyc) >= 2 and len(set(cyc)) == len(cyc)
        assert len({canonical_code(g, v) for v in cyc}) == 1


def test_cb_pointing_halves_match():
    rng = smp.make_rng(14)
    for _ in range(50):
        d = smp.sample_cb_pointed("trees", 20, rng, window=0.2)
        a, b = d.components
        assert canonical_code(a, 0) == canonical_code(b, 0)
        assert d.graph.has_edge(*d.graph.marked_cycle)


def test_cb_sampler_unsupported_for_outerplanar():
    with pytest.raises(UnsupportedFeature):
        smp.sample_cb_pointed("outerplanar", 10, smp.make_rng(0))


def test_unknown_method():
    with pytest.raises(UsageError):
        smp.sample_unrooted_sized("trees", 10, method="guess")


def test_orbit_floor():
    assert smp.orbit_floor("trees", 3) == 2
    assert smp.orbit_floor("trees", 2) == 1
    assert smp.orbit_floor("outerplanar", 10) == 1


@pytest.mark.parametrize("name", ["trees", "outerplanar"])
def test_edge_arrays_match_graph_law(name):
    nv, eu, ev, meta = smp.sample_edge_array(name, 500, window=0.1, rng=smp.make_rng(15))
    assert 450 <= nv <= 550 and len(eu) == len(ev)
    assert eu.max() < nv and ev.max() < nv
    if name == "trees":
        assert len(eu) == nv - 1 and meta["exact"]
    else:
        assert 0 < meta["bias"] < 0.1 and not meta["exact"]


def test_same_seed_same_graph():
    a = smp.sample_unrooted_sized("outerplanar", 60, rng=smp.make_rng(42), window=0.1)
    b = smp.sample_unrooted_sized("outerplanar", 60, rng=smp.make_rng(42), window=0.1)
    c = smp.sample_unrooted_sized("outerplanar", 60, rng=smp.make_rng(42, stream=1), window=0.1)
    assert a.edges() == b.edges()
    assert a.edges() != c.edges()


def test_budget_is_enforced():
    with pytest.raises(BudgetExhausted):
        smp.sample_rooted_sized("outerplanar", 2000, rng=smp.make_rng(0), budget=100)


# -- multisets and fragments ---------------------------------------------------------------


def forest_code(g):
    return tuple(sorted(canonical_code(g.induced(c)) for c in components(g)))


def test_multiset_uniform_forests():
    # unlabelled forests on 6 vertices: 20
    rng = smp.make_rng(16)
    counts = Counter(forest_code(smp.sample_multiset("trees", 6, rng)) for _ in range(20000))
    assert len(counts) == 20
    obs = np.array(list(counts.values()))
    assert stats.chisquare(obs).pvalue > 1e-4


def test_multiset_profile_sums_to_n():
    rng = smp.make_rng(17)
    for n in (1, 7, 50, 400):
        prof = smp.multiset_profile("outerplanar", n, rng)
        assert sum(d * j for d, j in prof) == n


def test_fragment_size_law_is_a_distribution():
    for name in ("trees", "outerplanar"):
        p, deficit = smp.fragment_size_law(name)
        assert abs(p.sum() + deficit - 1) < 1e-12 and 0 <= deficit < 1e-3


def test_fragment_empty_probability():
    # P(empty) = 1 / G(rho)
    p, _ = smp.fragment_size_law("trees")
    rng = smp.make_rng(18)
    draws = [smp.sample_fragment_limit("trees", rng=rng).n for _ in range(5000)]
    frac = draws.count(0) / len(draws)
    assert abs(frac - p[0]) < 4 * math.sqrt(p[0] * (1 - p[0]) / len(draws))


def test_membership_of_enumerated_graphs():
    member = smp.membership("trees")
    assert all(member(g) for g in enumerate_class(6, "trees"))
    assert not member(next(g for g in enumerate_class(4, "outerplanar") if g.m == 4))
