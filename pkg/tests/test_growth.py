from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coarsekit.errors import BudgetExceeded, DegreeTooSmall, NotATree, TooFewSamples
from coarsekit.groups import ball_metric_space, free_abelian, free_group, lamplighter
from coarsekit.growth import (GrowthSeries, GrowthWitness, NoWitnessInGrid, NoWitnessWithinBudget,
                              FolnerWitness, Tree, check_witness, compare_growth,
                              compose_witnesses, enumerate_connected, folner_ratio,
                              folner_search, greedy_lattice, growth_series, lattice_check,
                              poldeg_estimate, regular_tree, tree_boundary_check, tree_shapes)
from coarsekit.metric import FiniteMetricSpace
from coarsekit.rips import line_fixture

from oracles import free_ball_size, nonisomorphic_tree_count, rooted_subtree_counts, z2_ball_size


def series(fn, r_max=20, label=""):
    return GrowthSeries.from_function(fn, range(r_max + 1), label)


# --- series --------------------------------------------------------------------------

def test_group_series():
    assert growth_series(free_abelian(2), r_max=2).counts == [1, 5, 13]
    assert growth_series(free_group(2), r_max=2).counts == [1, 5, 17]


def test_group_series_against_closed_forms():
    assert growth_series(free_abelian(2), r_max=8).counts == [z2_ball_size(r) for r in range(9)]
    assert growth_series(free_group(2), r_max=6).counts == [free_ball_size(2, r) for r in range(7)]


def test_one_point_space_series():
    s = growth_series(FiniteMetricSpace(["p"], [[0]]), r_max=5)
    assert s.samples == ((0, 1),) and s(5) == 1


def test_metric_space_series_breakpoints():
    s = growth_series(FiniteMetricSpace.from_line([0, 1, 1.5, 4], "abcd"), "a", r_max=3)
    assert s.samples == ((0, 1), (1, 2), (1.5, 3))
    assert s(2) == 3


def test_series_evaluation_limits():
    s = series(lambda r: r + 1, 5)
    with pytest.raises(ValueError):
        s(6)
    with pytest.raises(ValueError):
        GrowthSeries(((0, 3), (1, 2)))


def test_csv_output():
    assert growth_series(free_abelian(1), r_max=2).to_csv() == "r,count\n0,1\n1,3\n2,5\n"


# --- growth preorder ----------------------------------------------------------------------

def test_compare_polynomials():
    w = compare_growth(series(lambda r: r ** 2), series(lambda r: r ** 3))
    assert isinstance(w, GrowthWitness) and (w.lam, w.mu, w.c) == (1, 1, 0)
    # the looser triple (1, 1, 1) is also a valid witness on the range
    assert check_witness(series(lambda r: r ** 2), series(lambda r: r ** 3), 1, 1, 1)


def test_compare_exponentials():
    w = compare_growth(series(lambda r: 2 ** r), series(lambda r: 3 ** r))
    assert (w.lam, w.mu, w.c) == (1, 1, 0)
    w = compare_growth(series(lambda r: 3 ** r), series(lambda r: 2 ** r))
    assert (w.lam, w.mu, w.c) == (1, 2, 0)


def test_no_witness_in_grid():
    v = compare_growth(series(lambda r: 100 ** r), series(lambda r: r + 1))
    assert isinstance(v, NoWitnessInGrid)
    assert v.to_json()["verdict"] == "no_witness_in_grid"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(1, 5))
def test_reflexive_and_transitive(a, b, k):
    f = series(lambda r: k * (r + 1) ** a)
    g = series(lambda r: (r + 1) ** b)
    h = series(lambda r: 2 ** r)
    w = compare_growth(f, f)
    assert (w.lam, w.mu, w.c) == (1, 1, 0)
    w1, w2 = compare_growth(f, g), compare_growth(g, h)
    if isinstance(w1, GrowthWitness) and isinstance(w2, GrowthWitness):
        w3 = compose_witnesses(w1, w2)
        # the composite is sound wherever both steps were checked
        for r in f.radii:
            x = w1.mu * r + w1.c
            y = w2.mu * x + w2.c
            if x <= g.limit and y <= h.limit:
                assert f(r) <= w3.lam * h(w3.mu * r + w3.c)


def test_witness_json_has_digest():
    w = compare_growth(series(lambda r: r), series(lambda r: r))
    d = w.to_json()
    assert d["lambda"] == 1 and len(d["digest"]) == 64


# --- polynomial degree ------------------------------------------------------------------

def test_poldeg_z2():
    est = poldeg_estimate(growth_series(free_abelian(2), r_max=16))
    assert 1.7 <= est.degree <= 2.3 and not est.exponential


def test_poldeg_constant():
    est = poldeg_estimate(series(lambda r: 1, 10))
    assert est.degree == 0


def test_poldeg_free_group_flags_exponential():
    est = poldeg_estimate(growth_series(free_group(2), r_max=10))
    assert est.degree > 4 and est.exponential


def test_poldeg_needs_samples():
    with pytest.raises(TooFewSamples):
        poldeg_estimate(series(lambda r: r + 1, 4))


# --- metric lattices ---------------------------------------------------------------------

def test_greedy_lattice_line():
    s = FiniteMetricSpace.from_line(range(11), list(range(11)))
    assert greedy_lattice(s, 3, 0) == [0, 3, 6, 9]
    assert greedy_lattice(s, 20, 4) == [4]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=15, unique=True), st.integers(1, 8))
def test_greedy_lattice_is_separated_and_cobounded(xs, c):
    s = FiniteMetricSpace.from_line(xs, xs)
    L = greedy_lattice(s, c, xs[-1])
    sep, cover = lattice_check(s, L, c)
    assert sep and cover <= 2 * c and xs[-1] in L


def test_lattice_growth_stability():
    space = ball_metric_space(free_abelian(2), 4)
    a = greedy_lattice(space, 2, "[0,0]")
    b = greedy_lattice(space, 2, "[1,0]")
    sub_a, sub_b = space.subspace(a), space.subspace(b)
    ga = growth_series(sub_a, "[0,0]", r_max=4)
    gb = growth_series(sub_b, "[1,0]", r_max=4)
    assert isinstance(compare_growth(ga, gb), GrowthWitness)
    assert isinstance(compare_growth(gb, ga), GrowthWitness)


# --- Følner sets ----------------------------------------------------------------------------

def test_folner_z():
    for strategy in ("greedy", "exhaustive"):
        w = folner_search(free_abelian(1), 1, Fraction(1, 2), strategy)
        assert (len(w.F), w.ratio) == (4, Fraction(3, 2))
        assert folner_ratio(free_abelian(1), w.F, 1) == w.ratio
    # balls have odd size, so the first one that qualifies is B(2)
    w = folner_search(free_abelian(1), 1, Fraction(1, 2), "balls")
    assert (len(w.F), w.ratio) == (5, Fraction(7, 5))


def test_folner_free_group_exhaustive_none():
    v = folner_search(free_group(2), 1, Fraction(1, 10), "exhaustive", max_size=12)
    assert isinstance(v, NoWitnessWithinBudget) and v.exhausted
    assert v.best_ratio > Fraction(11, 10)


def test_folner_lamplighter_balls():
    w = folner_search(lamplighter(2), 1, 1, "balls")
    assert isinstance(w, FolnerWitness) and w.ratio <= 2
    assert folner_ratio(lamplighter(2), w.F, 1) == w.ratio


def test_folner_on_metric_space():
    w = folner_search(line_fixture(20), 1, Fraction(1, 2), "greedy", base=0)
    assert isinstance(w, FolnerWitness) and w.ratio <= Fraction(3, 2)


def test_folner_budget():
    v = folner_search(free_group(2), 1, Fraction(1, 10), "exhaustive", budget=5)
    assert isinstance(v, NoWitnessWithinBudget) and not v.exhausted


def test_folner_unknown_strategy():
    with pytest.raises(ValueError):
        folner_search(free_abelian(1), strategy="random")


# --- enumerators ----------------------------------------------------------------------------

def test_connected_subsets_of_regular_tree_match_generating_function():
    t = regular_tree(3, 10)
    sizes = [0] * 11
    for F in enumerate_connected(0, t.neighbors, 10):
        sizes[len(F)] += 1
    assert sizes == rooted_subtree_counts(3, 10)


def test_connected_subsets_of_a_cycle():
    n = 6
    sets = list(enumerate_connected(0, lambda v: [(v - 1) % n, (v + 1) % n], n))
    assert len(sets) == len({frozenset(s) for s in sets})
    # arcs through 0: k positions for each size k < n, plus the full cycle
    assert len(sets) == sum(range(1, n)) + 1


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_connected(0, regular_tree(3, 8).neighbors, 8, budget=50))


@pytest.mark.parametrize("n", range(1, 11))
def test_tree_shapes_count(n):
    got = sum(1 for adj in tree_shapes(n, 4) if len(adj) == n)
    assert got == nonisomorphic_tree_count(n, 4)


# --- tree isoperimetry ----------------------------------------------------------------------

def test_tree_boundary_examples():
    t = regular_tree(3, 4)
    assert tree_boundary_check(t, [0]) == (1, True)
    a = t.neighbors(0)[0]
    b = [w for w in t.neighbors(a) if w != 0][0]
    assert tree_boundary_check(t, [0, a, b]) == (3, True)


def test_tree_boundary_rejects_leaves():
    t = regular_tree(3, 2)
    leaf = next(v for v in t.adj if t.degree(v) == 1)
    with pytest.raises(DegreeTooSmall):
        tree_boundary_check(t, [leaf])


def test_not_a_tree():
    with pytest.raises(NotATree):
        Tree({0: [1, 2], 1: [0, 2], 2: [0, 1]})
    with pytest.raises(NotATree):
        Tree({0: [1], 1: [0], 2: [3], 3: [2], 4: []})


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 25))
def test_random_subtrees_satisfy_isoperimetry(rnd, size):
    t = regular_tree(3, 8)
    U = [0]
    inside = {0}
    while len(U) < size:
        v = rnd.choice(U)
        w = rnd.choice(t.neighbors(v))
        if w not in inside and t.degree(w) >= 3:
            U.append(w)
            inside.add(w)
    _, holds = tree_boundary_check(t, U)
    assert holds
