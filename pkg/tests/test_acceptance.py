"""The twelve acceptance criteria, each at its stated tolerance and budget.

Every test records a one-line PASS/FAIL verdict that ``conftest.py`` prints in
the terminal summary; the same line is printed to stdout for ``pytest -s``.
"""
import cmath
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from coarsekit.groups import (StepRelation, delta_metric, free_abelian, free_group, heisenberg,
                              nu_metric, word_ball, word_length)
from coarsekit.growth import (FolnerWitness, NoWitnessWithinBudget, enumerate_connected,
                              folner_search, growth_series, poldeg_estimate, regular_tree,
                              tree_boundary_check)
from coarsekit.metric import FiniteMetricSpace, c_components, ultrametrize
from coarsekit.rips import (build_rips, circle_fixture, h1_class, highway_fixture, line_fixture,
                            rotation_number, sc_probe)
from coarsekit.splitting import (DICTIONARY, GammaClass, HomVector, ValuationVector,
                                 classify_gamma_lambda, classify_semidirect,
                                 defining_subset_presentation, dihedral_presentation, engulfs,
                                 steinberg_presentation, todd_coxeter)

from cli_cases import CASES, argv, write_inputs
from oracles import (free_ball_size, highway_distance, intmat_mul, minimax_simple_paths,
                     rooted_subtree_counts, valuation, z2_ball_size)

BUDGET = 1_000_000


@pytest.fixture
def verdict(record_property):
    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line)
        record_property("acceptance", line)
        return ok
    return emit


# 1 -----------------------------------------------------------------------------------

def test_criterion_01_heisenberg_distortion(verdict):
    start = time.perf_counter()
    o = heisenberg()          # S = {s, t, u} and inverses
    s, t, u = o.generator("s"), o.generator("t"), o.generator("u")
    straight = all(word_length(o, o.power(s, k), 12, BUDGET) == k
                   and word_length(o, o.power(t, k), 12, BUDGET) == k for k in range(1, 7))
    square = all(word_length(o, o.power(u, k * k), 12, BUDGET) <= 4 * k for k in (1, 2, 3))
    ns = np.arange(1, 37)
    lengths = np.array([word_length(o, o.power(u, int(n)), 36, BUDGET) for n in ns])
    exponent = float(np.polyfit(np.log(ns), np.log(lengths), 1)[0])
    elapsed = time.perf_counter() - start
    ok = straight and square and 0.4 <= exponent <= 0.6 and elapsed < 60
    verdict(1, ok, f"l(s^k)=l(t^k)=k: {straight}, l(u^k^2)<=4k: {square}, "
                   f"exponent {exponent:.3f} vs [0.4, 0.6], {elapsed:.1f}s")
    assert straight and square and elapsed < 60
    assert 0.4 <= exponent <= 0.6


# 2 -----------------------------------------------------------------------------------

def test_criterion_02_growth_counts(verdict):
    z2 = growth_series(free_abelian(2), r_max=8, node_budget=BUDGET).counts
    f2 = growth_series(free_group(2), r_max=7, node_budget=BUDGET).counts
    z2_ok = z2 == [2 * r * r + 2 * r + 1 for r in range(9)] == [z2_ball_size(r) for r in range(9)]
    f2_ok = f2 == [2 * 3 ** r - 1 for r in range(8)] == [free_ball_size(2, r) for r in range(8)]
    est = poldeg_estimate(growth_series(free_abelian(2), r_max=16, node_budget=BUDGET))
    ok = z2_ok and f2_ok and 1.7 <= est.degree <= 2.3
    verdict(2, ok, f"Z^2 counts {z2_ok}, F_2 counts {f2_ok}, Z^2 degree {est.degree:.3f}")
    assert ok


# 3 -----------------------------------------------------------------------------------

def random_rational_space(rng, n):
    pts = [(Fraction(rng.randint(0, 40), rng.randint(1, 4)), Fraction(rng.randint(0, 40), rng.randint(1, 4)))
           for _ in range(n)]
    return FiniteMetricSpace.from_function(
        range(n), lambda i, j: abs(pts[i][0] - pts[j][0]) + abs(pts[i][1] - pts[j][1]))


def test_criterion_03_step_relation_inequalities(verdict):
    rng = random.Random(2024)
    pairs_checked = 0
    bad = []
    for trial in range(100):
        space = random_rational_space(rng, rng.randint(2, 20))
        # the smallest scale at which the space is chained together
        floor_c = max((d for i, j, d in ultrametrize(space).pairs()), default=Fraction(1))
        c = max(floor_c, Fraction(rng.randint(1, 40), rng.randint(1, 4)))
        C = c + Fraction(rng.randint(0, 40), rng.randint(1, 4))
        assert len(c_components(space, c)) == 1
        extra = [(space.points[i], space.points[j]) for i, j, d in space.pairs()
                 if c < d <= C and rng.random() < 0.3]
        rel = StepRelation.controlled(space, c, C, extra)
        assert rel.is_controlled(c, C)
        nu, delta = nu_metric(rel), delta_metric(rel)
        for x in space.points:
            for y in space.points:
                pairs_checked += 1
                dv, nv = delta.dist(x, y), nu.dist(x, y)
                if not (dv <= C * nv and dv >= c / 2 * (nv - 1)):
                    bad.append((trial, x, y))
    ok = not bad
    verdict(3, ok, f"100 relations, {pairs_checked} pairs, {len(bad)} violations")
    assert ok


# 4 -----------------------------------------------------------------------------------

def test_criterion_04_ultrametrization(verdict):
    rng = random.Random(404)
    failures = 0
    for _ in range(200):
        n = rng.randint(1, 8)
        edges = [(i, rng.randrange(i), Fraction(rng.randint(0, 12), rng.randint(1, 3))) for i in range(1, n)]
        edges += [(rng.randrange(n), rng.randrange(n), Fraction(rng.randint(1, 12), rng.randint(1, 3)))
                  for _ in range(rng.randint(0, 10))]
        space = FiniteMetricSpace.from_graph(range(n), [e for e in edges if e[0] != e[1]])
        u = ultrametrize(space)
        rows = [list(space.row(i)) for i in range(n)]
        exact = [list(u.row(i)) for i in range(n)] == minimax_simple_paths(rows)
        idem = ultrametrize(u) == u
        ultra = all(u.d(i, k) <= max(u.d(i, j), u.d(j, k))
                    for i in range(n) for j in range(n) for k in range(n))
        failures += not (exact and idem and ultra)
    ok = failures == 0
    verdict(4, ok, f"200 spaces, {failures} failures")
    assert ok


# 5 -----------------------------------------------------------------------------------

def test_criterion_05_rips_sc_bridge(verdict):
    z = line_fixture(12)
    cx = build_rips(z, 1)
    data = cx.pi1()
    trivial = data.betti1 == 0 and not data.generators
    rep = sc_probe(z, 0, 1, 1, loop_sample_size=32, move_budget=BUDGET, seed=0)
    all_contract = len(rep.loops) == 32 and all(v.verdict == "contracted" for v in rep.verdicts)
    circle = circle_fixture(1, 6)
    step = circle.dist(0, 1)
    crep = sc_probe(circle, 0, step, step, loop_sample_size=8, move_budget=BUDGET, seed=0)
    circle_ok = crep.h1_map_nonzero and crep.image_rank == 1 and crep.status == "fails"
    ok = trivial and all_contract and circle_ok
    verdict(5, ok, f"Z-ball H1 trivial {trivial}, 32 loops contracted {all_contract}, "
                   f"circle j_* rank {crep.image_rank} and SC {crep.status}")
    assert ok


# 6 -----------------------------------------------------------------------------------

def _rho(points):
    return rotation_number(points + points[:1], R=1).rho


def test_criterion_06_rotation_number(verdict):
    exact = all(rotation_number(list(range(m)) + [0], m=m).rho == 3
                and rotation_number([0] * 4, m=m).rho == 0 for m in (6, 12, 24))
    bound = math.sqrt(3) - 1e-6
    rng = random.Random(6)
    loops = [[cmath.exp(2j * math.pi * k / m) for k in range(m)] for m in (6, 12, 24)]
    loops += [[1 + 0j] * 3]
    moves = broken = 0
    while moves < 1000:
        loop = loops[moves % len(loops)]
        before = _rho(loop)
        n = len(loop)
        if rng.random() < 0.5 or n < 3:
            # insert a point between positions i and i+1 (cyclically), keeping the base point
            i = rng.randrange(n)
            a, b = loop[i], loop[(i + 1) % n]
            z = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            if abs(z - a) >= bound or abs(z - b) >= bound or abs(a - b) >= bound:
                continue
            new = loop[:i + 1] + [z] + loop[i + 1:]
        else:
            i = rng.randrange(1, n)
            a, b = loop[i - 1], loop[(i + 1) % n]
            if abs(a - b) >= bound or abs(a - loop[i]) >= bound or abs(b - loop[i]) >= bound:
                continue
            new = loop[:i] + loop[i + 1:]
        moves += 1
        broken += _rho(new) != before
        loops[moves % len(loops)] = new
    ok = exact and broken == 0
    verdict(6, ok, f"polygons and constant loops exact {exact}, {moves} moves, {broken} changed rho")
    assert ok


# 7 -----------------------------------------------------------------------------------

def test_criterion_07_highway(verdict):
    h = highway_fixture(3)
    details = []
    ok = True
    for n in (2, 3):
        a, b = 10 ** n, 10 ** n + 3 * n
        assert h.dist(a, b) == n
        for c in (n, n + Fraction(1, 4), n + Fraction(1, 2), n + Fraction(3, 4), n + Fraction(99, 100)):
            cx = build_rips(h, c)
            in_triangle = any(cx.has_triangle(a, b, x) for x in h.points if x not in (a, b))
            loop = list(range(a, b + 1)) + [a]
            nonzero = not h1_class(cx, loop).is_zero
            ok &= (not in_triangle) and nonzero
        details.append(f"n={n}: edge in no triangle and loop class nonzero at 5 scales")
    rng = random.Random(7)
    top = len(h) - 1
    pair_ok = True
    for _ in range(500):
        m, k = rng.randint(0, top), rng.randint(0, top)
        d = h.dist(m, k)
        pair_ok &= Fraction(abs(m - k), 3) <= d <= abs(m - k) and d == highway_distance(m, k, 3)
    ok &= pair_ok
    verdict(7, ok, "; ".join(details) + f"; 500 pairs bilipschitz {pair_ok}")
    assert ok


# 8 -----------------------------------------------------------------------------------

def test_criterion_08_tree_isoperimetry(verdict):
    start = time.perf_counter()
    tree = regular_tree(3, 12)
    sizes = [0] * 11
    failures = 0
    # every vertex within distance 9 of the centre has degree 3, so any connected
    # set of at most 10 interior vertices is carried onto one through the centre by
    # a tree automorphism, which preserves boundary sizes
    for U in enumerate_connected(0, tree.neighbors, 10, BUDGET):
        sizes[len(U)] += 1
        _, holds = tree_boundary_check(tree, U)
        failures += not holds
    elapsed = time.perf_counter() - start
    complete = sizes == rooted_subtree_counts(3, 10)
    ok = failures == 0 and complete and elapsed < 30
    verdict(8, ok, f"{sum(sizes)} subsets (complete: {complete}), {failures} failures, {elapsed:.1f}s")
    assert ok


# 9 -----------------------------------------------------------------------------------

def test_criterion_09_folner(verdict):
    w = folner_search(free_abelian(1), 1, Fraction(1, 2), "exhaustive", BUDGET)
    z_ok = isinstance(w, FolnerWitness) and len(w.F) == 4 and w.ratio == Fraction(3, 2)
    v = folner_search(free_group(2), 1, Fraction(1, 10), "exhaustive", BUDGET, max_size=12)
    # in the 4-regular tree a connected F has exactly 2|F| + 2 outside neighbours
    f2_ok = (isinstance(v, NoWitnessWithinBudget) and v.exhausted
             and v.best_ratio == Fraction(3 * 12 + 2, 12))
    ok = z_ok and f2_ok
    verdict(9, ok, f"Z witness |F|={len(w.F)} ratio {w.ratio}; F_2 exhausted {v.explored} shapes, "
                   f"best ratio {v.best_ratio}")
    assert ok


# 10 ----------------------------------------------------------------------------------

def test_criterion_10_defining_subset(verdict):
    p = steinberg_presentation(3)
    d = defining_subset_presentation(p, BUDGET)
    q = d.presentation
    ident = [[int(i == j) for j in range(3)] for i in range(3)]
    short = q.max_relator_length <= 3
    images = q.evaluation.images
    o = q.evaluation.oracle
    hold = True
    for r in q.relators:
        m = ident
        for a, e in r:
            g = images[a] if e > 0 else o.inverse(images[a])
            m = intmat_mul(m, [list(row) for row in g])
        hold &= m == ident
    dih = dihedral_presentation(4)
    dq = defining_subset_presentation(dih, BUDGET).presentation
    table_order = len(word_ball(dih.evaluation.oracle, 8))
    orders = (todd_coxeter(dih, BUDGET), todd_coxeter(dq, BUDGET))
    dihedral_ok = orders == (8, 8) == (table_order, table_order)
    ok = d.m == 4 and short and hold and dihedral_ok
    verdict(10, ok, f"SL3: m={d.m}, {len(q.letters)} letters, {len(q.relators)} relators, "
                    f"length<=3 {short}, all identity {hold}; dihedral orders {orders}")
    assert ok


# 11 ----------------------------------------------------------------------------------

def test_criterion_11_classifiers(verdict):
    named = {Fraction(1, 6): GammaClass.FINITELY_PRESENTED, Fraction(2, 3): GammaClass.FG_NOT_FP,
             Fraction(3, 2): GammaClass.FG_NOT_FP, Fraction(3): GammaClass.NOT_FINITELY_GENERATED}
    named_ok = all(classify_gamma_lambda(ValuationVector.of(lam, [2, 3])) == want
                   for lam, want in named.items())
    rng = random.Random(11)
    pool = [2, 3, 5, 7, 11, 13, 17, 19]
    disagreements = 0
    for _ in range(500):
        primes = rng.sample(pool, rng.randint(1, 4))
        lam = Fraction(rng.choice([1, -1]))
        for p in primes:
            lam *= Fraction(p) ** rng.randint(-3, 3)
        v = ValuationVector.of(lam, primes)
        assert list(v.valuations) == [valuation(lam, p) for p in primes]
        g = classify_gamma_lambda(v)
        disagreements += DICTIONARY[g] != classify_semidirect(HomVector.from_valuations(v))
        disagreements += (g == GammaClass.FINITELY_PRESENTED) != (engulfs(v) or engulfs(v.inverse()))
    ok = named_ok and disagreements == 0
    verdict(11, ok, f"named examples {named_ok}, 500 random units, {disagreements} disagreements")
    assert ok


# 12 ----------------------------------------------------------------------------------

def _cli():
    exe = os.path.join(os.path.dirname(sys.executable), "coarse-kit")
    return [exe] if os.path.exists(exe) else [sys.executable, "-m", "coarsekit.cli"]


def test_criterion_12_determinism(verdict, tmp_path):
    write_inputs(tmp_path)
    cli = _cli()
    differing = []
    for name in sorted(CASES):
        outputs = set()
        for rep in range(10):
            # a different hash seed each run flushes out any set-order dependence
            env = dict(os.environ, PYTHONHASHSEED=str(rep))
            proc = subprocess.run(cli + argv(name, tmp_path), capture_output=True, env=env)
            assert proc.returncode == 0, proc.stderr.decode()
            outputs.add(proc.stdout)
        if len(outputs) != 1:
            differing.append(name)
    ok = not differing
    verdict(12, ok, f"{len(CASES)} subcommands x 10 runs, differing: {differing or 'none'}")
    assert ok
