import numpy as np
import pytest

from plbcover import (
    Graph,
    approx_ratio,
    bi_fitness,
    cds_bi,
    cds_scalar,
    is_feasible,
    mds_bi,
    mds_scalar,
    mis_bi,
    mis_scalar,
    mvc_bi,
    mvc_scalar,
    scalar_fitness,
)
from plbcover.fitness import Problem
from helpers import k2, p3, random_graph, sol, solutions, star, triangle


def test_mds_scalar_examples():
    assert mds_scalar(p3(), sol("010")) == 1
    assert mds_scalar(p3(), sol("000")) == 9
    assert mds_scalar(p3(), sol("111")) == 3


def test_mds_bi_examples():
    assert mds_bi(p3(), sol("010")) == (0, 1)
    g = star(4)
    assert mds_bi(g, np.zeros(5, dtype=np.uint8)) == (5, 0)
    assert mds_bi(g, np.ones(5, dtype=np.uint8)) == (0, 5)


def test_mvc_scalar_examples():
    assert mvc_scalar(p3(), sol("010")) == 1
    assert mvc_scalar(triangle(), sol("000")) == 12
    assert mvc_scalar(triangle(), sol("110")) == 2


def test_mvc_bi_examples():
    assert mvc_bi(triangle(), sol("100")) == (1, 1)
    assert mvc_bi(triangle(), sol("111")) == (0, 3)
    assert mvc_bi(k2(), sol("00")) == (1, 0)


def test_mvc_literal_variant_matches_domination_fitness():
    g = triangle()
    for x in solutions(3):
        assert mvc_scalar(g, x, literal_domination=True) == mds_scalar(g, x)
        assert mvc_bi(g, x, literal_domination=True) == mds_bi(g, x)


def test_cds_scalar_examples():
    assert cds_scalar(p3(), sol("010")) == 1
    assert cds_scalar(p3(), sol("101")) == 11
    # empty selection: u = 3, w = 0
    assert cds_scalar(p3(), sol("000")) == 18


def test_cds_bi_examples():
    assert cds_bi(p3(), sol("010")) == (1, 1)
    assert cds_bi(p3(), sol("000")) == (3, 0)
    assert cds_bi(p3(), sol("111")) == (1, 3)


def test_cds_rejects_disconnected():
    g = Graph(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        cds_scalar(g, np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        cds_bi(g, np.zeros(4, dtype=np.uint8))


def test_mis_scalar_examples():
    assert mis_scalar(triangle(), sol("110")) == 2 - 3 * 2
    assert mis_scalar(triangle(), sol("000")) == 0
    assert mis_scalar(p3(), sol("101")) == 2


def test_mis_bi_examples():
    assert mis_bi(triangle(), sol("110")) == (2, -2)
    assert mis_bi(triangle(), sol("000")) == (0, 0)
    assert mis_bi(p3(), sol("101")) == (2, 0)


def test_length_mismatch_errors():
    for fn in (mds_scalar, mvc_scalar, mis_scalar):
        with pytest.raises(ValueError):
            fn(p3(), sol("01"))


def test_is_feasible_examples():
    assert is_feasible(p3(), sol("010"), Problem.MDS)
    assert not is_feasible(p3(), sol("101"), Problem.CDS)
    assert not is_feasible(triangle(), sol("110"), Problem.MIS)
    assert is_feasible(triangle(), sol("110"), Problem.MVC)
    assert is_feasible(p3(), sol("101"), Problem.MIS)


def test_mds_feasibility_is_monotone():
    rng = np.random.Generator(np.random.Philox(7))
    for _ in range(40):
        g = random_graph(int(rng.integers(1, 10)), 0.3, rng)
        x = (rng.random(g.n) < 0.6).astype(np.uint8)
        if not is_feasible(g, x, Problem.MDS):
            continue
        y = x.copy()
        free = np.flatnonzero(y == 0)
        if len(free):
            y[free[0]] = 1
            assert is_feasible(g, y, Problem.MDS)


def test_scalar_bi_consistency():
    rng = np.random.Generator(np.random.Philox(8))
    for _ in range(60):
        n = int(rng.integers(1, 12))
        g = random_graph(n, 0.35, rng)
        x = (rng.random(n) < 0.5).astype(np.uint8)
        u, s = mds_bi(g, x)
        assert mds_scalar(g, x) == n * u + s
        c, s2 = mvc_bi(g, x)
        assert mvc_scalar(g, x) == (n + 1) * c + s2
        if g.is_connected():
            f, s3 = cds_bi(g, x)
            assert cds_scalar(g, x) == n * n * (f - 1) + s3
        a, b = mis_bi(g, x)
        assert mis_scalar(g, x) == a + n * b


def _layer_separation(g: Graph, problem: Problem):
    feas, infeas = [], []
    for x in solutions(g.n):
        v = scalar_fitness(g, x, problem)
        (feas if is_feasible(g, x, problem) else infeas).append((v, int(x.sum())))
    if not infeas:
        return
    best_infeasible = min(v for v, _ in infeas)
    if problem is Problem.MVC:
        # the (n+1) weight separates strictly even from the full vertex set
        assert best_infeasible > max(v for v, _ in feas)
    else:
        assert best_infeasible >= max(v for v, _ in feas)
        below_full = [v for v, s in feas if s < g.n]
        if below_full:
            assert best_infeasible > max(below_full)


def test_penalty_layer_separation_small_graphs():
    # every graph on up to 5 vertices
    for n in range(2, 6):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for mask in range(1 << len(pairs)):
            g = Graph(n, [e for k, e in enumerate(pairs) if (mask >> k) & 1])
            _layer_separation(g, Problem.MDS)
            _layer_separation(g, Problem.MVC)


def test_penalty_layer_separation_sampled_n6():
    rng = np.random.Generator(np.random.Philox(9))
    pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    for _ in range(300):
        mask = int(rng.integers(0, 1 << len(pairs)))
        g = Graph(6, [e for k, e in enumerate(pairs) if (mask >> k) & 1])
        _layer_separation(g, Problem.MDS)
        _layer_separation(g, Problem.MVC)


def test_approx_ratio_orientation():
    assert approx_ratio(3, 1, Problem.MDS).ratio == 3.0
    assert approx_ratio(2, 2, Problem.MIS).ratio == 1.0
    r = approx_ratio(5, 2, Problem.MDS, kind="lower-bound")
    assert r.ratio == 2.5 and r.reference_kind == "lower-bound"
    assert approx_ratio(2, 4, Problem.MIS).ratio == 2.0


def test_approx_ratio_rejects_zero_sizes():
    with pytest.raises(ValueError):
        approx_ratio(0, 1, Problem.MDS)
    with pytest.raises(ValueError):
        approx_ratio(1, 0, Problem.MDS)
    with pytest.raises(ValueError):
        approx_ratio(1, 1, Problem.MDS, kind="guess")


def test_bi_fitness_dispatch():
    g = p3()
    x = sol("010")
    assert bi_fitness(g, x, Problem.MDS) == mds_bi(g, x)
    assert bi_fitness(g, x, Problem.MVC) == mvc_bi(g, x)
    assert bi_fitness(g, x, Problem.CDS) == cds_bi(g, x)
    assert bi_fitness(g, x, Problem.MIS) == mis_bi(g, x)
