"""Shared builders and brute-force references for the test suite."""

from __future__ import annotations

import itertools

import numpy as np

from plbcover import GenSpec, Graph, generate, is_feasible
from plbcover.fitness import Problem


def p3() -> Graph:
    return Graph(3, [(0, 1), (1, 2)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def triangle() -> Graph:
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


def star(leaves: int = 4) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def k2() -> Graph:
    return Graph(2, [(0, 1)])


def complete(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, edges)


def pa(n: int, attach_m: int, seed: int) -> Graph:
    return generate(GenSpec(model="pa", n=n, attach_m=attach_m, seed=seed))


def solutions(n: int):
    """All 2^n bit vectors, lowest-index bit first."""
    for bits in itertools.product((0, 1), repeat=n):
        yield np.array(bits, dtype=np.uint8)


def sol(bits: str) -> np.ndarray:
    return np.array([int(b) for b in bits], dtype=np.uint8)


def brute_force_optimum(g: Graph, problem: Problem) -> int | None:
    """Optimum size by full enumeration; None when no feasible solution exists."""
    best = None
    for x in solutions(g.n):
        if is_feasible(g, x, problem):
            s = int(x.sum())
            if best is None or (s > best if problem.maximize else s < best):
                best = s
    return best
