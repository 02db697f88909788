"""Single- and bi-objective fitness functions for the four covering problems.

All objective values are exact integers.  Penalty weights are chosen so
that every infeasible solution scores strictly worse than every feasible
solution that is not the full vertex set; the search therefore reaches
feasibility first and minimizes (or maximizes) size afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import (
    Graph,
    check_solution,
    conflict_count,
    selected_component_count,
    uncovered_edge_count,
    undominated_count,
)


class Problem(enum.Enum):
    """The four covering problems. MIS maximizes, the others minimize."""

    MDS = "mds"
    MVC = "mvc"
    CDS = "cds"
    MIS = "mis"

    @property
    def maximize(self) -> bool:
        return self is Problem.MIS

    @property
    def sense(self) -> str:
        return "maximize" if self.maximize else "minimize"


@dataclass(frozen=True)
class ApproxRatio:
    """Achieved size against a reference optimum (or bound), oriented so exact ratios are >= 1."""

    achieved: int
    reference: int
    ratio: float
    reference_kind: str  # exact | lower-bound | upper-bound


def _ones(x: np.ndarray) -> int:
    return int(np.count_nonzero(x))


def mds_scalar(g: Graph, x: np.ndarray) -> int:
    """n * undominated + selected count, to be minimized."""
    x = check_solution(g, x)
    return g.n * undominated_count(g, x) + _ones(x)


def mds_bi(g: Graph, x: np.ndarray) -> tuple[int, int]:
    """(undominated, selected count), both minimized."""
    x = check_solution(g, x)
    return (undominated_count(g, x), _ones(x))


def mvc_scalar(g: Graph, x: np.ndarray, literal_domination: bool = False) -> int:
    """(n+1) * uncovered edges + selected count, to be minimized.

    The penalty counts uncovered edges so that the zero-penalty set is a
    vertex cover, not merely a dominating set.  With
    ``literal_domination=True`` the domination penalty n*u(x) is used
    instead, for comparison runs; its minimum need not cover all edges.
    """
    x = check_solution(g, x)
    if literal_domination:
        return mds_scalar(g, x)
    return (g.n + 1) * uncovered_edge_count(g, x) + _ones(x)


def mvc_bi(g: Graph, x: np.ndarray, literal_domination: bool = False) -> tuple[int, int]:
    """(uncovered edges, selected count), both minimized."""
    x = check_solution(g, x)
    if literal_domination:
        return mds_bi(g, x)
    return (uncovered_edge_count(g, x), _ones(x))


def cds_scalar(g: Graph, x: np.ndarray) -> int:
    """n^2 * (undominated + components - 1) + selected count, to be minimized.

    Equals the selected count exactly when x is a connected dominating set.
    The graph must be connected, otherwise no feasible solution exists.
    """
    x = check_solution(g, x)
    if not g.is_connected():
        raise ValueError("CDS fitness requires a connected graph")
    u = undominated_count(g, x)
    w = selected_component_count(g, x)
    return g.n * g.n * (u + w - 1) + _ones(x)


def cds_bi(g: Graph, x: np.ndarray) -> tuple[int, int]:
    """(undominated + components, selected count), both minimized."""
    x = check_solution(g, x)
    if not g.is_connected():
        raise ValueError("CDS fitness requires a connected graph")
    return (undominated_count(g, x) + selected_component_count(g, x), _ones(x))


def mis_scalar(g: Graph, x: np.ndarray) -> int:
    """Selected count minus n * (ordered adjacent selected pairs), to be maximized."""
    x = check_solution(g, x)
    return _ones(x) - g.n * conflict_count(g, x)


def mis_bi(g: Graph, x: np.ndarray) -> tuple[int, int]:
    """(selected count, -conflicts), both maximized."""
    x = check_solution(g, x)
    return (_ones(x), -conflict_count(g, x))


def scalar_fitness(g: Graph, x: np.ndarray, problem: Problem, mvc_literal: bool = False) -> int:
    if problem is Problem.MDS:
        return mds_scalar(g, x)
    if problem is Problem.MVC:
        return mvc_scalar(g, x, literal_domination=mvc_literal)
    if problem is Problem.CDS:
        return cds_scalar(g, x)
    return mis_scalar(g, x)


def bi_fitness(g: Graph, x: np.ndarray, problem: Problem, mvc_literal: bool = False) -> tuple[int, int]:
    if problem is Problem.MDS:
        return mds_bi(g, x)
    if problem is Problem.MVC:
        return mvc_bi(g, x, literal_domination=mvc_literal)
    if problem is Problem.CDS:
        return cds_bi(g, x)
    return mis_bi(g, x)


def is_feasible(g: Graph, x: np.ndarray, problem: Problem) -> bool:
    """Feasibility per problem: dominating / covering / connected dominating / independent."""
    x = check_solution(g, x)
    if problem is Problem.MDS:
        return undominated_count(g, x) == 0
    if problem is Problem.MVC:
        return uncovered_edge_count(g, x) == 0
    if problem is Problem.CDS:
        return undominated_count(g, x) == 0 and selected_component_count(g, x) == 1
    return conflict_count(g, x) == 0


def approx_ratio(achieved: int, reference: int, problem: Problem, kind: str = "exact") -> ApproxRatio:
    """Size ratio oriented by the problem sense: achieved/reference when minimizing, flipped when maximizing."""
    if achieved < 1 or reference < 1:
        raise ValueError("sizes must be positive to form a ratio")
    if kind not in ("exact", "lower-bound", "upper-bound"):
        raise ValueError(f"unknown reference kind {kind!r}")
    if problem.maximize:
        ratio = reference / achieved
    else:
        ratio = achieved / reference
    return ApproxRatio(achieved=int(achieved), reference=int(reference), ratio=ratio, reference_kind=kind)
