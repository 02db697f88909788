"""The (1+1) EA and the Pareto-archive search, with exact evaluation accounting.

Both engines draw all randomness from a per-trial Philox stream: n uniform
draws for the initial solution, then exactly one block of n Bernoulli draws
per offspring (plus one parent-index draw for the archive search), so runs
are reproducible bit-for-bit regardless of worker count.

The (1+1) EA keeps incremental penalty counters and touches only the flipped
vertices' neighborhoods per step; component counts (CDS) are recomputed per
evaluation.  The archive search evaluates offspring from scratch on a bitmask
representation.  Both evaluation paths are checked against the plain fitness
functions in the test suite.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fitness import Problem
from .generators import rng_from_seed
from .graph import Graph

Vector = tuple[int, int]


@dataclass(frozen=True)
class RunBudget:
    """Evaluation cap plus an optional size target that ends the run early.

    The target is met once a feasible solution of size <= target is held
    (>= target for the maximizing problem).
    """

    max_evaluations: int
    target: int | None = None

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")


@dataclass
class StepInfo:
    """Per-iteration observation passed to the (1+1) EA on_step hook."""

    evals: int
    accepted: bool
    value_before: int
    value_after: int
    potential_before: int | None
    potential_after: int | None


@dataclass
class TrialRecord:
    seed: int
    problem: str
    algorithm: str
    n: int
    m: int
    evals_total: int
    evals_to_feasible: int | None
    first_feasible_size: int | None
    best_feasible_size: int | None
    best_solution: np.ndarray | None
    final_solution: np.ndarray | None  # (1+1) EA incumbent at stop
    archive: list[tuple[Vector, np.ndarray]] | None
    wall_time: float


def mutate(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Standard bit mutation: flip each bit independently with probability 1/n."""
    n = x.shape[0]
    flips = rng.random(n) < (1.0 / n)
    y = x.copy()
    y[flips] ^= 1
    return y


def dominates(p: Sequence[float], q: Sequence[float], sense: Sequence[str]) -> str:
    """Classify p against q per component orientation: 'strict', 'weak', or 'none'.

    'weak' means p is at least as good as q everywhere (equality included);
    'strict' additionally requires p better somewhere.
    """
    if len(p) != len(q) or len(p) != len(sense):
        raise ValueError("objective arity mismatch")
    better = False
    for pi, qi, s in zip(p, q, sense):
        if s == "min":
            if pi > qi:
                return "none"
            if pi < qi:
                better = True
        elif s == "max":
            if pi < qi:
                return "none"
            if pi > qi:
                better = True
        else:
            raise ValueError(f"unknown sense {s!r}")
    return "strict" if better else "weak"


class ParetoArchive:
    """Mutually non-dominated solutions, at most one per objective vector.

    An offspring enters only if no member weakly dominates it (a vector tie
    therefore rejects the offspring and keeps the incumbent); on entry every
    member the offspring weakly dominates is dropped.
    """

    def __init__(self, sense: Sequence[str]):
        self.sense = tuple(sense)
        self.entries: list[tuple[Vector, object]] = []

    def __len__(self) -> int:
        return len(self.entries)

    def try_insert(self, vector: Vector, solution) -> bool:
        sense = self.sense
        for vec, _ in self.entries:
            if dominates(vec, vector, sense) != "none":
                return False
        self.entries = [e for e in self.entries if dominates(vector, e[0], sense) == "none"]
        self.entries.append((vector, solution))
        return True

    def vectors(self) -> list[Vector]:
        return [vec for vec, _ in self.entries]

    def audit(self) -> None:
        """Raise if any pair of entries is weakly comparable or a vector repeats."""
        vecs = self.vectors()
        if len(set(vecs)) != len(vecs):
            raise AssertionError("duplicate objective vector in archive")
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i != j and dominates(vecs[i], vecs[j], self.sense) != "none":
                    raise AssertionError(f"archive entries comparable: {vecs[i]} vs {vecs[j]}")


# ---------------------------------------------------------------------------
# incremental scalar states for the (1+1) EA


class _MdsState:
    """n*u + ones with per-vertex cover counts updated on each flip."""

    def __init__(self, g: Graph, bits: np.ndarray):
        self.g = g
        self.n = g.n
        self.bits = bytearray(int(b) for b in bits)
        cover = [0] * g.n
        for v in range(g.n):
            if self.bits[v]:
                cover[v] += 1
                for u in g.neighbors[v]:
                    cover[u] += 1
        self.cover = cover
        self.undom = sum(1 for c in cover if c == 0)
        self.ones = sum(self.bits)

    def flip(self, v: int) -> None:
        cover = self.cover
        nbrs = self.g.neighbors[v]
        if self.bits[v]:
            self.bits[v] = 0
            self.ones -= 1
            cover[v] -= 1
            if cover[v] == 0:
                self.undom += 1
            for u in nbrs:
                cover[u] -= 1
                if cover[u] == 0:
                    self.undom += 1
        else:
            self.bits[v] = 1
            self.ones += 1
            if cover[v] == 0:
                self.undom -= 1
            cover[v] += 1
            for u in nbrs:
                if cover[u] == 0:
                    self.undom -= 1
                cover[u] += 1

    def value(self) -> int:
        return self.n * self.undom + self.ones

    def feasible(self) -> bool:
        return self.undom == 0

    def potential(self) -> int:
        return self.undom

    def size(self) -> int:
        return self.ones

    def solution(self) -> np.ndarray:
        return np.frombuffer(bytes(self.bits), dtype=np.uint8).copy()


class _MvcState:
    """(n+1)*uncovered_edges + ones with the uncovered count updated on each flip."""

    def __init__(self, g: Graph, bits: np.ndarray):
        self.g = g
        self.n = g.n
        self.bits = bytearray(int(b) for b in bits)
        unc = 0
        for u, v in g.edges:
            if not self.bits[u] and not self.bits[v]:
                unc += 1
        self.uncovered = unc
        self.ones = sum(self.bits)

    def flip(self, v: int) -> None:
        bits = self.bits
        exposed = sum(1 for u in self.g.neighbors[v] if not bits[u])
        if bits[v]:
            bits[v] = 0
            self.ones -= 1
            self.uncovered += exposed
        else:
            bits[v] = 1
            self.ones += 1
            self.uncovered -= exposed

    def value(self) -> int:
        return (self.n + 1) * self.uncovered + self.ones

    def feasible(self) -> bool:
        return self.uncovered == 0

    def potential(self) -> int:
        return self.uncovered

    def size(self) -> int:
        return self.ones

    def solution(self) -> np.ndarray:
        return np.frombuffer(bytes(self.bits), dtype=np.uint8).copy()


class _MvcLiteralState(_MdsState):
    """Domination fitness n*u + ones, but feasibility still means covering all edges.

    Comparison variant: its zero-penalty sets are dominating sets, so the
    search may converge without ever holding a vertex cover.
    """

    def __init__(self, g: Graph, bits: np.ndarray):
        super().__init__(g, bits)
        unc = 0
        for u, v in g.edges:
            if not self.bits[u] and not self.bits[v]:
                unc += 1
        self.uncovered = unc

    def flip(self, v: int) -> None:
        exposed = sum(1 for u in self.g.neighbors[v] if not self.bits[u])
        if self.bits[v]:
            self.uncovered += exposed
        else:
            self.uncovered -= exposed
        super().flip(v)

    def feasible(self) -> bool:
        return self.uncovered == 0


class _CdsState:
    """n^2*(u + w - 1) + ones; u incremental, component count w recomputed per evaluation."""

    def __init__(self, g: Graph, bits: np.ndarray):
        if not g.is_connected():
            raise ValueError("CDS search requires a connected graph")
        self.g = g
        self.n = g.n
        self.inner = _MdsState(g, bits)
        self.w = self._count_components()
        self._stale = False

    def _count_components(self) -> int:
        g = self.g
        bits = self.inner.bits
        seen = bytearray(g.n)
        comps = 0
        for s in range(g.n):
            if not bits[s] or seen[s]:
                continue
            comps += 1
            seen[s] = 1
            stack = [s]
            while stack:
                v = stack.pop()
                for u in g.neighbors[v]:
                    if bits[u] and not seen[u]:
                        seen[u] = 1
                        stack.append(u)
        return comps

    def flip(self, v: int) -> None:
        self.inner.flip(v)
        self._stale = True

    def value(self) -> int:
        if self._stale:
            self.w = self._count_components()
            self._stale = False
        return self.n * self.n * (self.inner.undom + self.w - 1) + self.inner.ones

    def feasible(self) -> bool:
        if self._stale:
            self.w = self._count_components()
            self._stale = False
        return self.inner.undom == 0 and self.w == 1

    def potential(self) -> int:
        if self._stale:
            self.w = self._count_components()
            self._stale = False
        return self.inner.undom + self.w - 1

    def size(self) -> int:
        return self.inner.ones

    def solution(self) -> np.ndarray:
        return self.inner.solution()


class _MisState:
    """ones - n*conflicts (maximized) with the ordered-conflict count updated per flip."""

    def __init__(self, g: Graph, bits: np.ndarray):
        self.g = g
        self.n = g.n
        self.bits = bytearray(int(b) for b in bits)
        conf = 0
        for u, v in g.edges:
            if self.bits[u] and self.bits[v]:
                conf += 2
        self.conflicts = conf
        self.ones = sum(self.bits)

    def flip(self, v: int) -> None:
        bits = self.bits
        picked = sum(1 for u in self.g.neighbors[v] if bits[u])
        if bits[v]:
            bits[v] = 0
            self.ones -= 1
            self.conflicts -= 2 * picked
        else:
            bits[v] = 1
            self.ones += 1
            self.conflicts += 2 * picked

    def value(self) -> int:
        return self.ones - self.n * self.conflicts

    def feasible(self) -> bool:
        return self.conflicts == 0

    def potential(self) -> None:
        return None

    def size(self) -> int:
        return self.ones

    def solution(self) -> np.ndarray:
        return np.frombuffer(bytes(self.bits), dtype=np.uint8).copy()


def _make_state(g: Graph, problem: Problem, bits: np.ndarray, mvc_literal: bool):
    if problem is Problem.MDS:
        return _MdsState(g, bits)
    if problem is Problem.MVC:
        return _MvcLiteralState(g, bits) if mvc_literal else _MvcState(g, bits)
    if problem is Problem.CDS:
        return _CdsState(g, bits)
    return _MisState(g, bits)


def _target_met(best: int | None, target: int | None, maximize: bool) -> bool:
    if best is None or target is None:
        return False
    return best >= target if maximize else best <= target


def one_plus_one_ea(
    g: Graph,
    problem: Problem,
    budget: RunBudget,
    seed: int,
    mvc_literal: bool = False,
    on_step: Callable[[StepInfo], None] | None = None,
) -> TrialRecord:
    """Single-incumbent search: mutate, then keep the offspring on ties or improvement."""
    t0 = time.perf_counter()
    rng = rng_from_seed(seed)
    n = g.n
    state = _make_state(g, problem, rng.integers(0, 2, size=n, dtype=np.uint8), mvc_literal)
    maximize = problem.maximize
    evals = 1
    cur = state.value()

    evals_to_feasible = None
    first_size = None
    best_size = None
    best_solution = None

    def note_feasible():
        nonlocal evals_to_feasible, first_size, best_size, best_solution
        size = state.size()
        if evals_to_feasible is None:
            evals_to_feasible = evals
            first_size = size
        if best_size is None or (size > best_size if maximize else size < best_size):
            best_size = size
            best_solution = state.solution()

    if state.feasible():
        note_feasible()

    p = 1.0 / n
    max_evals = budget.max_evaluations
    # one Bernoulli block per offspring, drawn in batches; row-major blocks keep
    # the draw stream identical to per-offspring rng.random(n) calls
    block = max(64, min(4096, 262144 // max(n, 1)))
    done = False
    while not done and evals < max_evals and not _target_met(best_size, budget.target, maximize):
        k = min(block, max_evals - evals)
        hits = rng.random((k, n)) < p
        rows, cols = np.nonzero(hits)
        offsets = np.zeros(k + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=k), out=offsets[1:])
        flip_pool = cols.tolist()
        for i in range(k):
            flips = flip_pool[offsets[i]:offsets[i + 1]]
            evals += 1
            if not flips:
                # offspring identical to the parent: evaluated and tie-accepted
                if on_step is not None:
                    pot = state.potential()
                    on_step(StepInfo(evals, True, cur, cur, pot, pot))
                continue
            pot_before = state.potential() if on_step is not None else None
            for v in flips:
                state.flip(v)
            new = state.value()
            accepted = new >= cur if maximize else new <= cur
            if accepted:
                old = cur
                cur = new
                if state.feasible():
                    note_feasible()
                if on_step is not None:
                    on_step(StepInfo(evals, True, old, new, pot_before, state.potential()))
            else:
                for v in reversed(flips):
                    state.flip(v)
                if on_step is not None:
                    on_step(StepInfo(evals, False, cur, cur, pot_before, pot_before))
            if _target_met(best_size, budget.target, maximize):
                done = True
                break

    return TrialRecord(
        seed=seed,
        problem=problem.value,
        algorithm="ea",
        n=n,
        m=g.m,
        evals_total=evals,
        evals_to_feasible=evals_to_feasible,
        first_feasible_size=first_size,
        best_feasible_size=best_size,
        best_solution=best_solution,
        final_solution=state.solution(),
        archive=None,
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# bitmask evaluators for the archive search


def _mask_bi_evaluator(g: Graph, problem: Problem, mvc_literal: bool):
    n = g.n
    nbr = [0] * n
    for v in range(n):
        m = 0
        for u in g.neighbors[v]:
            m |= 1 << u
        nbr[v] = m
    closed = [m | (1 << v) for v, m in enumerate(nbr)]
    full = (1 << n) - 1

    def undominated(x: int) -> int:
        return sum(1 for cm in closed if not cm & x)

    if problem is Problem.MDS or (problem is Problem.MVC and mvc_literal):
        return lambda x: (undominated(x), x.bit_count())

    if problem is Problem.MVC:

        def mvc(x: int) -> Vector:
            out = full & ~x
            twice = 0
            f = out
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                twice += (nbr[v] & out).bit_count()
            return (twice // 2, x.bit_count())

        return mvc

    if problem is Problem.CDS:
        if not g.is_connected():
            raise ValueError("CDS search requires a connected graph")

        def components(x: int) -> int:
            comps = 0
            rem = x
            while rem:
                comps += 1
                comp = rem & -rem
                frontier = comp
                while frontier:
                    nxt = 0
                    f = frontier
                    while f:
                        v = (f & -f).bit_length() - 1
                        f &= f - 1
                        nxt |= nbr[v]
                    nxt &= x & ~comp
                    comp |= nxt
                    frontier = nxt
                rem &= ~comp
            return comps

        return lambda x: (undominated(x) + components(x), x.bit_count())

    def mis(x: int) -> Vector:
        conf = 0
        f = x
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            conf += (nbr[v] & x).bit_count()
        return (x.bit_count(), -conf)

    return mis


def _vector_feasible(vec: Vector, problem: Problem) -> bool:
    if problem is Problem.CDS:
        return vec[0] == 1 and vec[1] >= 1
    if problem is Problem.MIS:
        return vec[1] == 0
    return vec[0] == 0


def _vector_size(vec: Vector, problem: Problem) -> int:
    return vec[0] if problem is Problem.MIS else vec[1]


def problem_sense(problem: Problem) -> tuple[str, str]:
    return ("max", "max") if problem.maximize else ("min", "min")


def gsemo(
    g: Graph,
    problem: Problem,
    budget: RunBudget,
    seed: int,
    mvc_literal: bool = False,
    audit_every: int = 1000,
) -> TrialRecord:
    """Archive-based bi-objective search: mutate a uniformly chosen member, keep non-dominated offspring."""
    t0 = time.perf_counter()
    rng = rng_from_seed(seed)
    n = g.n
    evaluate = _mask_bi_evaluator(g, problem, mvc_literal)
    sense = problem_sense(problem)
    maximize = problem.maximize

    if problem is Problem.MVC and mvc_literal:
        # the domination vector cannot tell cover feasibility; recheck the mask
        nbr = [0] * n
        for v in range(n):
            m = 0
            for u in g.neighbors[v]:
                m |= 1 << u
            nbr[v] = m
        full = (1 << n) - 1

        def entry_feasible(vector: Vector, mask_: int) -> bool:
            out = full & ~mask_
            f = out
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                if nbr[v] & out:
                    return False
            return True

    else:

        def entry_feasible(vector: Vector, mask_: int) -> bool:
            return _vector_feasible(vector, problem)

    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    mask = 0
    for v in np.flatnonzero(bits):
        mask |= 1 << int(v)

    archive = ParetoArchive(sense)
    vec = evaluate(mask)
    archive.try_insert(vec, mask)
    evals = 1

    evals_to_feasible = None
    first_size = None
    best_size = None

    def note(vector: Vector, mask_: int) -> None:
        nonlocal evals_to_feasible, first_size, best_size
        if not entry_feasible(vector, mask_):
            return
        size = _vector_size(vector, problem)
        if evals_to_feasible is None:
            evals_to_feasible = evals
            first_size = size
        if best_size is None or (size > best_size if maximize else size < best_size):
            best_size = size

    note(vec, mask)
    p = 1.0 / n
    max_evals = budget.max_evaluations
    while evals < max_evals and not _target_met(best_size, budget.target, maximize):
        parent = archive.entries[int(rng.integers(len(archive.entries)))][1]
        flips = np.flatnonzero(rng.random(n) < p)
        y = parent
        for v in flips:
            y ^= 1 << int(v)
        vec = evaluate(y)
        evals += 1
        if archive.try_insert(vec, y):
            note(vec, y)
        if audit_every and evals % audit_every == 0:
            archive.audit()
            if len(archive) > n + 1:
                raise AssertionError("archive exceeded n + 1 entries")

    # report the best feasible member of the final archive
    final_best = None
    best_solution = None
    for v, s in archive.entries:
        if entry_feasible(v, int(s)):
            size = _vector_size(v, problem)
            if final_best is None or (size > final_best if maximize else size < final_best):
                final_best = size
                best_solution = _mask_to_array(int(s), n)
    snapshot = [(v, _mask_to_array(int(s), n)) for v, s in archive.entries]

    return TrialRecord(
        seed=seed,
        problem=problem.value,
        algorithm="gsemo",
        n=n,
        m=g.m,
        evals_total=evals,
        evals_to_feasible=evals_to_feasible,
        first_feasible_size=first_size,
        best_feasible_size=final_best,
        best_solution=best_solution,
        final_solution=None,
        archive=snapshot,
        wall_time=time.perf_counter() - t0,
    )


def _mask_to_array(mask: int, n: int) -> np.ndarray:
    x = np.zeros(n, dtype=np.uint8)
    while mask:
        v = (mask & -mask).bit_length() - 1
        mask &= mask - 1
        x[v] = 1
    return x


def _trial_worker(args) -> TrialRecord:
    g, problem, algo, budget, seed, mvc_literal = args
    if algo == "ea":
        return one_plus_one_ea(g, problem, budget, seed, mvc_literal=mvc_literal)
    if algo == "gsemo":
        return gsemo(g, problem, budget, seed, mvc_literal=mvc_literal)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_trials(
    g: Graph,
    problem: Problem,
    algo: str,
    budget: RunBudget,
    seeds: Sequence[int],
    workers: int = 1,
    mvc_literal: bool = False,
) -> list[TrialRecord]:
    """One independent record per seed; output order matches the seed list regardless of workers."""
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    payloads = [(g, problem, algo, budget, int(s), mvc_literal) for s in seeds]
    if workers <= 1:
        return [_trial_worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_trial_worker, payloads))
