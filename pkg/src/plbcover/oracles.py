"""Ground truth for the search engines: exact solvers, greedy constructions, bounds.

Exact solving is branch-and-bound over bitmask subproblems, seeded with the
greedy incumbent; it refuses instances above a vertex limit (default 26,
override with PLBCOVER_EXACT_LIMIT).  The greedy constructions follow fixed
lowest-id tie-breaking so their traces are reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .fitness import Problem
from .graph import Graph, check_solution, conflict_count, undominated_count

DEFAULT_EXACT_LIMIT = 26


class InstanceTooLarge(Exception):
    """Raised when exact solving is refused because the instance exceeds the vertex limit."""


@dataclass
class OracleResult:
    problem: Problem
    optimum_size: int
    witness: np.ndarray
    method: str  # exact | greedy | bound
    # greedy only: list of (vertex picked, progress value after the pick)
    sequence_trace: list[tuple[int, int]] | None = None


def exact_limit() -> int:
    return int(os.environ.get("PLBCOVER_EXACT_LIMIT", DEFAULT_EXACT_LIMIT))


def _nbr_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for v in range(g.n):
        m = 0
        for u in g.neighbors[v]:
            m |= 1 << u
        masks[v] = m
    return masks


def _closed_masks(g: Graph) -> list[int]:
    return [m | (1 << v) for v, m in enumerate(_nbr_masks(g))]


def _mask_to_solution(mask: int, n: int) -> np.ndarray:
    x = np.zeros(n, dtype=np.uint8)
    while mask:
        v = (mask & -mask).bit_length() - 1
        mask &= mask - 1
        x[v] = 1
    return x


def _solution_to_mask(x: np.ndarray) -> int:
    mask = 0
    for v in np.flatnonzero(x):
        mask |= 1 << int(v)
    return mask


def _mask_component_count(sel: int, nbr: list[int]) -> int:
    comps = 0
    rem = sel
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
            nxt &= sel & ~comp
            comp |= nxt
            frontier = nxt
        rem &= ~comp
    return comps


def exact_solve(g: Graph, problem: Problem, limit: int | None = None) -> OracleResult:
    """Branch-and-bound optimum (min for MDS/MVC/CDS, max for MIS); refuses n above the limit."""
    lim = exact_limit() if limit is None else limit
    if g.n > lim:
        raise InstanceTooLarge(f"instance too large for exact solving: n={g.n} > limit={lim}")
    if problem is Problem.CDS and not g.is_connected():
        raise ValueError("no connected dominating set exists in a disconnected graph")
    if problem is Problem.MIS:
        size, mask = _mis_exact(g)
    elif problem is Problem.MVC:
        mis_size, mis_mask = _mis_exact(g)
        size = g.n - mis_size
        mask = ((1 << g.n) - 1) & ~mis_mask
    elif problem is Problem.MDS:
        size, mask = _mds_exact(g)
    else:
        size, mask = _cds_exact(g)
    return OracleResult(problem=problem, optimum_size=size,
                        witness=_mask_to_solution(mask, g.n), method="exact")


def _mis_exact(g: Graph) -> tuple[int, int]:
    n = g.n
    if n == 0:
        return 0, 0
    nbr = _nbr_masks(g)
    seed = greedy_mis(g)
    best_size = seed.optimum_size
    best_mask = _solution_to_mask(seed.witness)

    def rec(free: int, cur_size: int, cur_mask: int):
        nonlocal best_size, best_mask
        # take isolated and degree-1 vertices greedily (always safe for MIS)
        changed = True
        while changed and free:
            changed = False
            f = free
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                if not (free >> v) & 1:
                    continue
                resid = nbr[v] & free
                if resid == 0:
                    free &= ~(1 << v)
                    cur_mask |= 1 << v
                    cur_size += 1
                    changed = True
                elif resid & (resid - 1) == 0:
                    free &= ~((1 << v) | resid)
                    cur_mask |= 1 << v
                    cur_size += 1
                    changed = True
        if cur_size > best_size:
            best_size, best_mask = cur_size, cur_mask
        if not free or cur_size + free.bit_count() <= best_size:
            return
        # branch on a max-residual-degree vertex
        pivot, pivot_deg = -1, -1
        f = free
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            d = (nbr[v] & free).bit_count()
            if d > pivot_deg:
                pivot, pivot_deg = v, d
        rec(free & ~(nbr[pivot] | (1 << pivot)), cur_size + 1, cur_mask | (1 << pivot))
        rec(free & ~(1 << pivot), cur_size, cur_mask)

    rec((1 << n) - 1, 0, 0)
    return best_size, best_mask


def _mds_exact(g: Graph) -> tuple[int, int]:
    n = g.n
    if n == 0:
        return 0, 0
    closed = _closed_masks(g)
    full = (1 << n) - 1
    seed = greedy_mds(g)
    best_size = seed.optimum_size
    best_mask = _solution_to_mask(seed.witness)

    def rec(sel: int, count: int, dominated: int, banned: int):
        nonlocal best_size, best_mask
        if dominated == full:
            if count < best_size:
                best_size, best_mask = count, sel
            return
        avail = full & ~banned & ~sel
        undom = full & ~dominated
        max_cov = 0
        f = avail
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            c = (closed[v] & undom).bit_count()
            if c > max_cov:
                max_cov = c
        if max_cov == 0:
            return
        if count + (undom.bit_count() + max_cov - 1) // max_cov >= best_size:
            return
        # dominate the most constrained vertex first
        pick, options, opt_count = -1, 0, n + 1
        f = undom
        while f:
            u = (f & -f).bit_length() - 1
            f &= f - 1
            opts = closed[u] & avail
            k = opts.bit_count()
            if k == 0:
                return
            if k < opt_count:
                pick, options, opt_count = u, opts, k
        extra_ban = 0
        f = options
        while f:
            w = (f & -f).bit_length() - 1
            f &= f - 1
            rec(sel | (1 << w), count + 1, dominated | closed[w], banned | extra_ban)
            extra_ban |= 1 << w

    rec(0, 0, 0, 0)
    return best_size, best_mask


def _cds_exact(g: Graph) -> tuple[int, int]:
    n = g.n
    if n == 1:
        return 1, 1
    nbr = _nbr_masks(g)
    closed = [m | (1 << v) for v, m in enumerate(nbr)]
    full = (1 << n) - 1
    seed = greedy_cds(g)
    best_size = seed.optimum_size
    best_mask = _solution_to_mask(seed.witness)

    def connectable(sel: int, avail: int) -> bool:
        # all selected vertices mutually reachable through selected | avail
        allowed = sel | avail
        comp = sel & -sel
        frontier = comp
        while frontier:
            nxt = 0
            f = frontier
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                nxt |= nbr[v]
            nxt &= allowed & ~comp
            comp |= nxt
            frontier = nxt
        return sel & ~comp == 0

    def rec(sel: int, count: int, dominated: int, banned: int):
        nonlocal best_size, best_mask
        comps = _mask_component_count(sel, nbr)
        if dominated == full and comps == 1:
            if count < best_size:
                best_size, best_mask = count, sel
            return
        avail = full & ~banned & ~sel
        if sel and not connectable(sel, avail):
            return
        undom = full & ~dominated
        need_conn = max(0, comps - 1)
        need_dom = 0
        if undom:
            max_cov = 0
            f = avail
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                c = (closed[v] & undom).bit_count()
                if c > max_cov:
                    max_cov = c
            if max_cov == 0:
                return
            need_dom = (undom.bit_count() + max_cov - 1) // max_cov
        if count + max(need_dom, need_conn, 1) >= best_size:
            return
        if undom:
            pick, options, opt_count = -1, 0, n + 1
            f = undom
            while f:
                u = (f & -f).bit_length() - 1
                f &= f - 1
                opts = closed[u] & avail
                k = opts.bit_count()
                if k == 0:
                    return
                if k < opt_count:
                    pick, options, opt_count = u, opts, k
        else:
            # dominated but split: some neighbor of the selected set joins components
            boundary = 0
            f = sel
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                boundary |= nbr[v]
            options = boundary & avail
            if options == 0:
                return
        extra_ban = 0
        f = options
        while f:
            w = (f & -f).bit_length() - 1
            f &= f - 1
            rec(sel | (1 << w), count + 1, dominated | closed[w], banned | extra_ban)
            extra_ban |= 1 << w

    rec(0, 0, 0, 0)
    return best_size, best_mask


def greedy_mds(g: Graph) -> OracleResult:
    """Repeatedly pick the vertex that newly dominates the most undominated vertices.

    Candidates are all unselected vertices and a pick's gain is its closed
    neighborhood restricted to the undominated set, so each step removes at
    least an undominated-count/OPT fraction (the pigeonhole over an optimal
    set).  Ties break to the lowest id; the trace records the undominated
    count after each pick.
    """
    n = g.n
    dominated = bytearray(n)
    selected = bytearray(n)
    remaining = n
    chosen = []
    trace = []
    while remaining > 0:
        best_v, best_gain = -1, 0
        for v in range(n):
            if selected[v]:
                continue
            gain = 0 if dominated[v] else 1
            for u in g.neighbors[v]:
                if not dominated[u]:
                    gain += 1
            if gain > best_gain:
                best_v, best_gain = v, gain
        v = best_v
        selected[v] = 1
        chosen.append(v)
        if not dominated[v]:
            dominated[v] = 1
            remaining -= 1
        for u in g.neighbors[v]:
            if not dominated[u]:
                dominated[u] = 1
                remaining -= 1
        trace.append((v, remaining))
    witness = np.zeros(n, dtype=np.uint8)
    witness[chosen] = 1
    return OracleResult(problem=Problem.MDS, optimum_size=len(chosen), witness=witness,
                        method="greedy", sequence_trace=trace)


def greedy_cds(g: Graph) -> OracleResult:
    """Grow a connected dominating set by the largest drop of undominated + components.

    Ties break to the lowest id; the trace records the potential
    u(S) + w(S) after each pick.
    """
    if not g.is_connected():
        raise ValueError("greedy CDS requires a connected graph")
    n = g.n
    sel = bytearray(n)
    dominated = bytearray(n)
    chosen: list[int] = []
    trace: list[tuple[int, int]] = []
    undom = n
    comps = 0
    while not (undom == 0 and comps == 1):
        labels = _component_labels(g, sel)
        best_v, best_gain = -1, None
        for v in range(n):
            if sel[v]:
                continue
            dom_gain = 0 if dominated[v] else 1
            adj_labels = set()
            for u in g.neighbors[v]:
                if not dominated[u]:
                    dom_gain += 1
                if sel[u]:
                    adj_labels.add(labels[u])
            # f = u + w changes by -dom_gain + (1 - merged component count)
            gain = dom_gain + len(adj_labels) - 1
            if best_gain is None or gain > best_gain:
                best_v, best_gain = v, gain
        v = best_v
        sel[v] = 1
        chosen.append(v)
        if not dominated[v]:
            dominated[v] = 1
            undom -= 1
        for u in g.neighbors[v]:
            if not dominated[u]:
                dominated[u] = 1
                undom -= 1
        merged = set()
        for u in g.neighbors[v]:
            if sel[u] and u != v:
                merged.add(labels[u])
        comps += 1 - len(merged)
        trace.append((v, undom + comps))
    witness = np.frombuffer(bytes(sel), dtype=np.uint8).copy()
    return OracleResult(problem=Problem.CDS, optimum_size=len(chosen), witness=witness,
                        method="greedy", sequence_trace=trace)


def _component_labels(g: Graph, sel: bytearray) -> list[int]:
    labels = [-1] * g.n
    next_label = 0
    for s in range(g.n):
        if not sel[s] or labels[s] >= 0:
            continue
        labels[s] = next_label
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.neighbors[v]:
                if sel[u] and labels[u] < 0:
                    labels[u] = next_label
                    stack.append(u)
        next_label += 1
    return labels


def greedy_mis(g: Graph) -> OracleResult:
    """Repeatedly take the min-residual-degree vertex and delete its closed neighborhood.

    Ties break to the lowest id; the trace records the residual vertex count
    after each pick.  The output size is at least n / (average degree + 1).
    """
    n = g.n
    alive = bytearray([1]) * n
    resid_deg = [int(d) for d in g.degree]
    alive_count = n
    chosen = []
    trace = []
    while alive_count > 0:
        best_v, best_d = -1, n + 1
        for v in range(n):
            if alive[v] and resid_deg[v] < best_d:
                best_v, best_d = v, resid_deg[v]
        v = best_v
        chosen.append(v)
        removed = [v] + [u for u in g.neighbors[v] if alive[u]]
        for u in removed:
            alive[u] = 0
        alive_count -= len(removed)
        for u in removed:
            for w in g.neighbors[u]:
                if alive[w]:
                    resid_deg[w] -= 1
        trace.append((v, alive_count))
    witness = np.zeros(n, dtype=np.uint8)
    witness[chosen] = 1
    return OracleResult(problem=Problem.MIS, optimum_size=len(chosen), witness=witness,
                        method="greedy", sequence_trace=trace)


def is_3_local_optimum(g: Graph, x: np.ndarray) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Whether no swap touching at most 3 vertices improves the independent set.

    Requires x independent.  Returns (True, None) or (False, (removed, added))
    with one improving move.  For a feasible set the only improving moves are
    adding a free vertex, or trading one member for two non-adjacent outside
    vertices blocked only by it.
    """
    x = check_solution(g, x)
    if conflict_count(g, x) != 0:
        raise ValueError("solution is not an independent set")
    sel = np.flatnonzero(x)
    in_set = bytearray(g.n)
    for v in sel:
        in_set[v] = 1
    blocked_by: dict[int, list[int]] = {int(v): [] for v in sel}
    for v in range(g.n):
        if in_set[v]:
            continue
        sel_nbrs = [u for u in g.neighbors[v] if in_set[u]]
        if not sel_nbrs:
            return False, ((), (v,))
        if len(sel_nbrs) == 1:
            blocked_by[sel_nbrs[0]].append(v)
    for u, cands in blocked_by.items():
        for i in range(len(cands)):
            nb = set(g.neighbors[cands[i]])
            for j in range(i + 1, len(cands)):
                if cands[j] not in nb:
                    return False, ((u,), (cands[i], cands[j]))
    return True, None


def greedy_maximal_matching(g: Graph) -> int:
    """Number of edges in the first-fit maximal matching over the sorted edge list."""
    used = bytearray(g.n)
    size = 0
    for u, v in g.edges:
        if not used[u] and not used[v]:
            used[u] = used[v] = 1
            size += 1
    return size


def size_bounds(g: Graph, problem: Problem) -> tuple[int, int]:
    """Combinatorial (lower, upper) bounds on the optimum size, cheap at any n."""
    if problem is Problem.MDS:
        lower = -(-g.n // (g.max_degree() + 1))
        return lower, greedy_mds(g).optimum_size
    if problem is Problem.MVC:
        matching = greedy_maximal_matching(g)
        return matching, 2 * matching
    if problem is Problem.CDS:
        lower = -(-g.n // (g.max_degree() + 1))
        return lower, greedy_cds(g).optimum_size
    matching = greedy_maximal_matching(g)
    return greedy_mis(g).optimum_size, g.n - matching


def verify_greedy_mds_recurrence(g: Graph, limit: int | None = None) -> bool:
    """Check the greedy undominated counts against n (1 - 1/OPT)^k for every prefix."""
    opt = exact_solve(g, Problem.MDS, limit=limit).optimum_size
    n = g.n
    for k, (_, n_k) in enumerate(greedy_mds(g).sequence_trace, start=1):
        if n_k > n * (1.0 - 1.0 / opt) ** k + 1e-9:
            return False
    return True
