"""Undirected simple graphs and the counting queries the covering fitness functions need.

Vertices are 0-indexed integers.  Solutions are length-n bit vectors
(numpy arrays of 0/1); a solution selects the vertex set {v : x[v] == 1}.
Graphs are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np


class Graph:
    """Undirected simple graph: no self-loops, no parallel edges.

    Exposes per-vertex sorted adjacency, degrees, and the edge list as a
    (m, 2) array with u < v sorted lexicographically.
    """

    __slots__ = ("n", "edges", "adjacency", "degree", "neighbors", "_connected")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        pairs = sorted(seen)
        self.n = n
        self.edges = np.array(pairs, dtype=np.int64).reshape(len(pairs), 2)
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in pairs:
            nbrs[u].append(v)
            nbrs[v].append(u)
        # plain lists for the hot per-flip loops, numpy views for vector code
        self.neighbors = [sorted(a) for a in nbrs]
        self.adjacency = [np.array(a, dtype=np.int64) for a in self.neighbors]
        self.degree = np.array([len(a) for a in self.neighbors], dtype=np.int64)
        self._connected: bool | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    def is_connected(self) -> bool:
        """True when every vertex is reachable from vertex 0 (empty graph counts as connected)."""
        if self._connected is None:
            if self.n <= 1:
                self._connected = True
            else:
                seen = bytearray(self.n)
                seen[0] = 1
                stack = [0]
                count = 1
                while stack:
                    v = stack.pop()
                    for u in self.neighbors[v]:
                        if not seen[u]:
                            seen[u] = 1
                            count += 1
                            stack.append(u)
                self._connected = count == self.n
        return self._connected

    def to_json(self, meta: dict | None = None) -> str:
        doc: dict = {"n": self.n, "edges": [[int(u), int(v)] for u, v in self.edges]}
        if meta is not None:
            doc["meta"] = meta
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        doc = json.loads(text)
        return cls(int(doc["n"]), [tuple(e) for e in doc["edges"]])


def check_solution(g: Graph, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (g.n,):
        raise ValueError(f"solution length {x.shape} does not match n={g.n}")
    return x


def degree(g: Graph, v: int) -> int:
    """Number of neighbors of v."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for n={g.n}")
    return int(g.degree[v])


def undominated_count(g: Graph, x: np.ndarray) -> int:
    """Number of vertices with no selected vertex in their closed neighborhood.

    Zero exactly when the selected set is dominating.  A selected vertex
    dominates itself.
    """
    x = check_solution(g, x)
    covered = np.zeros(g.n, dtype=bool)
    sel = np.flatnonzero(x)
    covered[sel] = True
    for v in sel:
        covered[g.adjacency[v]] = True
    return int(g.n - np.count_nonzero(covered))


def uncovered_edge_count(g: Graph, x: np.ndarray) -> int:
    """Number of edges with neither endpoint selected; zero iff x is a vertex cover."""
    x = check_solution(g, x)
    if g.m == 0:
        return 0
    u, v = g.edges[:, 0], g.edges[:, 1]
    return int(np.count_nonzero((x[u] == 0) & (x[v] == 0)))


def conflict_count(g: Graph, x: np.ndarray) -> int:
    """Ordered pairs (i, j) of selected adjacent vertices: twice the selected-edge count."""
    x = check_solution(g, x)
    if g.m == 0:
        return 0
    u, v = g.edges[:, 0], g.edges[:, 1]
    return 2 * int(np.count_nonzero((x[u] != 0) & (x[v] != 0)))


def selected_component_count(g: Graph, x: np.ndarray) -> int:
    """Connected components of the subgraph induced by the selected vertices (0 for the empty set)."""
    x = check_solution(g, x)
    sel = np.flatnonzero(x)
    if len(sel) == 0:
        return 0
    in_sel = bytearray(g.n)
    for v in sel:
        in_sel[v] = 1
    seen = bytearray(g.n)
    comps = 0
    for s in sel:
        if seen[s]:
            continue
        comps += 1
        seen[s] = 1
        stack = [int(s)]
        while stack:
            v = stack.pop()
            for u in g.neighbors[v]:
                if in_sel[u] and not seen[u]:
                    seen[u] = 1
                    stack.append(u)
    return comps


class DominationState:
    """Incremental cache of per-vertex closed-neighborhood cover counts.

    cover_count[v] is the number of selected vertices in N(v) + {v};
    undominated is the number of vertices with cover_count == 0.  Flips
    update both in O(deg) instead of a full recount.  Mutable, one owner
    at a time.
    """

    __slots__ = ("bits", "cover_count", "undominated", "ones")

    def __init__(self, bits: bytearray, cover_count: list[int], undominated: int, ones: int):
        self.bits = bits
        self.cover_count = cover_count
        self.undominated = undominated
        self.ones = ones

    @classmethod
    def from_solution(cls, g: Graph, x: Sequence[int] | np.ndarray) -> "DominationState":
        x = check_solution(g, np.asarray(x, dtype=np.uint8))
        bits = bytearray(int(b) for b in x)
        cover = [0] * g.n
        for v in range(g.n):
            if bits[v]:
                cover[v] += 1
                for u in g.neighbors[v]:
                    cover[u] += 1
        undom = sum(1 for c in cover if c == 0)
        return cls(bits, cover, undom, sum(bits))

    def apply_flip(self, g: Graph, v: int) -> "DominationState":
        """Toggle bit v, updating cover counts and the undominated total. Involution."""
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
        cover = self.cover_count
        if self.bits[v]:
            self.bits[v] = 0
            self.ones -= 1
            cover[v] -= 1
            if cover[v] == 0:
                self.undominated += 1
            for u in g.neighbors[v]:
                cover[u] -= 1
                if cover[u] == 0:
                    self.undominated += 1
        else:
            self.bits[v] = 1
            self.ones += 1
            if cover[v] == 0:
                self.undominated -= 1
            cover[v] += 1
            for u in g.neighbors[v]:
                if cover[u] == 0:
                    self.undominated -= 1
                cover[u] += 1
        return self

    def solution(self) -> np.ndarray:
        return np.frombuffer(bytes(self.bits), dtype=np.uint8).copy()


def load_graph_json(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return Graph.from_json(fh.read())


def save_graph_json(g: Graph, path, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(g.to_json(meta=meta))
        fh.write("\n")
