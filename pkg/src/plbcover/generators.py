"""Seed-deterministic scale-free graph generators and edge-list loading.

All randomness comes from numpy's counter-based Philox engine keyed by the
spec seed, so identical specs give byte-identical graphs regardless of
platform or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

GENERATOR_ID = f"numpy.random.Philox(numpy={np.__version__})"


@dataclass(frozen=True)
class GenSpec:
    """What to generate: model 'pa', 'chung-lu', or 'edge-list' plus its parameters."""

    model: str
    n: int = 0
    attach_m: int = 1
    beta_target: float = 2.5
    seed: int = 0
    path: str | None = None


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def generate(spec: GenSpec) -> Graph:
    if spec.model == "pa":
        return gen_preferential_attachment(spec)
    if spec.model == "chung-lu":
        return gen_chung_lu(spec)
    if spec.model == "edge-list":
        if spec.path is None:
            raise ValueError("edge-list model requires a path")
        return load_edge_list(spec.path)
    raise ValueError(f"unknown model {spec.model!r}")


def gen_preferential_attachment(spec: GenSpec) -> Graph:
    """Degree-proportional attachment starting from a complete graph on attach_m+1 vertices.

    Each new vertex attaches to attach_m distinct existing vertices drawn from
    the repeated-vertex list (one entry per unit of degree), rejecting
    duplicates within the batch.  Output is connected with min degree >= attach_m.
    """
    n, m = spec.n, spec.attach_m
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= attach_m < n, got attach_m={m}, n={n}")
    rng = rng_from_seed(spec.seed)
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # one list entry per degree unit; seed-clique vertices start with degree m
    targets = [v for v in range(m + 1) for _ in range(m)]
    for v in range(m + 1, n):
        chosen: list[int] = []
        while len(chosen) < m:
            cand = targets[int(rng.integers(len(targets)))]
            if cand not in chosen:
                chosen.append(cand)
        for u in chosen:
            edges.append((u, v))
            targets.append(u)
        targets.extend([v] * m)
    return Graph(n, edges)


def _pair_probability(wu: float, wv: float, total: float) -> float:
    return min(1.0, wu * wv / total)


def gen_chung_lu(spec: GenSpec) -> Graph:
    """Independent pair sampling with rank weights w_i = (n/i)^(1/(beta-1)).

    Pair (u, v) is edged with probability min(1, w_u w_v / sum(w)).  Isolated
    vertices are dropped and the rest re-indexed, so the result has min
    degree >= 1 (it may be empty for tiny n).
    """
    n = spec.n
    if not spec.beta_target > 2.0:
        raise ValueError("beta_target must be > 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from_seed(spec.seed)
    w = (n / np.arange(1, n + 1)) ** (1.0 / (spec.beta_target - 1.0))
    total = float(w.sum())
    iu, iv = np.triu_indices(n, k=1)
    probs = np.minimum(1.0, w[iu] * w[iv] / total)
    hit = rng.random(len(probs)) < probs
    raw_edges = np.stack([iu[hit], iv[hit]], axis=1)
    used = np.zeros(n, dtype=bool)
    used[raw_edges.ravel()] = True
    relabel = np.cumsum(used) - 1
    edges = [(int(relabel[u]), int(relabel[v])) for u, v in raw_edges]
    return Graph(int(used.sum()), edges)


def load_edge_list(path) -> Graph:
    """Parse a plain-text edge list: one 'u v' per line, '#' comments allowed.

    Duplicate edges (in either order) collapse; self-loops are rejected with
    the offending line number.
    """
    pairs = set()
    max_v = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            tokens = text.split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer vertex id in {text!r}") from None
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop at vertex {u}")
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id in {text!r}")
            if u > v:
                u, v = v, u
            pairs.add((u, v))
            max_v = max(max_v, v)
    return Graph(max_v + 1, sorted(pairs))
