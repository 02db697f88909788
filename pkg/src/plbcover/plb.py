"""Power-law bucket certification and the derived approximation constants.

A graph is power-law bounded for (beta, t, c1) when, for every d >= 0, the
number of vertices with degree in [2^d, 2^(d+1)) is at most

    c1 * n * (t+1)^(beta-1) * sum_{i=2^d}^{2^(d+1)-1} (i+t)^(-beta).

Degree-0 vertices belong to no bucket.  From (beta, t, c1) with beta > 2 the
constants a and b are derived, and from those the per-problem approximation
ratio bounds for the single-objective and archive-based searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, check_solution, undominated_count


@dataclass(frozen=True)
class PlbParams:
    """Bucket-bound parameters: exponent beta > 1, shift t >= 0, scale c1 > 0."""

    beta: float
    t: float = 0.0
    c1: float = 1.0

    def __post_init__(self):
        if not self.beta > 1.0:
            raise ValueError("beta must be > 1")
        if self.t < 0.0:
            raise ValueError("t must be >= 0")
        if not self.c1 > 0.0:
            raise ValueError("c1 must be > 0")

    def require_ratio_range(self) -> None:
        if not self.beta > 2.0:
            raise ValueError("ratio constants require beta > 2")


@dataclass(frozen=True)
class PlbConstants:
    a: float
    b: float


@dataclass(frozen=True)
class RatioBounds:
    """Theoretical approximation factors per problem and algorithm."""

    mds_ea: float
    mds_gsemo: float
    mvc_ea: float
    mvc_gsemo: float
    cds_ea: float
    cds_gsemo: float
    mis_ea: float
    mis_gsemo: float

    def as_dict(self) -> dict[str, float]:
        return {
            "mds_ea": self.mds_ea,
            "mds_gsemo": self.mds_gsemo,
            "mvc_ea": self.mvc_ea,
            "mvc_gsemo": self.mvc_gsemo,
            "cds_ea": self.cds_ea,
            "cds_gsemo": self.cds_gsemo,
            "mis_ea": self.mis_ea,
            "mis_gsemo": self.mis_gsemo,
        }


@dataclass(frozen=True)
class BucketRow:
    d: int
    count: int
    bound: float
    margin: float


def bucket_counts(g: Graph) -> list[tuple[int, int]]:
    """Vertex counts per degree bucket d: degrees in [2^d, 2^(d+1)), degree 0 excluded."""
    top = max(g.max_degree(), 1)
    dmax = math.ceil(math.log2(top))
    counts = [0] * (dmax + 1)
    for deg in g.degree:
        if deg > 0:
            counts[int(deg).bit_length() - 1] += 1
    return list(enumerate(counts))


def _bucket_tail_sum(d: int, beta: float, t: float) -> float:
    # exact sum over the 2^d integer degrees of the bucket
    return math.fsum((i + t) ** (-beta) for i in range(2**d, 2 ** (d + 1)))


def plb_bucket_bound(d: int, params: PlbParams, n: int) -> float:
    """The bucket-d ceiling c1 * n * (t+1)^(beta-1) * sum (i+t)^-beta."""
    if d < 0:
        raise ValueError("bucket index must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    scale = params.c1 * n * (params.t + 1.0) ** (params.beta - 1.0)
    return scale * _bucket_tail_sum(d, params.beta, params.t)


# check_plb tolerates this relative slack so the fitted c1 certifies its own
# graph despite float round-trip; must stay far below the 1e-6 minimality probe.
_REL_TOL = 1e-12


def check_plb(g: Graph, params: PlbParams) -> tuple[bool, list[BucketRow]]:
    """Certify every bucket count against its bound; returns (ok, per-bucket margins)."""
    rows = []
    ok = True
    for d, count in bucket_counts(g):
        bound = plb_bucket_bound(d, params, g.n)
        rows.append(BucketRow(d=d, count=count, bound=bound, margin=bound - count))
        if count > bound * (1.0 + _REL_TOL):
            ok = False
    return ok, rows


def fit_c1(g: Graph, beta: float, t: float = 0.0) -> float:
    """Smallest c1 for which every bucket passes: max over nonempty buckets of count / bound-at-c1=1."""
    if g.m == 0:
        raise ValueError("cannot fit c1 on an edgeless graph")
    probe = PlbParams(beta=beta, t=t, c1=1.0)
    best = 0.0
    for d, count in bucket_counts(g):
        if count == 0:
            continue
        best = max(best, count / plb_bucket_bound(d, probe, g.n))
    return best


def constants_ab(params: PlbParams) -> PlbConstants:
    """The constants a and b derived from (beta, t, c1); requires beta > 2."""
    params.require_ratio_range()
    beta, t, c1 = params.beta, params.t, params.c1
    a = (beta - 1.0) / (beta - 2.0) / (1.0 - ((t + 2.0) / (t + 1.0)) ** (1.0 - beta))
    b = (4.0 * c1 * (t + 1.0) ** (beta - 1.0) / (beta - 1.0)) ** (1.0 / (beta - 2.0))
    return PlbConstants(a=a, b=b)


def constant_b_alt(params: PlbParams) -> float:
    """The b variant with (beta - 2) in the denominator, as the underlying derivation has it."""
    params.require_ratio_range()
    beta, t, c1 = params.beta, params.t, params.c1
    return (4.0 * c1 * (t + 1.0) ** (beta - 1.0) / (beta - 2.0)) ** (1.0 / (beta - 2.0))


def ratio_bounds(params: PlbParams) -> RatioBounds:
    """Per-problem approximation factors, each exactly as its guarantee states it."""
    consts = constants_ab(params)
    ab = consts.a * consts.b
    beta, t, c1 = params.beta, params.t, params.c1
    return RatioBounds(
        mds_ea=2.0 * ab + 1.0,
        mds_gsemo=math.log(2.0 * ab + 1.0),
        mvc_ea=2.0 * ab,
        mvc_gsemo=math.log(2.0 * ab) + 1.0,
        cds_ea=2.0 * ab,
        cds_gsemo=math.log(2.0 * math.e * ab + math.e),
        mis_ea=ab + 0.5,
        mis_gsemo=2.0 * c1 * (beta + t - 1.0) / ((beta - 1.0) * (beta - 2.0)) + 1.0,
    )


def degree_sum_bound(params: PlbParams, n: int, max_deg: int) -> tuple[float, float | None]:
    """Upper bounds on the total degree of a certified graph.

    Returns (partial_sum, integral_cap): the exact finite sum
    2 c1 n (t+1)^(beta-1) sum_{i=1}^{max_deg} i (i+t)^-beta, and the closed
    form 2 c1 n (beta+t-1) / ((beta-1)(beta-2)), the latter only for beta > 2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if max_deg < 0:
        raise ValueError("max_deg must be >= 0")
    beta, t, c1 = params.beta, params.t, params.c1
    scale = 2.0 * c1 * n * (t + 1.0) ** (beta - 1.0)
    partial = scale * math.fsum(i * (i + t) ** (-beta) for i in range(1, max_deg + 1))
    cap = None
    if beta > 2.0:
        cap = 2.0 * c1 * n * (beta + t - 1.0) / ((beta - 1.0) * (beta - 2.0))
    return partial, cap


def verify_domset_ratio(g: Graph, params: PlbParams, d: np.ndarray) -> tuple[float, bool]:
    """Mean closed-neighborhood size of a dominating set against the 2ab+1 ceiling."""
    d = check_solution(g, d)
    if undominated_count(g, d) != 0:
        raise ValueError("solution is not a dominating set")
    sel = np.flatnonzero(d)
    ratio = float((g.degree[sel] + 1).sum() / len(sel))
    consts = constants_ab(params)
    return ratio, ratio <= 2.0 * consts.a * consts.b + 1.0


def plb_report(g: Graph, beta: float, t: float = 0.0, c1: float | None = None) -> dict:
    """Machine-readable certification report: fitted c1, bucket margins, constants, ratio bounds."""
    fitted = fit_c1(g, beta, t) if c1 is None else c1
    params = PlbParams(beta=beta, t=t, c1=fitted)
    ok, rows = check_plb(g, params)
    report: dict = {
        "beta": beta,
        "t": t,
        "c1_fitted": fitted,
        "plb_ok": ok,
        "buckets": [
            {"d": r.d, "count": r.count, "bound": r.bound, "margin": r.margin} for r in rows
        ],
    }
    if beta > 2.0:
        consts = constants_ab(params)
        report["a"] = consts.a
        report["b"] = consts.b
        report["b_alt"] = constant_b_alt(params)
        report["ratio_bounds"] = ratio_bounds(params).as_dict()
    return report
