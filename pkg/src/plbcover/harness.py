"""Reproducible experiment driver: seeded trial batches, CSV results, drift, reports.

Every run is a pure function of its config: trial seeds are base_seed + index,
the config hash and generator id are embedded in the output header, and a
re-run reproduces the file byte-for-byte except the wall-clock column.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass

import numpy as np

from .engines import RunBudget, StepInfo, one_plus_one_ea, run_trials
from .fitness import Problem, approx_ratio
from .generators import GENERATOR_ID, GenSpec, generate
from .graph import Graph, load_graph_json
from .oracles import InstanceTooLarge, exact_solve, size_bounds
from .plb import PlbParams, fit_c1, ratio_bounds

CSV_COLUMNS = [
    "trial", "seed", "n", "m", "beta", "t", "c1_fitted", "problem", "algo",
    "evals_to_feasible", "evals_total", "best_size", "reference",
    "reference_kind", "ratio", "theo_bound", "wall_ms",
]

# default (beta, t) grid for certification sweeps when none is given
DEFAULT_PLB_GRID = [(2.1, 0.0), (2.5, 0.0), (3.0, 0.0), (2.1, 1.0), (2.5, 1.0), (3.0, 1.0)]


class MalformedResults(Exception):
    def __init__(self, lines: list[int]):
        super().__init__(f"malformed result rows at lines: {lines}")
        self.lines = lines


def default_budget(problem: Problem, algo: str, n: int) -> int:
    """Evaluation caps with constant headroom over the expected orders."""
    if algo == "gsemo":
        return max(10 * n**3, 100)
    if problem is Problem.MIS:
        return max(5 * n**3, 100)
    return max(int(50 * n * math.log(max(n, 2))), 100)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on; serializes losslessly to JSON."""

    problem: str
    algorithm: str
    gen: GenSpec | None = None
    graph_path: str | None = None
    max_evaluations: int | None = None
    target: int | None = None
    stop_at_first_feasible: bool = False
    trials: int = 1
    base_seed: int = 0
    beta: float = 3.0
    t: float = 0.0
    workers: int = 1
    mvc_literal: bool = False
    out: str = "results.csv"

    def __post_init__(self):
        if (self.gen is None) == (self.graph_path is None):
            raise ValueError("exactly one of gen or graph_path must be set")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.trials)]

    def to_json(self) -> str:
        doc = asdict(self)
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        if doc.get("gen") is not None:
            doc["gen"] = GenSpec(**doc["gen"])
        return cls(**doc)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def _load_graph(config: ExperimentConfig) -> Graph:
    if config.gen is not None:
        return generate(config.gen)
    return load_graph_json(config.graph_path)


def reference_for(g: Graph, problem: Problem, limit: int | None = None) -> tuple[int, str]:
    """Exact optimum when the solver accepts the instance, else the safe one-sided bound."""
    try:
        return exact_solve(g, problem, limit=limit).optimum_size, "exact"
    except InstanceTooLarge:
        lower, upper = size_bounds(g, problem)
        if problem.maximize:
            return upper, "upper-bound"
        return lower, "lower-bound"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run the trial batch and write one CSV row per trial; returns the rows."""
    g = _load_graph(config)
    problem = Problem(config.problem)
    n = g.n
    max_evals = config.max_evaluations or default_budget(problem, config.algorithm, n)
    target = config.target
    if config.stop_at_first_feasible:
        if problem.maximize:
            raise ValueError("stop_at_first_feasible is meaningful only for minimization problems")
        target = n
    budget = RunBudget(max_evaluations=max_evals, target=target)

    c1 = fit_c1(g, config.beta, config.t)
    theo_bound = None
    if config.beta > 2.0:
        bounds = ratio_bounds(PlbParams(beta=config.beta, t=config.t, c1=c1))
        theo_bound = bounds.as_dict()[f"{problem.value}_{config.algorithm}"]
    reference, reference_kind = reference_for(g, problem)

    records = run_trials(g, problem, config.algorithm, budget, config.seeds(),
                         workers=config.workers, mvc_literal=config.mvc_literal)

    rows = []
    for i, rec in enumerate(records):
        ratio = None
        if rec.best_feasible_size is not None and reference >= 1 and rec.best_feasible_size >= 1:
            ratio = approx_ratio(rec.best_feasible_size, reference, problem, reference_kind).ratio
        rows.append({
            "trial": i,
            "seed": rec.seed,
            "n": n,
            "m": g.m,
            "beta": config.beta,
            "t": config.t,
            "c1_fitted": c1,
            "problem": problem.value,
            "algo": config.algorithm,
            "evals_to_feasible": rec.evals_to_feasible,
            "evals_total": rec.evals_total,
            "best_size": rec.best_feasible_size,
            "reference": reference,
            "reference_kind": reference_kind,
            "ratio": ratio,
            "theo_bound": theo_bound,
            "wall_ms": rec.wall_time * 1000.0,
        })

    with open(config.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# plbcover-results v1\n")
        fh.write(f"# config_hash={config.config_hash()} generator={GENERATOR_ID}\n")
        fh.write(f"# config={config.to_json()}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) if c != "wall_ms" else f"{row[c]:.3f}" for c in CSV_COLUMNS])
    return rows


def read_results(path) -> list[dict]:
    """Parse a results CSV back into typed rows; collects malformed line numbers."""
    rows = []
    bad: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    data_lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.startswith("#")]
    if not data_lines:
        return rows
    header = next(csv.reader(io.StringIO(data_lines[0][1])))
    if header != CSV_COLUMNS:
        raise MalformedResults([data_lines[0][0]])
    for lineno, ln in data_lines[1:]:
        try:
            values = next(csv.reader(io.StringIO(ln)))
            if len(values) != len(CSV_COLUMNS):
                raise ValueError("column count")
            row = dict(zip(CSV_COLUMNS, values))
            for key in ("trial", "seed", "n", "m", "evals_total"):
                row[key] = int(row[key])
            for key in ("evals_to_feasible", "best_size", "reference"):
                row[key] = int(row[key]) if row[key] != "" else None
            for key in ("beta", "t", "c1_fitted", "wall_ms"):
                row[key] = float(row[key])
            for key in ("ratio", "theo_bound"):
                row[key] = float(row[key]) if row[key] != "" else None
            rows.append(row)
        except (ValueError, StopIteration):
            bad.append(lineno)
    if bad:
        raise MalformedResults(bad)
    return rows


@dataclass
class SummaryReport:
    """Aggregates per (n, problem, algo) plus growth fits across sizes; derived data only."""

    groups: list[dict]
    scaling: list[dict]

    def to_json(self) -> str:
        return json.dumps({"groups": self.groups, "scaling": self.scaling}, sort_keys=True)

    def render_table(self) -> str:
        out = []
        head = f"{'n':>6} {'problem':>8} {'algo':>6} {'trials':>6} {'med_evals':>10} " \
               f"{'mean_ratio':>10} {'max_ratio':>10} {'theo_bound':>10} {'ok_frac':>8}"
        out.append(head)
        for grp in self.groups:
            out.append(
                f"{grp['n']:>6} {grp['problem']:>8} {grp['algo']:>6} {grp['trials']:>6} "
                f"{_fmt(grp['median_evals_to_feasible']):>10} {_fmt(grp['mean_ratio']):>10} "
                f"{_fmt(grp['max_ratio']):>10} {_fmt(grp['theo_bound']):>10} "
                f"{_fmt(grp['bound_satisfaction']):>8}"
            )
        for sc in self.scaling:
            out.append(f"scaling {sc['problem']}/{sc['algo']}: "
                       f"doubling_ratios={[round(r, 3) for r in sc['doubling_ratios']]} "
                       f"nlogn_coeff={sc['nlogn_coeff']:.4g} exponent={sc['exponent']:.3f}")
        return "\n".join(out)


def summarize(rows: list[dict]) -> SummaryReport:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["n"], row["problem"], row["algo"]), []).append(row)

    group_rows = []
    for (n, problem, algo), rs in sorted(groups.items()):
        evals = [r["evals_to_feasible"] for r in rs if r["evals_to_feasible"] is not None]
        ratios = [r["ratio"] for r in rs if r["ratio"] is not None]
        theo = next((r["theo_bound"] for r in rs if r["theo_bound"] is not None), None)
        judged = [r["ratio"] for r in rs if r["ratio"] is not None and r["theo_bound"] is not None]
        ok = None
        if judged and theo is not None:
            ok = sum(1 for r in judged if r <= theo) / len(judged)
        group_rows.append({
            "n": n,
            "problem": problem,
            "algo": algo,
            "trials": len(rs),
            "median_evals_to_feasible": statistics.median(evals) if evals else None,
            "mean_evals_to_feasible": statistics.fmean(evals) if evals else None,
            "feasible_fraction": len(evals) / len(rs),
            "mean_ratio": statistics.fmean(ratios) if ratios else None,
            "max_ratio": max(ratios) if ratios else None,
            "theo_bound": theo,
            "bound_satisfaction": ok,
        })

    scaling_rows = []
    by_pa: dict[tuple, list[dict]] = {}
    for grp in group_rows:
        by_pa.setdefault((grp["problem"], grp["algo"]), []).append(grp)
    for (problem, algo), grps in sorted(by_pa.items()):
        pts = sorted(
            (g["n"], g["median_evals_to_feasible"]) for g in grps
            if g["median_evals_to_feasible"] is not None
        )
        if len(pts) < 2:
            continue
        doubling = []
        med = dict(pts)
        for n, t_n in pts:
            if 2 * n in med and t_n > 0:
                doubling.append(med[2 * n] / t_n)
        xs = np.array([n * math.log(n) for n, _ in pts])
        ts = np.array([t for _, t in pts], dtype=float)
        coeff = float((xs * ts).sum() / (xs * xs).sum())
        exponent = float(np.polyfit(np.log([n for n, _ in pts]), np.log(ts), 1)[0])
        scaling_rows.append({
            "problem": problem,
            "algo": algo,
            "sizes": [n for n, _ in pts],
            "medians": [t for _, t in pts],
            "doubling_ratios": doubling,
            "nlogn_coeff": coeff,
            "exponent": exponent,
        })

    return SummaryReport(groups=group_rows, scaling=scaling_rows)


# ---------------------------------------------------------------------------
# drift measurement


@dataclass(frozen=True)
class DriftSample:
    potential: int
    decrease: int
    iteration: int


@dataclass(frozen=True)
class DriftBin:
    potential: int
    samples: int
    mean_decrease: float
    bound: float
    ratio: float
    ok: bool


@dataclass
class DriftSummary:
    problem: str
    n: int
    trials: int
    total_samples: int
    bins: list[DriftBin]

    def flagged(self, min_samples: int = 100) -> list[DriftBin]:
        return [b for b in self.bins if b.samples >= min_samples and not b.ok]

    def to_json(self) -> str:
        return json.dumps({
            "problem": self.problem,
            "n": self.n,
            "trials": self.trials,
            "total_samples": self.total_samples,
            "bins": [asdict(b) for b in self.bins],
        }, sort_keys=True)


def measure_drift(
    g: Graph,
    problem: Problem,
    trials: int,
    base_seed: int = 0,
    max_evaluations: int | None = None,
    keep_samples: bool = False,
) -> DriftSummary | tuple[DriftSummary, list[DriftSample]]:
    """Per-potential mean one-step decrease of the penalty during the infeasible phase.

    The bound column is s / (e n); a bin with ratio < 1 violates the
    multiplicative-drift premise empirically.  Only MDS (potential u) and
    CDS (potential u + w - 1) carry that premise.
    """
    if problem not in (Problem.MDS, Problem.CDS):
        raise ValueError("drift is measured for MDS and CDS only")
    n = g.n
    max_evals = max_evaluations or default_budget(problem, "ea", n)
    budget = RunBudget(max_evaluations=max_evals, target=n)

    acc: dict[int, list[int]] = {}
    raw: list[DriftSample] = []

    def collect(info: StepInfo) -> None:
        s = info.potential_before
        if s is None or s <= 0:
            return
        dec = s - info.potential_after
        cell = acc.setdefault(s, [0, 0])
        cell[0] += 1
        cell[1] += dec
        if keep_samples:
            raw.append(DriftSample(potential=s, decrease=dec, iteration=info.evals))

    for i in range(trials):
        one_plus_one_ea(g, problem, budget, seed=base_seed + i, on_step=collect)

    bins = []
    for s in sorted(acc):
        count, total = acc[s]
        mean = total / count
        bound = s / (math.e * n)
        ratio = mean / bound
        bins.append(DriftBin(potential=s, samples=count, mean_decrease=mean,
                             bound=bound, ratio=ratio, ok=ratio >= 1.0))
    summary = DriftSummary(problem=problem.value, n=n, trials=trials,
                           total_samples=sum(b.samples for b in bins), bins=bins)
    if keep_samples:
        return summary, raw
    return summary
