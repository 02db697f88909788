"""Evolutionary search, certification, and oracles for covering problems on power-law bounded graphs."""

from .engines import (
    ParetoArchive,
    RunBudget,
    TrialRecord,
    dominates,
    gsemo,
    mutate,
    one_plus_one_ea,
    run_trials,
)
from .fitness import (
    ApproxRatio,
    Problem,
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
from .generators import GENERATOR_ID, GenSpec, gen_chung_lu, gen_preferential_attachment, generate, load_edge_list
from .graph import (
    DominationState,
    Graph,
    conflict_count,
    degree,
    load_graph_json,
    save_graph_json,
    selected_component_count,
    uncovered_edge_count,
    undominated_count,
)
from .harness import (
    DriftBin,
    DriftSample,
    DriftSummary,
    ExperimentConfig,
    SummaryReport,
    default_budget,
    measure_drift,
    read_results,
    run_experiment,
    summarize,
)
from .oracles import (
    InstanceTooLarge,
    OracleResult,
    exact_solve,
    greedy_cds,
    greedy_maximal_matching,
    greedy_mds,
    greedy_mis,
    is_3_local_optimum,
    size_bounds,
    verify_greedy_mds_recurrence,
)
from .plb import (
    BucketRow,
    PlbConstants,
    PlbParams,
    RatioBounds,
    bucket_counts,
    check_plb,
    constant_b_alt,
    constants_ab,
    degree_sum_bound,
    fit_c1,
    plb_bucket_bound,
    plb_report,
    ratio_bounds,
    verify_domset_ratio,
)

__version__ = "0.1.0"
