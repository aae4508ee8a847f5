"""Online algorithms and overlap-gap tools for the largest common induced subgraph
of two independent G(n, 1/2) graphs."""

from .graph import Graph, GraphFormatError, GraphPair, load_graph, read_graph, sample_er, sample_pair, save_graph, write_graph
from .greedy import GreedyStats, greedy_size_threshold, greedy_lcis, greedy_size_stats, identical_connections
from .harness import ExperimentConfig, TrialRecord, run_experiment, summarize
from .iso import (
    CapacityError,
    ExactResult,
    InvalidSolutionError,
    Solution,
    exact_lcis,
    find_violation,
    iso_prob_bound,
    iso_prob_exact,
    naive_lcis,
    verify_solution,
)
from .ogp import (
    ForbiddenStructureQuery,
    InterpolationFamily,
    OgpParams,
    build_family,
    count_forbidden,
    estimate_events,
    exponent_report,
    m_of_eps,
    psi_min_check,
    run_family,
    stopping_time_tau,
)
from .online import InformationLeak, OnlineViolation, View, greedy_as_online, run_online, validate_transcript
from .rng import SplitMix64, derive_seed
from .transcript import RoundRecord, Transcript

__version__ = "0.1.0"
