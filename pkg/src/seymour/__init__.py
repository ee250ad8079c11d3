"""Seymour vertices in random tournaments and random digraphs."""

from .analytics import (
    C1,
    C2,
    BoundsReport,
    DigraphWindow,
    binom_tail_le,
    central_binom_pmf,
    chernoff_upper,
    degree_criterion_moments,
    digraph_expectation_lower,
    digraph_window,
    p1_upper_bound,
    tournament_expectation_bounds,
    tournament_variance_asymptote,
    variance_pi_terms,
)
from .experiments import (
    ExactSummary,
    EvolutionTrace,
    ExperimentConfig,
    TrialStats,
    deviation_experiment,
    evolve_experiment,
    exhaustive_digraphs,
    exhaustive_tournaments,
    run_digraph_trials,
    run_tournament_trials,
    variance_constant_estimate,
)
from .graph import (
    UNREACHABLE,
    Digraph,
    NeighborhoodProfile,
    Tournament,
    Triangle,
    TriangleAbsence,
    distances_from,
    eccentricity_at_most_2,
    find_triangle_via_seymour,
    first_neighborhood,
    neighborhood_profiles,
    second_neighborhood,
    seymour_set,
    seymour_set_degree_criterion,
)
from .models import ModelParams, gen_digraph, gen_tournament, rng_stream

__version__ = "0.1.0"
