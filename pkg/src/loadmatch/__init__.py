"""Balanced loads on graphs, correlated graph pairs, and matching recovery."""

from .balance import (
    Allocation,
    LoadProfile,
    balanced_allocation,
    balanced_loads,
    ft_max_set,
    ft_value,
    is_balanced,
    load_level_set,
    max_balanced_load,
    stability_delta,
)
from .corrmodel import (
    CorrelatedPair,
    ModelParams,
    PosteriorTable,
    derive_params,
    forced_params,
    pair_ratio_identity,
    posterior_exact,
    sample_correlated_pair,
)
from .flow import UNBOUNDED, CutResult, FlowNetwork, solve_max_flow
from .graphs import (
    Graph,
    graph_from_edges,
    induced_subgraph,
    tree_components,
    two_cores_of_nonsimple_components,
)
from .intersect import Matching, PartialMatching, ft_pi, intersection_graph
from .limitdist import (
    LoadECDF,
    densest_subgraph_density,
    empirical_load_distribution,
    f_lambda,
    giant_fraction,
    rho_lambda,
    two_core_fraction,
)
from .orbits import (
    MomentParams,
    OrbitCounts,
    OrbitDecomposition,
    closed_form_moment,
    constraint_check_Ek,
    decompose_orbits,
    decompose_orbits_restricted,
    exact_dp_moment,
    orbit_edge_counts,
)
from .oracles import (
    AdmissibilityParams,
    admissibility_check,
    event_d_check,
    ft_bruteforce,
    loads_qp_oracle,
)
from .recovery import (
    AlgoConfig,
    RecoveryResult,
    bayes_optimal_estimate,
    correct_set,
    heavy_light_sets,
    iterative_matching,
    near_maximizer_gap,
    overlap,
)

__version__ = "0.1.0"
