"""Continuous-time open quantum walks on finite undirected graphs."""

__version__ = "0.1.0"

from .config import DEFAULT_TOLERANCES, Tolerances
from .dynamics import (InitialState, Trajectory, compare_processes, ctqw_limiting_average,
                       evolve_ctoqw, evolve_ctqw, evolve_ctrw)
from .graph import (Graph, GraphError, adjacency, classify, generate, laplacian,
                    parse_edge_list, transition_matrix)
from .lindblad import (LindbladSet, Liouvillian, apply_generator, build_lindblad_set,
                       build_lindblad_variant, build_liouvillian, check_span_hermitian,
                       check_sum_identity, commutant_dimension)
from .numerics import (DensityError, DensityMatrix, expm, hermitian_eig, null_space,
                       validate_density)
from .steady import (SteadyStateReport, classify_steady_state, coherence,
                     convergence_profile, solve_steady_state, trace_distance)

__all__ = [
    "DEFAULT_TOLERANCES", "DensityError", "DensityMatrix", "Graph", "GraphError",
    "InitialState", "LindbladSet", "Liouvillian", "SteadyStateReport", "Tolerances",
    "Trajectory", "adjacency", "apply_generator", "build_lindblad_set",
    "build_lindblad_variant", "build_liouvillian", "check_span_hermitian",
    "check_sum_identity", "classify", "classify_steady_state", "coherence",
    "commutant_dimension", "compare_processes", "convergence_profile",
    "ctqw_limiting_average", "evolve_ctoqw", "evolve_ctqw", "evolve_ctrw", "expm",
    "generate", "hermitian_eig", "laplacian", "null_space", "parse_edge_list",
    "solve_steady_state", "trace_distance", "transition_matrix", "validate_density",
]
