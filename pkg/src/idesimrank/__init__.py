"""Near-linear SimRank: estimate the diagonal correction with inexact GMRES,
then answer queries from the truncated series."""

from .errors import (ConfigError, ConvergenceError, InputError, NumericalBreakdownError,
                     ParseError, ResourceError, SimRankError, UnsupportedFormatError,
                     VertexError)
from .evaluation import (NdcgReport, ScalingReport, ndcg_at_n, random_in_regular_graph,
                         run_ndcg_experiment, run_scaling_experiment)
from .graph import (EdgeSet, SimGraph, build_graph, load_graph, parse_edge_list,
                    parse_matrix_market, write_edge_list)
from .oracle import condition_number_1, exact_F_matrix, fixed_point_simrank, oracle_diagonal
from .queries import (QueryResult, full_sparse_simrank, lookup_pair, lookup_source,
                      single_pair, single_source)
from .solver import (DiagonalEstimate, SolverConfig, apply_F_approx, matvec_error_bound,
                     solve_diagonal, tau_schedule_next)
from .sparse import SparseMatrix, extract_diagonal, matvec, transpose_sandwich

__version__ = "0.1.0"
