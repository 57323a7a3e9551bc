from .config import Settings, load_settings
from .graph import Graph, Potential, dump_dimacs, load_dimacs
from .logs import setup_logging
from .models import NegativeCycle, NegpathError, ShortestPathResult, VerifyReport
from .projection import Projection
from .services import (
    PathCoverParams,
    SolverParams,
    gen_barrier,
    ksssp,
    path_cover,
    solve,
    solve_sssp,
)
from .validators import (
    verify_clustered,
    verify_path_covering,
    verify_projection,
    verify_restricted,
    verify_sssp,
)
