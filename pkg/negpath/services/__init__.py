from .sssp import (
    ContractViolation,
    bellman_ford,
    dag_potential_sssp,
    dijkstra,
    few_neg_sssp,
    karp_min_mean_cycle,
    scc,
)
from .balls import BallGrower, grow_thin_layer
from .path_cover import CoverStats, PathCoverError, PathCoverParams, path_cover
from .restricted import (
    InvalidRestrictedInstance,
    LambdaExhausted,
    RestrictedInstance,
    SolverParams,
    SolverTrace,
    ksssp,
)
from .scaling import NoNegativeCycle, SolveReport, extract_negative_cycle, solve, solve_sssp
from .barrier import (
    BarrierInstance,
    BarrierParameterError,
    CoverFamily,
    audit_family,
    find_uncovered_snake,
    gen_barrier,
    snakes,
)
