from __future__ import annotations

DESCRIPTION = (
    "Negative-weight single-source shortest paths built on path covers, "
    "with verifiers, seeded generators and the ladder-and-star gadget."
)

EXIT_CODES_EPILOG = (
    "exit codes: 0 solved, 1 negative cycle reachable from the source, "
    "2 verification failed, 3 input or parameter error"
)

SOLVE_HELP = "Distances from a source or a negative cycle reachable from it."
PATHCOVER_HELP = "Build a d-path cover of a nonnegative graph and report its stats."
VERIFY_HELP = "Certify a projection or a distance table produced by any implementation."
GEN_HELP = "Write a seeded .gr graph to stdout or --output."
BENCH_HELP = "Run the solver over a corpus of .gr files and emit one JSON row per run."

SOURCE_HELP = "source vertex, 1-indexed (default 1)"
K_HELP = "treat the input as a restricted instance whose shortest paths use at most K negative edges"
LAMBDA_HELP = "diameter slack; defaults to NEGPATH_LAMBDA or the theoretical floor under --preset paper"
BUDGET_HELP = "limit for exhaustive path and snake enumeration (default NEGPATH_EXHAUSTIVE_BUDGET)"
JOBS_HELP = "worker processes for independent instances; output does not depend on it"
TRUNCATE_HELP = "replace negative weights by 0 before covering"

ERROR_TEMPLATE = "negpath: error: {reason}"
NEGATIVE_WEIGHTS_MESSAGE = (
    "path cover needs nonnegative weights; rerun with --truncate to cover max(0, w)"
)
BUDGET_FALLBACK_MESSAGE = "exhaustive census over budget ({reason}); switching to sampled mode"
VERIFY_FAILED_TEMPLATE = "verification failed: {checks}"
CYCLE_TEMPLATE = "negative cycle of weight {weight}: {vertices}"
