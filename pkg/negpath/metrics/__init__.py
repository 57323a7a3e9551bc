from .prometheus import (
    REGISTRY,
    track_cover_case,
    track_lambda_retry,
    track_level,
    track_round,
    track_solve,
    write_metrics,
)
