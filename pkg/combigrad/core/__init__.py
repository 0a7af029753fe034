from combigrad.core.blackbox import (
    BlackboxLayerState,
    CountingSolver,
    Solution,
    SolverHandle,
    as_weights,
    check_lambda,
    backward,
    forward,
    is_tie,
    tie_mask,
    objective,
    suggest_lambda,
)

__all__ = [
    "BlackboxLayerState",
    "CountingSolver",
    "Solution",
    "SolverHandle",
    "as_weights",
    "check_lambda",
    "backward",
    "forward",
    "is_tie",
    "tie_mask",
    "objective",
    "suggest_lambda",
]
