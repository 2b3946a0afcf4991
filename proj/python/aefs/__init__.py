"""Python bindings for the AutoEncoder Feature Selector."""

from ._aefs import (
    DivergenceError,
    ParseError,
    best_map_accuracy,
    cli_main,
    forward,
    gen_synthetic,
    gradient_check,
    group_soft_threshold,
    kmeans,
    nn_classify_accuracy,
    normalize,
    objective,
    rank_features,
    rsr_lambda_max,
    rsr_solve,
    smooth_gradients,
    train,
    vector_soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "DivergenceError",
    "ParseError",
    "best_map_accuracy",
    "cli_main",
    "forward",
    "gen_synthetic",
    "gradient_check",
    "group_soft_threshold",
    "kmeans",
    "nn_classify_accuracy",
    "normalize",
    "objective",
    "rank_features",
    "rsr_lambda_max",
    "rsr_solve",
    "smooth_gradients",
    "train",
    "vector_soft_threshold",
]
