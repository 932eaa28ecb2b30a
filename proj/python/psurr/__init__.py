from ._core import (
    ConfigError,
    Env,
    SurrogateEval,
    SurrogateSpec,
    Variant,
    cli,
    density_ratio,
    evaluate,
    log_prob,
    loss_curve,
    pe_divergence,
    ratio_thresholds,
    regularization_gain,
    relative_ratio,
    rpe_divergence,
    train,
)

__version__ = "0.1.0"
