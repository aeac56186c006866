"""Finite-sample intervals of significance for median change-points.

Given a univariate series, :func:`detect` returns the shortest localisable
intervals that each must contain a change in the median, at a prescribed
global significance level, assuming only independence and sign-symmetry of
the residual signs (no moment or distributional assumptions; heavy tails,
heterogeneity and mass points are all fine).
"""

from .deviation import (
    DeviationResult,
    candidate_levels,
    deviation_from_constant_model,
    sign_residuals,
)
from .engine import (
    IntervalSample,
    detect,
    draw_intervals,
    overlap_taus,
    resolve_threshold,
    rnsp_recurse,
    select_candidate,
    shortest_significant_subinterval,
    total_subintervals,
)
from .errors import (
    DegenerateIntervalError,
    EmptyOrTooShortError,
    IndexOutOfRangeError,
    NonFiniteValueError,
    RNSPError,
    SegmentTooShortError,
    TooShortForAsymptoticError,
    UnknownModelError,
    ValidationError,
)
from .model import (
    DetectionConfig,
    DetectionReport,
    Interval,
    Series,
    SignificanceRegion,
    validate_series,
)
from .norms import (
    msup_norm_all,
    msup_norm_lr,
    prefix_sums,
    scaled_partial_sum,
)
from .simlab import (
    CHANGE_MODELS,
    MODEL_NAMES,
    NULL_MODELS,
    ExperimentRow,
    ModelSpec,
    RunMetrics,
    blocks_signal,
    evaluate_run,
    generate,
    model_spec,
    run_experiment,
)
from .threshold import (
    DEFAULT_LAMBDA_CONSTANT,
    LambdaCalibration,
    ThresholdSpec,
    calibrate_lambda_constant,
    lambda_alpha,
    mc_norm_quantile,
    tau_from_alpha,
)

__version__ = "0.1.0"
