"""Screening-and-ranking change-point detection for long piecewise-constant signals.

Scan a local window contrast along the sequence, rank its local maximizers,
and keep change-points by thresholding or a BIC-type criterion; a
multi-bandwidth variant pools candidates from several window widths and
refines them by subset selection.  Built for DNA copy-number data (aCGH and
SNP-array log ratios) but applies to any long mean-shift signal.  Linear
time in the sequence length, with a compiled kernel core and a pure-Python
fallback.
"""

from ._kernels import backend_name
from .diagnostics import (
    Candidate,
    CandidateSet,
    DiagnosticProfile,
    Kernel,
    Series,
    WeightScheme,
    equal_weight_diagnostic,
    local_linear_diagnostic,
    local_maximizers,
    signed_maximizers,
    threshold_candidates,
)
from .errors import (
    BandwidthError,
    BandwidthNonPositive,
    BandwidthTooLarge,
    BandwidthTooSmall,
    DegenerateDesign,
    EmptyGroup,
    InvalidChangepoints,
    InvalidSeries,
    InvalidSpec,
    NonFiniteValue,
    ParseError,
    SarascanError,
    SeriesTooLong,
    SeriesTooShort,
)
from .io import ingest
from .multibandwidth import (
    MultiBandConfig,
    default_bandwidths,
    msara_detect,
    pool_candidates,
    select_from_pool,
)
from .selection import (
    BIC,
    MBIC,
    PartitionFit,
    SegmentationModel,
    backward_stepwise,
    best_subset_select,
    bic_score,
    estimate_sigma,
    exhaustive_dp_oracle,
    fit_segments,
    mbic_score,
    rank_select,
)
from .simulation import (
    CpCoverage,
    DetectionOutcome,
    StudyReport,
    TruthSpec,
    child_seeds,
    detection_metrics,
    generate,
    lr_statistic,
    model_size_study,
    msara_detector,
    power_study,
    sara_detector,
    six_changepoint_benchmark,
    sure_coverage_study,
    theorem1_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BIC",
    "MBIC",
    "BandwidthError",
    "BandwidthNonPositive",
    "BandwidthTooLarge",
    "BandwidthTooSmall",
    "Candidate",
    "CandidateSet",
    "CpCoverage",
    "DegenerateDesign",
    "DetectionOutcome",
    "DiagnosticProfile",
    "EmptyGroup",
    "InvalidChangepoints",
    "InvalidSeries",
    "InvalidSpec",
    "Kernel",
    "MultiBandConfig",
    "NonFiniteValue",
    "ParseError",
    "PartitionFit",
    "SarascanError",
    "SegmentationModel",
    "Series",
    "SeriesTooLong",
    "SeriesTooShort",
    "StudyReport",
    "TruthSpec",
    "WeightScheme",
    "backend_name",
    "backward_stepwise",
    "best_subset_select",
    "bic_score",
    "child_seeds",
    "default_bandwidths",
    "detection_metrics",
    "equal_weight_diagnostic",
    "estimate_sigma",
    "exhaustive_dp_oracle",
    "fit_segments",
    "generate",
    "ingest",
    "local_linear_diagnostic",
    "local_maximizers",
    "lr_statistic",
    "mbic_score",
    "model_size_study",
    "msara_detect",
    "msara_detector",
    "pool_candidates",
    "power_study",
    "rank_select",
    "sara_detector",
    "select_from_pool",
    "signed_maximizers",
    "six_changepoint_benchmark",
    "sure_coverage_study",
    "theorem1_bound",
    "threshold_candidates",
]
