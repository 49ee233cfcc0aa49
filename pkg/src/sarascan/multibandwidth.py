"""Pooled screening at several bandwidths with subset-selection refinement.

A small bandwidth localizes sharp jumps well; a large one picks up faint
ones.  Running the screen at a few bandwidths with conservative thresholds
and letting a BIC-type criterion choose among the pooled candidates gets the
best of both without per-position tuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diagnostics import (
    Candidate,
    CandidateSet,
    Series,
    equal_weight_diagnostic,
    signed_maximizers,
    threshold_candidates,
)
from .errors import SeriesTooShort
from .selection import (
    CRITERIA,
    MBIC,
    SegmentationModel,
    backward_stepwise,
    best_subset_select,
    estimate_sigma,
)

# Exhaustive subset search up to 2^12 fits; stepwise deletion beyond.
BEST_SUBSET_LIMIT = 12


@dataclass(frozen=True)
class MultiBandConfig:
    """Configuration of the multi-bandwidth detector.

    Per-bandwidth thresholds are ``threshold_constant * sqrt(2 / h) * sigma``,
    i.e. a multiple of the null standard deviation of the window contrast.
    ``sigma`` fixes a known noise scale; when None it is estimated once from
    the data with :func:`~sarascan.selection.estimate_sigma` at
    ``sigma_bandwidth`` (default: the smallest bandwidth).
    """

    bandwidths: tuple[int, ...]
    threshold_constant: float = 2.0
    criterion: str = MBIC
    sigma: float | None = None
    sigma_bandwidth: int | None = None

    def __post_init__(self):
        bw = tuple(int(h) for h in self.bandwidths)
        if not bw:
            raise ValueError("at least one bandwidth is required")
        if len(set(bw)) != len(bw):
            raise ValueError(f"bandwidths must be distinct, got {bw}")
        if any(h < 1 for h in bw):
            raise ValueError(f"bandwidths must be positive, got {bw}")
        object.__setattr__(self, "bandwidths", bw)
        if self.threshold_constant <= 0:
            raise ValueError("threshold_constant must be positive")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("known sigma must be positive")


def default_bandwidths(n: int) -> list[int]:
    """The bandwidth ladder log n, 2 log n, 3 log n (natural log, rounded).

    Values are clamped to [2, n // 2] and duplicates dropped, so short series
    may get fewer than three.
    """
    if n < 8:
        raise SeriesTooShort(f"need n >= 8 for default bandwidths, got {n}")
    out: list[int] = []
    for k in (1, 2, 3):
        h = int(round(k * math.log(n)))
        h = min(max(h, 2), n // 2)
        if h not in out:
            out.append(h)
    return out


def noise_scale(series: Series, cfg: MultiBandConfig) -> float:
    """The sigma the per-bandwidth thresholds are based on."""
    if cfg.sigma is not None:
        return float(cfg.sigma)
    h_ref = cfg.sigma_bandwidth if cfg.sigma_bandwidth is not None else min(cfg.bandwidths)
    return estimate_sigma(series, h_ref)


def bandwidth_threshold(h: int, constant: float, sigma: float) -> float:
    return constant * math.sqrt(2.0 / h) * sigma


def pool_candidates(series: Series, cfg: MultiBandConfig) -> CandidateSet:
    """Union of thresholded maximizers over all configured bandwidths.

    Upward and downward shifts are screened separately (see
    :func:`~sarascan.diagnostics.signed_maximizers`); entries keep their
    source bandwidth.  A position surviving at several bandwidths is
    collapsed to a single entry with the largest score; positions differing
    by even one index stay distinct, leaving the selection step to pick the
    best-localized variant.
    """
    sigma = noise_scale(series, cfg)
    by_position: dict[int, Candidate] = {}
    for h in cfg.bandwidths:
        lam = bandwidth_threshold(h, cfg.threshold_constant, sigma)
        cands = threshold_candidates(
            signed_maximizers(equal_weight_diagnostic(series, h)), lam
        )
        for entry in cands:
            seen = by_position.get(entry.position)
            if seen is None or entry.score > seen.score:
                by_position[entry.position] = entry
    return CandidateSet.ranked(list(by_position.values()))


def select_from_pool(
    series: Series, pool: CandidateSet, criterion: str = MBIC
) -> SegmentationModel:
    """Subset selection applied to a candidate pool.

    Exhaustive search when the pool is small enough (it is slightly better),
    backward stepwise deletion otherwise.
    """
    if len(pool) <= BEST_SUBSET_LIMIT:
        return best_subset_select(series, pool, criterion)
    return backward_stepwise(series, pool, criterion)


def msara_detect(series: Series, cfg: MultiBandConfig) -> SegmentationModel:
    """Full multi-bandwidth pipeline: pool candidates, then select a subset."""
    return select_from_pool(series, pool_candidates(series, cfg), cfg.criterion)
