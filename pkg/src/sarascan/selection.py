"""Segment fitting, information criteria, and change-point selection.

Change-points are 1-based positions in (0, n); a model with change-points
``c1 < ... < cJ`` has segments covering observations ``(0, c1], (c1, c2],
..., (cJ, n]``, which in 0-based array terms are the slices ``y[0:c1],
y[c1:c2], ..., y[cJ:n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .diagnostics import CandidateSet, Series
from .errors import BandwidthNonPositive, InvalidChangepoints, SeriesTooLong

BIC = "bic"
MBIC = "mbic"
THRESHOLD = "threshold"
CRITERIA = (BIC, MBIC)

DP_ORACLE_MAX_N = 500


@dataclass(frozen=True)
class SegmentationModel:
    """Fitted piecewise-constant model.

    ``sigma2_hat`` is the residual sum of squares divided by n (the variance
    MLE given the change-points).  ``criterion`` records how the model was
    selected; ``score`` is the criterion value (the threshold for
    threshold-selected models, NaN for bare least-squares fits).
    """

    changepoints: tuple[int, ...]
    segment_means: tuple[float, ...]
    sigma2_hat: float
    criterion: str = THRESHOLD
    score: float = float("nan")

    @property
    def size(self) -> int:
        return len(self.changepoints)

    def segment_bounds(self, n: int) -> list[tuple[int, int]]:
        """Half-open 0-based (start, end) index ranges of each segment."""
        edges = (0, *self.changepoints, n)
        return list(zip(edges[:-1], edges[1:]))


def _validate_changepoints(n: int, changepoints: Iterable[int]) -> tuple[int, ...]:
    cps = tuple(int(c) for c in changepoints)
    for c in cps:
        if not 0 < c < n:
            raise InvalidChangepoints(f"change-point {c} outside (0, {n})")
    for a, b in zip(cps, cps[1:]):
        if b <= a:
            raise InvalidChangepoints(f"change-points not strictly increasing at {a}, {b}")
    return cps


def fit_segments(series: Series, changepoints: Iterable[int]) -> SegmentationModel:
    """Least-squares fit: per-segment sample means and the variance MLE."""
    cps = _validate_changepoints(series.n, changepoints)
    y = series.values
    edges = (0, *cps, series.n)
    means = []
    rss = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = y[lo:hi]
        mu = seg.mean()
        means.append(float(mu))
        rss += float(((seg - mu) ** 2).sum())
    return SegmentationModel(cps, tuple(means), rss / series.n)


def _check_criterion(criterion: str) -> str:
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    return criterion


def _penalty(n: int, cps: Sequence[int], criterion: str) -> float:
    # mbic spacing terms enter with a minus: log spacing fractions are
    # negative, so short segments raise the penalty (the uniform-prior
    # correction the criterion exists for).
    j = len(cps)
    if criterion == BIC:
        return j * math.log(n)
    pen = 1.5 * j * math.log(n)
    edges = (0, *cps, n)
    for lo, hi in zip(edges[:-1], edges[1:]):
        pen -= 0.5 * math.log((hi - lo) / n)
    return pen


def _criterion_value(n: int, sigma2: float, cps: Sequence[int], criterion: str) -> float:
    if sigma2 <= 0.0:
        return float("-inf")
    return 0.5 * n * math.log(sigma2) + _penalty(n, cps, criterion)


def _score_key(n: int, sigma2: float, cps: Sequence[int], criterion: str):
    # Total order refining the -inf sentinel: a perfect fit beats any finite
    # score, and among perfect fits the smaller penalty wins.
    pen = _penalty(n, cps, criterion)
    if sigma2 <= 0.0:
        return (0, pen)
    return (1, 0.5 * n * math.log(sigma2) + pen)


def bic_score(series: Series, changepoints: Iterable[int]) -> float:
    """(n/2) log(sigma2_hat) + J log n; lower is better.

    A perfect fit (sigma2_hat == 0, reachable only on noiseless input)
    returns -inf so that it always wins a comparison.
    """
    model = fit_segments(series, changepoints)
    return _criterion_value(series.n, model.sigma2_hat, model.changepoints, BIC)


def mbic_score(series: Series, changepoints: Iterable[int]) -> float:
    """Modified BIC: (n/2) log(sigma2_hat) + (3/2) J log n + spacing penalty.

    The spacing penalty is minus half the sum of log segment-length
    fractions (positive, largest for very short segments, zero for the
    single-segment model); it encodes a uniform prior over change-point
    configurations and guards against near-duplicate candidates.  Perfect
    fits return -inf as for :func:`bic_score`.
    """
    model = fit_segments(series, changepoints)
    return _criterion_value(series.n, model.sigma2_hat, model.changepoints, MBIC)


def _finalize(series: Series, cps: Sequence[int], criterion: str) -> SegmentationModel:
    model = fit_segments(series, cps)
    score = _criterion_value(series.n, model.sigma2_hat, model.changepoints, criterion)
    return replace(model, criterion=criterion, score=score)


def _default_jmax(n: int, cands: CandidateSet, available: int) -> int:
    if not len(cands):
        return 0
    h_min = min(e.bandwidth for e in cands)
    return min(available, n // (2 * h_min))


def rank_select(
    series: Series,
    cands: CandidateSet,
    criterion: str = BIC,
    jmax: int | None = None,
) -> SegmentationModel:
    """Evaluate the criterion on the top-J candidates for J = 0..jmax.

    Candidates enter in score order; each prefix is position-sorted before
    fitting.  Returns the minimizing model (smallest J on ties).  ``jmax``
    defaults to ``min(#candidates, n // (2 h_min))``, which the minimum
    spacing of maximizers makes a cap on meaningful model size.
    """
    criterion = _check_criterion(criterion)
    ranked = list(dict.fromkeys(e.position for e in cands))
    if jmax is None:
        jmax = _default_jmax(series.n, cands, len(ranked))
    jmax = max(0, min(int(jmax), len(ranked)))

    best_key = None
    best_model = None
    for j in range(jmax + 1):
        cps = tuple(sorted(ranked[:j]))
        model = fit_segments(series, cps)
        key = _score_key(series.n, model.sigma2_hat, cps, criterion)
        if best_key is None or key < best_key:
            best_key = key
            best_model = model
    score = _criterion_value(
        series.n, best_model.sigma2_hat, best_model.changepoints, criterion
    )
    return replace(best_model, criterion=criterion, score=score)


def _cumulative_sums(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cs = np.concatenate(([0.0], np.cumsum(y)))
    cs2 = np.concatenate(([0.0], np.cumsum(y * y)))
    return cs, cs2


def _segment_rss(cs: np.ndarray, cs2: np.ndarray, lo: int, hi: int) -> float:
    s = cs[hi] - cs[lo]
    return max(float(cs2[hi] - cs2[lo] - s * s / (hi - lo)), 0.0)


def backward_stepwise(
    series: Series, pool: CandidateSet, criterion: str = BIC
) -> SegmentationModel:
    """Prune a candidate pool one element at a time while the criterion improves.

    Each step removes the element whose removal increases the residual
    variance least (ties to the leftmost position); the walk stops as soon as
    a removal no longer decreases the criterion, so the returned model is the
    score minimum along the deletion path.
    """
    criterion = _check_criterion(criterion)
    positions = sorted({e.position for e in pool})
    cps = _validate_changepoints(series.n, positions)
    n = series.n
    cs, cs2 = _cumulative_sums(series.values)

    current = list(cps)
    edges = [0, *current, n]
    rss = sum(_segment_rss(cs, cs2, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
    key = _score_key(n, rss / n, current, criterion)

    while current:
        edges = [0, *current, n]
        best_rss = None
        best_idx = None
        for i in range(len(current)):
            lo, mid, hi = edges[i], edges[i + 1], edges[i + 2]
            trial = (
                rss
                - _segment_rss(cs, cs2, lo, mid)
                - _segment_rss(cs, cs2, mid, hi)
                + _segment_rss(cs, cs2, lo, hi)
            )
            if best_rss is None or trial < best_rss:
                best_rss = trial
                best_idx = i
        trial_cps = current[:best_idx] + current[best_idx + 1 :]
        trial_key = _score_key(n, best_rss / n, trial_cps, criterion)
        if trial_key < key:
            current, rss, key = trial_cps, best_rss, trial_key
        else:
            break
    return _finalize(series, current, criterion)


def best_subset_select(
    series: Series, pool: CandidateSet, criterion: str = BIC
) -> SegmentationModel:
    """Exhaustive subset search over a small candidate pool.

    Cost grows as 2^|pool|; intended for pools of at most a dozen positions.
    Ties resolve to the smallest model, then lexicographically by position.
    """
    criterion = _check_criterion(criterion)
    positions = sorted({e.position for e in pool})
    _validate_changepoints(series.n, positions)
    n = series.n
    cs, cs2 = _cumulative_sums(series.values)

    best_key = None
    best_cps: tuple[int, ...] = ()
    for j in range(len(positions) + 1):
        for combo in combinations(positions, j):
            edges = (0, *combo, n)
            rss = sum(
                _segment_rss(cs, cs2, lo, hi)
                for lo, hi in zip(edges[:-1], edges[1:])
            )
            key = _score_key(n, rss / n, combo, criterion)
            if best_key is None or key < best_key:
                best_key = key
                best_cps = combo
    return _finalize(series, best_cps, criterion)


def estimate_sigma(series: Series, h: int) -> float:
    """Noise scale from residuals of a centred moving average of half-width h.

    Windows truncate at the series ends.  The estimate is slightly below the
    true scale on pure noise (the fitted mean absorbs part of each point) and
    slightly above it when jumps leak into the local mean; both effects are
    small for h well below the segment lengths.
    """
    h = int(h)
    if h < 1:
        raise BandwidthNonPositive(f"bandwidth must be >= 1, got {h}")
    y = series.values
    n = series.n
    cs = np.concatenate(([0.0], np.cumsum(y)))
    idx = np.arange(n)
    lo = np.maximum(idx - h, 0)
    hi = np.minimum(idx + h + 1, n)
    local_mean = (cs[hi] - cs[lo]) / (hi - lo)
    return float(np.sqrt(np.mean((y - local_mean) ** 2)))


class PartitionFit(NamedTuple):
    """Optimal split of a given size: (size, change-points, variance MLE)."""

    size: int
    changepoints: tuple[int, ...]
    sigma2: float


def exhaustive_dp_oracle(series: Series, jmax: int) -> list[PartitionFit]:
    """Minimum-RSS change-point sets of every size 0..jmax, by dynamic programming.

    Exact-search oracle for testing on short inputs (n <= 500 guard); the
    O(n^2 jmax) cost makes it unusable at scale, which is the whole point of
    the screening approach.  ``sigma2`` is non-increasing in the size.
    """
    n = series.n
    if n > DP_ORACLE_MAX_N:
        raise SeriesTooLong(f"exact oracle limited to n <= {DP_ORACLE_MAX_N}, got {n}")
    jmax = max(0, min(int(jmax), n - 1))
    cs, cs2 = _cumulative_sums(series.values)

    ends = np.arange(1, n + 1)
    cost = np.empty((jmax + 1, n + 1))
    cost.fill(np.inf)
    back = np.zeros((jmax + 1, n + 1), dtype=np.int64)
    first_seg = cs2[1:] - (cs[1:] ** 2) / ends
    cost[0, 1:] = np.maximum(first_seg, 0.0)

    for k in range(1, jmax + 1):
        for i in range(k + 1, n + 1):
            c = np.arange(k, i)
            s = cs[i] - cs[c]
            seg = np.maximum(cs2[i] - cs2[c] - s * s / (i - c), 0.0)
            total = cost[k - 1, c] + seg
            b = int(np.argmin(total))  # first minimum: leftmost split on ties
            cost[k, i] = total[b]
            back[k, i] = c[b]

    results = []
    for k in range(jmax + 1):
        cps = []
        i = n
        for kk in range(k, 0, -1):
            i = int(back[kk, i])
            cps.append(i)
        results.append(PartitionFit(k, tuple(reversed(cps)), float(cost[k, n]) / n))
    return results
