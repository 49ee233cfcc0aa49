"""Simulation designs, the global likelihood-ratio comparator, and scoring.

Monte-Carlo harness for three study families: size-calibrated power of the
single-jump tests, two-jump recovery rates across sequence scales, and a
six-change-point CNV-style benchmark scored by model size, per-change-point
detection, and falsely discovered count.

Randomness always flows through explicit integer seeds.  Draws come from
NumPy's PCG64 generator (``numpy.random.default_rng``) with its standard
normal transform; replicate k of a study uses the k-th 64-bit child seed
derived from the master seed via ``numpy.random.SeedSequence``, so serial
and parallel execution produce identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .diagnostics import (
    Series,
    equal_weight_diagnostic,
    local_maximizers,
    signed_maximizers,
    threshold_candidates,
)
from .errors import InvalidSpec
from .multibandwidth import MultiBandConfig, msara_detect
from .selection import MBIC, SegmentationModel, rank_select

TREND_FREQUENCIES = {"none": 0.0, "long": 0.01, "short": 0.025}


@dataclass(frozen=True)
class TruthSpec:
    """Ground truth for one simulated sequence.

    The mean is ``baseline`` plus the cumulative jumps, with position x
    separating observations x and x + 1; an optional sinusoidal trend
    ``trend_amp * sigma * sin(trend_freq * pi * i)`` (i = 1..n) is added on
    top.  Noise is i.i.d. normal with scale ``sigma`` (0 allowed for
    noiseless fixtures).
    """

    n: int
    changepoints: tuple[int, ...] = ()
    jump_sizes: tuple[float, ...] = ()
    baseline: float = 0.0
    sigma: float = 1.0
    trend_amp: float = 0.0
    trend_freq: float = 0.0
    seed: int = 0

    def __post_init__(self):
        cps = tuple(int(c) for c in self.changepoints)
        jumps = tuple(float(d) for d in self.jump_sizes)
        object.__setattr__(self, "changepoints", cps)
        object.__setattr__(self, "jump_sizes", jumps)
        if self.n < 2:
            raise InvalidSpec(f"need n >= 2, got {self.n}")
        if len(cps) != len(jumps):
            raise InvalidSpec("changepoints and jump_sizes must have equal length")
        if any(not 0 < c < self.n for c in cps):
            raise InvalidSpec(f"change-points must lie in (0, {self.n})")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise InvalidSpec("change-points must be strictly increasing")
        if self.sigma < 0:
            raise InvalidSpec("sigma must be nonnegative")
        if self.trend_amp < 0 or self.trend_freq < 0:
            raise InvalidSpec("trend parameters must be nonnegative")

    def mean_vector(self) -> np.ndarray:
        mu = np.full(self.n, float(self.baseline))
        for c, d in zip(self.changepoints, self.jump_sizes):
            mu[c:] += d
        if self.trend_amp > 0.0 and self.trend_freq > 0.0:
            i = np.arange(1, self.n + 1, dtype=np.float64)
            mu = mu + self.trend_amp * self.sigma * np.sin(self.trend_freq * np.pi * i)
        return mu


def child_seeds(master_seed: int, count: int) -> np.ndarray:
    """Per-replicate 64-bit seeds derived deterministically from one master."""
    return np.random.SeedSequence(master_seed).generate_state(count, dtype=np.uint64)


def generate(spec: TruthSpec) -> Series:
    """Draw one sequence from the truth; identical spec means identical output."""
    rng = np.random.default_rng(int(spec.seed))
    values = spec.mean_vector() + spec.sigma * rng.standard_normal(spec.n)
    return Series(values, label=None)


def lr_statistic(series: Series) -> float:
    """Largest squared standardized gap between a prefix sum and its null mean.

    The classical global statistic for a single mean shift at unknown
    position (variance taken as known and 1); linear time via partial sums.
    """
    y = series.values
    n = series.n
    s = np.cumsum(y)
    j = np.arange(1, n, dtype=np.float64)
    num = (j * s[-1] / n - s[:-1]) ** 2
    den = j * (1.0 - j / n)
    return float(np.max(num / den))


def theorem1_bound(delta: float, L: int, sigma: float, n: int) -> float:
    """Lower bound on joint recovery probability at h = L/2, lambda = delta/2.

    With detectability S^2 = delta^2 L / sigma^2, the bound is
    ``1 - (8 / S) exp(log n - S^2 / 32)`` whenever S^2 >= 32 log n, floored
    at zero; below that requirement the trivial bound 0 is returned.
    """
    s2 = float(delta) * float(delta) * float(L) / (float(sigma) * float(sigma))
    if s2 < 32.0 * math.log(n):
        return 0.0
    s = math.sqrt(s2)
    return max(0.0, 1.0 - (8.0 / s) * math.exp(math.log(n) - s2 / 32.0))


class DetectionOutcome(NamedTuple):
    """Per-change-point detection flags plus the falsely discovered count."""

    detected: tuple[bool, ...]
    false_discoveries: int


def _nearest_matching(true_cps: Sequence[int], est_cps: Sequence[int]) -> list[float | None]:
    """Greedy closest-pair matching; each estimate serves at most one truth."""
    pairs = sorted(
        (abs(e - t), ti, ei)
        for ti, t in enumerate(true_cps)
        for ei, e in enumerate(est_cps)
    )
    matched: dict[int, float] = {}
    used: set[int] = set()
    for dist, ti, ei in pairs:
        if ti in matched or ei in used:
            continue
        matched[ti] = float(dist)
        used.add(ei)
    return [matched.get(ti) for ti in range(len(true_cps))]


def detection_metrics(
    truth: TruthSpec, estimate: SegmentationModel, tol: int = 5
) -> DetectionOutcome:
    """Score an estimate against the truth at location tolerance ``tol``.

    A true change-point is detected when its greedily matched estimate lies
    within ``tol``; an estimate is falsely discovered when no true
    change-point at all lies within ``tol`` of it.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    true_cps = truth.changepoints
    est_cps = estimate.changepoints
    errors = _nearest_matching(true_cps, est_cps)
    detected = tuple(e is not None and e <= tol for e in errors)
    false = sum(1 for e in est_cps if all(abs(e - t) > tol for t in true_cps))
    return DetectionOutcome(detected, false)


class CpCoverage(NamedTuple):
    """Coverage fraction and mean |error| (over covered replicates) for one cp."""

    coverage: float
    mean_abs_error: float


@dataclass(frozen=True)
class StudyReport:
    """Aggregated Monte-Carlo metrics; studies fill the fields they produce."""

    replicate_count: int
    jhat_histogram: dict[int, int] | None = None
    scp_per_cp: tuple[CpCoverage, ...] | None = None
    joint_coverage: float | None = None
    detection_rate_per_cp: tuple[float, ...] | None = None
    afd: float | None = None
    power: dict[tuple, float] | None = None
    critical_values: dict[str, float] | None = None

    def __post_init__(self):
        if self.jhat_histogram is not None:
            total = sum(self.jhat_histogram.values())
            if total != self.replicate_count:
                raise ValueError(
                    f"histogram sums to {total}, expected {self.replicate_count}"
                )
        for frac in self._fractions():
            if not 0.0 <= frac <= 1.0:
                raise ValueError(f"fraction {frac} outside [0, 1]")

    def _fractions(self):
        if self.scp_per_cp:
            for cov in self.scp_per_cp:
                yield cov.coverage
        if self.joint_coverage is not None:
            yield self.joint_coverage
        if self.detection_rate_per_cp:
            yield from self.detection_rate_per_cp
        if self.power:
            yield from self.power.values()

    def jhat_fraction(self, j: int) -> float:
        """Fraction of replicates whose estimated model size equals j."""
        if not self.jhat_histogram:
            return 0.0
        return self.jhat_histogram.get(j, 0) / self.replicate_count

    def jhat_fraction_below(self, j: int) -> float:
        if not self.jhat_histogram:
            return 0.0
        under = sum(c for k, c in self.jhat_histogram.items() if k < j)
        return under / self.replicate_count


# ---------------------------------------------------------------------------
# Power study (single change-point tests)
# ---------------------------------------------------------------------------


def _noise_matrix(n: int, seeds: np.ndarray) -> np.ndarray:
    out = np.empty((len(seeds), n))
    for i, s in enumerate(seeds):
        out[i] = np.random.default_rng(int(s)).standard_normal(n)
    return out


def _lr_rows(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[1]
    s = np.cumsum(matrix, axis=1)
    j = np.arange(1, n, dtype=np.float64)
    num = (j * s[:, -1:] / n - s[:, :-1]) ** 2
    den = j * (1.0 - j / n)
    return np.max(num / den, axis=1)


def _max_contrast_rows(matrix: np.ndarray, h: int) -> np.ndarray:
    """Row-wise max |window contrast| over the full domain [h, n-h].

    Direct partial-sum evaluation, independent of the recursion kernels.
    """
    n = matrix.shape[1]
    cs = np.concatenate(
        [np.zeros((matrix.shape[0], 1)), np.cumsum(matrix, axis=1)], axis=1
    )
    left = cs[:, h : n - h + 1] - cs[:, 0 : n - 2 * h + 1]
    right = cs[:, 2 * h : n + 1] - cs[:, h : n - h + 1]
    return np.max(np.abs(left - right) / h, axis=1)


def _test_statistics(matrix: np.ndarray, bandwidths: Sequence[int]) -> dict[str, np.ndarray]:
    stats = {"lr": _lr_rows(matrix)}
    for h in bandwidths:
        stats[f"sara_h{h}"] = _max_contrast_rows(matrix, h)
    return stats


def power_study(
    n: int = 100,
    jsr_grid: Sequence[float] = (0.5, 1.0, 1.5, 2.0, 2.5),
    locations: Sequence = (10, 30, 50, "uniform"),
    alpha: float = 0.05,
    bandwidths: Sequence[int] = (10, 15),
    reps: int = 10_000,
    seed: int = 0,
) -> StudyReport:
    """Size-calibrated power of the global test and the max-contrast scans.

    Critical values come from ``reps`` fresh null replicates (empirical
    1 - alpha quantile).  For each location and jump-to-noise ratio the
    rejection rate is estimated on ``reps`` further replicates; the noise is
    shared across the ratio grid (common random numbers), which tightens the
    power comparisons the study exists for.  A "uniform" location draws the
    jump position per replicate, uniformly over the positions where every
    configured window fits.
    """
    bandwidths = tuple(int(h) for h in bandwidths)
    if not 0.0 < alpha < 1.0:
        raise InvalidSpec(f"alpha must be in (0, 1), got {alpha}")
    if any(h < 1 or h > n // 2 for h in bandwidths):
        raise InvalidSpec(f"bandwidths {bandwidths} incompatible with n = {n}")
    h_max = max(bandwidths)
    if n - 2 * h_max < 2:
        raise InvalidSpec("no interior positions for a uniform location draw")

    seeds = child_seeds(seed, reps * (1 + len(locations)))
    null = _noise_matrix(n, seeds[:reps])
    critical = {
        name: float(np.quantile(rows, 1.0 - alpha))
        for name, rows in _test_statistics(null, bandwidths).items()
    }

    power: dict[tuple, float] = {}
    for li, loc in enumerate(locations):
        block = seeds[(1 + li) * reps : (2 + li) * reps]
        if loc == "uniform":
            locs = np.empty(reps, dtype=np.int64)
            noise = np.empty((reps, n))
            for i, s in enumerate(block):
                rng = np.random.default_rng(int(s))
                locs[i] = rng.integers(h_max + 1, n - h_max)
                noise[i] = rng.standard_normal(n)
        else:
            locs = np.full(reps, int(loc), dtype=np.int64)
            noise = _noise_matrix(n, block)
        step = (np.arange(n)[None, :] >= locs[:, None]).astype(np.float64)
        for jsr in jsr_grid:
            shifted = noise + float(jsr) * step
            for name, rows in _test_statistics(shifted, bandwidths).items():
                power[(name, str(loc), float(jsr), float(alpha))] = float(
                    np.mean(rows > critical[name])
                )
    return StudyReport(replicate_count=reps, power=power, critical_values=critical)


# ---------------------------------------------------------------------------
# Two-jump recovery study
# ---------------------------------------------------------------------------

COVERAGE_PAIRS = ((400, 12), (3000, 16), (20000, 20), (160000, 24))


def _coverage_parameters(L: int, delta: float, rule: str) -> tuple[int, float]:
    if rule == "three_quarters":
        return int(round(0.75 * L)), 0.75 * delta
    if rule == "half":
        return L // 2, 0.5 * delta
    raise ValueError(f"unknown rule {rule!r}")


def sure_coverage_study(
    pairs: Sequence[tuple[int, int]] = COVERAGE_PAIRS,
    delta: float = 1.0,
    sigmas: Sequence[float] = (0.5, 0.25),
    reps: int = 1000,
    seed: int = 0,
    rule: str = "three_quarters",
) -> dict[tuple[int, int, float], StudyReport]:
    """Thresholded-screen recovery of a short elevated segment, per (n, L, sigma).

    The truth places jumps of +-delta at n/2 and n/2 + L.  Rule
    "three_quarters" runs the operating point h = round(3L/4), lambda =
    3 delta / 4; rule "half" runs h = L/2, lambda = delta/2, the parameters
    the nonasymptotic guarantee of :func:`theorem1_bound` speaks about.

    Each report carries the model-size histogram, per-change-point coverage
    at |error| < h with the mean |error| over covered replicates, and the
    joint event (exact count and every ordered |error| < h).
    """
    configs = [(int(n), int(L), float(s)) for n, L in pairs for s in sigmas]
    all_seeds = child_seeds(seed, reps * len(configs))
    out: dict[tuple[int, int, float], StudyReport] = {}

    for ci, (n, L, sigma) in enumerate(configs):
        h, lam = _coverage_parameters(L, delta, rule)
        true_cps = (n // 2, n // 2 + L)
        block = all_seeds[ci * reps : (ci + 1) * reps]
        hist: dict[int, int] = {}
        covered = [0, 0]
        err_sum = [0.0, 0.0]
        joint = 0
        for s in block:
            spec = TruthSpec(
                n=n,
                changepoints=true_cps,
                jump_sizes=(delta, -delta),
                sigma=sigma,
                seed=int(s),
            )
            series = generate(spec)
            cands = threshold_candidates(
                local_maximizers(equal_weight_diagnostic(series, h)), lam
            )
            est = sorted(cands.positions())
            hist[len(est)] = hist.get(len(est), 0) + 1
            errors = _nearest_matching(true_cps, est)
            for j, e in enumerate(errors):
                if e is not None and e < h:
                    covered[j] += 1
                    err_sum[j] += e
            if len(est) == len(true_cps) and all(
                abs(e - t) < h for e, t in zip(est, true_cps)
            ):
                joint += 1
        scp = tuple(
            CpCoverage(
                covered[j] / reps,
                err_sum[j] / covered[j] if covered[j] else float("nan"),
            )
            for j in range(2)
        )
        out[(n, L, sigma)] = StudyReport(
            replicate_count=reps,
            jhat_histogram=hist,
            scp_per_cp=scp,
            joint_coverage=joint / reps,
        )
    return out


# ---------------------------------------------------------------------------
# Six-change-point CNV benchmark
# ---------------------------------------------------------------------------


def six_changepoint_benchmark(
    sigma: float = 0.2, trend: str | float = "none", seed: int = 0
) -> TruthSpec:
    """A 497-marker benchmark with six mean shifts of mixed sizes.

    The first jump is faint (0.26) and two change-points sit only nine
    markers apart, which together exercise both large and small bandwidths.
    ``trend`` is "none", "long" or "short" (or a frequency directly); the
    trend amplitude is 0.25 sigma, mimicking the periodic drift seen in
    array intensity data.
    """
    freq = TREND_FREQUENCIES[trend] if isinstance(trend, str) else float(trend)
    return TruthSpec(
        n=497,
        changepoints=(137, 224, 241, 298, 307, 331),
        jump_sizes=(0.26, 0.99, -1.6, 0.69, -0.85, 0.53),
        baseline=-0.18,
        sigma=sigma,
        trend_amp=0.25,
        trend_freq=freq,
        seed=seed,
    )


Detector = Callable[[Series], SegmentationModel]


def sara_detector(h: int, criterion: str = MBIC, jmax: int | None = None) -> Detector:
    """Single-bandwidth pipeline: signed screen, rank, pick the model size by criterion."""

    def run(series: Series) -> SegmentationModel:
        cands = signed_maximizers(equal_weight_diagnostic(series, h))
        return rank_select(series, cands, criterion, jmax)

    return run


def msara_detector(
    bandwidths: Sequence[int] = (9, 15, 21),
    threshold_constant: float = 2.0,
    criterion: str = MBIC,
    sigma: float | None = None,
) -> Detector:
    """Multi-bandwidth pipeline with conservative thresholds and subset selection."""
    cfg = MultiBandConfig(
        bandwidths=tuple(bandwidths),
        threshold_constant=threshold_constant,
        criterion=criterion,
        sigma=sigma,
    )

    def run(series: Series) -> SegmentationModel:
        return msara_detect(series, cfg)

    return run


def model_size_study(
    detectors: Mapping[str, Detector],
    sigma: float = 0.2,
    trend: str | float = "none",
    reps: int = 1000,
    seed: int = 0,
    tol: int = 5,
) -> dict[str, StudyReport]:
    """Run each detector over seeded benchmark replicates and score it.

    Reports the model-size histogram, per-change-point detection rate at
    |error| <= tol, and the mean falsely discovered count.
    """
    base = six_changepoint_benchmark(sigma=sigma, trend=trend)
    seeds = child_seeds(seed, reps)
    n_cp = len(base.changepoints)
    hist = {name: {} for name in detectors}
    det_counts = {name: [0] * n_cp for name in detectors}
    false_total = {name: 0 for name in detectors}

    for s in seeds:
        spec = replace(base, seed=int(s))
        series = generate(spec)
        for name, detect in detectors.items():
            model = detect(series)
            h = hist[name]
            h[model.size] = h.get(model.size, 0) + 1
            outcome = detection_metrics(spec, model, tol)
            for j, hit in enumerate(outcome.detected):
                det_counts[name][j] += hit
            false_total[name] += outcome.false_discoveries

    return {
        name: StudyReport(
            replicate_count=reps,
            jhat_histogram=hist[name],
            detection_rate_per_cp=tuple(c / reps for c in det_counts[name]),
            afd=false_total[name] / reps,
        )
        for name in detectors
    }
