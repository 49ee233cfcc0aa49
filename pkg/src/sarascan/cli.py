"""Command-line front end: detection runs, simulation studies, benchmarks.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 internal
error.  Every command is deterministic given its flags; randomness flows
through ``--seed`` only.  (The ``bench`` command reports wall-clock timings,
which naturally vary between runs.)
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import replace

from . import io
from .bench import run_bench
from .diagnostics import (
    Series,
    equal_weight_diagnostic,
    local_maximizers,
    signed_maximizers,
    threshold_candidates,
)
from .errors import (
    EmptyGroup,
    InvalidSeries,
    NonFiniteValue,
    ParseError,
    SarascanError,
)
from .multibandwidth import MultiBandConfig, default_bandwidths, msara_detect
from .selection import SegmentationModel, estimate_sigma, fit_segments, rank_select
from .simulation import (
    TruthSpec,
    generate,
    model_size_study,
    msara_detector,
    power_study,
    sara_detector,
    six_changepoint_benchmark,
    sure_coverage_study,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4

DEFAULT_SARA_BANDWIDTH = 10


class ConfigError(Exception):
    """Bad flag combination or value."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 3
        raise ConfigError(message)


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="sarascan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="segment one or more series from a TSV file")
    det.add_argument("--input", required=True, help="series TSV (label, position, value)")
    det.add_argument("--output", required=True, help="segmentation TSV to write")
    det.add_argument("--method", choices=("msara", "sara"), default="msara")
    det.add_argument(
        "--bandwidths",
        default="auto",
        help="comma-separated window half-widths, or 'auto' for the log-n ladder "
        f"(sara default: {DEFAULT_SARA_BANDWIDTH})",
    )
    det.add_argument(
        "--criterion",
        choices=("threshold", "bic", "mbic"),
        default=None,
        help="model-size rule (default: mbic for msara, threshold for sara)",
    )
    det.add_argument(
        "--threshold-rule",
        choices=("conservative", "logn", "fixed"),
        default=None,
        help="sara threshold: C*sqrt(2/h)*sigma, 2*sqrt(log n)*sqrt(2/h)*sigma, "
        "or a fixed --threshold (default: logn)",
    )
    det.add_argument("--threshold", type=float, default=None, help="fixed threshold value")
    det.add_argument("--C", type=float, default=2.0, help="conservative-rule constant")
    det.add_argument("--sigma", type=float, default=None, help="known noise scale")
    det.add_argument("--seed", type=int, default=0, help="unused by detect; kept for uniformity")
    det.add_argument("--jmax", type=int, default=None, help="largest model size to score")
    det.add_argument("--profile-out", default=None, help="dump the diagnostic profile (sara, single label)")

    sim = sub.add_parser("simulate", help="generate data or run a study")
    simsub = sim.add_subparsers(dest="study", required=True)

    ser = simsub.add_parser("series", help="write a simulated series TSV")
    ser.add_argument("--design", choices=("two_jump", "six_cnv", "custom"), required=True)
    ser.add_argument("--n", type=int, default=400)
    ser.add_argument("--L", type=int, default=12, help="two_jump: elevated segment length")
    ser.add_argument("--delta", type=float, default=1.0, help="two_jump: jump size")
    ser.add_argument("--sigma", type=float, default=0.25)
    ser.add_argument("--trend", choices=("none", "long", "short"), default="none")
    ser.add_argument("--changepoints", default="", help="custom: comma-separated positions")
    ser.add_argument("--jumps", default="", help="custom: comma-separated jump sizes")
    ser.add_argument("--baseline", type=float, default=0.0)
    ser.add_argument("--label", default=None)
    ser.add_argument("--seed", type=int, default=0)
    ser.add_argument("--out", required=True)

    pow_ = simsub.add_parser("power", help="size-calibrated power study")
    pow_.add_argument("--n", type=int, default=100)
    pow_.add_argument("--jsr", default="0.5,1,1.5,2,2.5", help="jump-to-noise ratios")
    pow_.add_argument("--locations", default="10,30,50,uniform")
    pow_.add_argument("--alpha", default="0.05,0.01")
    pow_.add_argument("--bandwidths", default="10,15")
    pow_.add_argument("--reps", type=int, default=10_000)
    pow_.add_argument("--seed", type=int, default=0)
    pow_.add_argument("--out", required=True)

    cov = simsub.add_parser("coverage", help="two-jump recovery study")
    cov.add_argument("--pairs", default="400:12,3000:16,20000:20,160000:24", help="n:L pairs")
    cov.add_argument("--delta", type=float, default=1.0)
    cov.add_argument("--sigmas", default="0.5,0.25")
    cov.add_argument("--reps", type=int, default=1000)
    cov.add_argument("--rule", choices=("three_quarters", "half"), default="three_quarters")
    cov.add_argument("--seed", type=int, default=0)
    cov.add_argument("--out", required=True)

    mod = simsub.add_parser("modelsize", help="six-change-point benchmark study")
    mod.add_argument("--sigma", type=float, default=0.2)
    mod.add_argument("--trend", choices=("none", "long", "short"), default="none")
    mod.add_argument("--reps", type=int, default=1000)
    mod.add_argument("--methods", default="sara15,msara", help="e.g. sara9,sara15,msara")
    mod.add_argument("--tol", type=int, default=5)
    mod.add_argument("--seed", type=int, default=0)
    mod.add_argument("--out", required=True)

    ben = sub.add_parser("bench", help="screen+rank timing per series length")
    ben.add_argument("--n-grid", default="100000,200000,400000")
    ben.add_argument("--reps", type=int, default=5)
    ben.add_argument("--h", type=int, default=None)
    ben.add_argument("--impl", choices=("auto", "python", "compiled", "both"), default="auto")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True)

    return parser


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------


def _sara_threshold(series: Series, h: int, args) -> float:
    rule = args.threshold_rule or "logn"
    if rule == "fixed":
        if args.threshold is None:
            raise ConfigError("--threshold-rule fixed requires --threshold")
        return float(args.threshold)
    sigma = args.sigma if args.sigma is not None else estimate_sigma(series, h)
    if rule == "conservative":
        return args.C * math.sqrt(2.0 / h) * sigma
    return 2.0 * math.sqrt(math.log(series.n)) * math.sqrt(2.0 / h) * sigma


def _detect_one(series: Series, args):
    """Run the configured pipeline on one series; returns (model, profile or None)."""
    if args.method == "msara":
        if args.threshold_rule is not None or args.threshold is not None:
            raise ConfigError("threshold flags apply to --method sara only")
        criterion = args.criterion or "mbic"
        if criterion == "threshold":
            raise ConfigError("msara needs --criterion bic or mbic")
        bandwidths = (
            default_bandwidths(series.n)
            if args.bandwidths == "auto"
            else _csv_ints(args.bandwidths)
        )
        cfg = MultiBandConfig(
            bandwidths=tuple(bandwidths),
            threshold_constant=args.C,
            criterion=criterion,
            sigma=args.sigma,
        )
        return msara_detect(series, cfg), None

    h = (
        DEFAULT_SARA_BANDWIDTH
        if args.bandwidths == "auto"
        else _csv_ints(args.bandwidths)[0]
    )
    profile = equal_weight_diagnostic(series, h)
    criterion = args.criterion or "threshold"
    if criterion == "threshold":
        # the thresholding estimator is defined on |D| maximizers
        lam = _sara_threshold(series, h, args)
        kept = threshold_candidates(local_maximizers(profile), lam)
        model = fit_segments(series, sorted(kept.positions()))
        model = replace(model, criterion="threshold", score=lam)
    else:
        model = rank_select(series, signed_maximizers(profile), criterion, args.jmax)
    return model, profile


def run_detect(args) -> int:
    """Segment every labelled series in the input file; exit code on return."""
    series_list = sorted(io.ingest(args.input), key=lambda s: s.label or "")
    if args.profile_out is not None:
        if args.method != "sara":
            raise ConfigError("--profile-out requires --method sara")
        if len(series_list) != 1:
            raise ConfigError("--profile-out requires a single-label input")
    fitted: list[tuple[Series, SegmentationModel]] = []
    profile = None
    for series in series_list:
        model, prof = _detect_one(series, args)
        fitted.append((series, model))
        profile = prof
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        io.write_segments(fh, fitted)
    if args.profile_out is not None and profile is not None:
        with open(args.profile_out, "w", encoding="utf-8", newline="") as fh:
            io.write_profile(fh, profile)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _series_spec(args) -> TruthSpec:
    if args.design == "two_jump":
        return TruthSpec(
            n=args.n,
            changepoints=(args.n // 2, args.n // 2 + args.L),
            jump_sizes=(args.delta, -args.delta),
            sigma=args.sigma,
            seed=args.seed,
        )
    if args.design == "six_cnv":
        return six_changepoint_benchmark(sigma=args.sigma, trend=args.trend, seed=args.seed)
    cps = _csv_ints(args.changepoints) if args.changepoints else []
    jumps = _csv_floats(args.jumps) if args.jumps else []
    return TruthSpec(
        n=args.n,
        changepoints=tuple(cps),
        jump_sizes=tuple(jumps),
        baseline=args.baseline,
        sigma=args.sigma,
        seed=args.seed,
    )


def run_simulate_series(args) -> int:
    spec = _series_spec(args)
    series = generate(spec)
    series = Series(series.values, label=args.label or args.design)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        io.write_series(fh, [series])
    return EXIT_OK


def run_simulate_power(args) -> int:
    jsr = _csv_floats(args.jsr)
    locations = [
        part if part == "uniform" else int(part)
        for part in args.locations.split(",")
        if part
    ]
    rows = []
    for alpha in _csv_floats(args.alpha):
        report = power_study(
            n=args.n,
            jsr_grid=jsr,
            locations=locations,
            alpha=alpha,
            bandwidths=_csv_ints(args.bandwidths),
            reps=args.reps,
            seed=args.seed,
        )
        for (test, location, jsr_value, a), value in report.power.items():
            rows.append((jsr_value, test, location, a, value))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("jsr\ttest\tlocation\talpha\tpower\n")
        for jsr_value, test, location, alpha, value in rows:
            fh.write(
                f"{io.fmt_float(jsr_value)}\t{test}\t{location}\t{io.fmt_float(alpha)}\t{io.fmt_float(value)}\n"
            )
    return EXIT_OK


def run_simulate_coverage(args) -> int:
    pairs = []
    for part in args.pairs.split(","):
        if not part:
            continue
        try:
            n_text, l_text = part.split(":")
            pairs.append((int(n_text), int(l_text)))
        except ValueError:
            raise ConfigError(f"expected n:L, got {part!r}") from None
    reports = sure_coverage_study(
        pairs=pairs,
        delta=args.delta,
        sigmas=_csv_floats(args.sigmas),
        reps=args.reps,
        seed=args.seed,
        rule=args.rule,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            "n\tL\tsigma\tjhat_eq2\tjhat_lt2\tjhat_gt2\tjhat_mean"
            "\tscp1\tmean_err1\tscp2\tmean_err2\tjoint\n"
        )
        for (n, L, sigma), rep in reports.items():
            hist = rep.jhat_histogram
            total = rep.replicate_count
            mean_j = sum(j * c for j, c in hist.items()) / total
            lt = sum(c for j, c in hist.items() if j < 2) / total
            gt = sum(c for j, c in hist.items() if j > 2) / total
            scp1, scp2 = rep.scp_per_cp
            fh.write(
                f"{n}\t{L}\t{io.fmt_float(sigma)}\t{io.fmt_float(rep.jhat_fraction(2))}"
                f"\t{io.fmt_float(lt)}\t{io.fmt_float(gt)}\t{io.fmt_float(mean_j)}"
                f"\t{io.fmt_float(scp1.coverage)}\t{io.fmt_float(scp1.mean_abs_error)}"
                f"\t{io.fmt_float(scp2.coverage)}\t{io.fmt_float(scp2.mean_abs_error)}"
                f"\t{io.fmt_float(rep.joint_coverage)}\n"
            )
    return EXIT_OK


_SARA_METHOD = re.compile(r"^sara(\d+)$")


def _parse_methods(text: str):
    detectors = {}
    for part in text.split(","):
        if not part:
            continue
        if part == "msara":
            detectors[part] = msara_detector()
            continue
        match = _SARA_METHOD.match(part)
        if not match:
            raise ConfigError(f"unknown method {part!r} (use msara or sara<h>)")
        detectors[part] = sara_detector(int(match.group(1)))
    if not detectors:
        raise ConfigError("no methods given")
    return detectors


def run_simulate_modelsize(args) -> int:
    detectors = _parse_methods(args.methods)
    reports = model_size_study(
        detectors,
        sigma=args.sigma,
        trend=args.trend,
        reps=args.reps,
        seed=args.seed,
        tol=args.tol,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            "method\tle5\tj6\tj7\tj8\tgt8"
            + "".join(f"\tcp{i}" for i in range(1, 7))
            + "\tafd\n"
        )
        for name, rep in reports.items():
            hist = rep.jhat_histogram
            buckets = (
                sum(c for j, c in hist.items() if j <= 5),
                hist.get(6, 0),
                hist.get(7, 0),
                hist.get(8, 0),
                sum(c for j, c in hist.items() if j > 8),
            )
            fh.write(
                name
                + "".join(f"\t{b}" for b in buckets)
                + "".join(f"\t{io.fmt_float(r)}" for r in rep.detection_rate_per_cp)
                + f"\t{io.fmt_float(rep.afd)}\n"
            )
    return EXIT_OK


def run_bench_cmd(args) -> int:
    results = run_bench(
        _csv_ints(args.n_grid),
        reps=args.reps,
        h=args.h,
        impl=args.impl,
        seed=args.seed,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        if args.impl == "both":
            fh.write("n\timpl\tmedian_seconds\n")
            for r in results:
                fh.write(f"{r.n}\t{r.backend}\t{io.fmt_float(r.median_seconds)}\n")
        else:
            fh.write("n\tmedian_seconds\n")
            for r in results:
                fh.write(f"{r.n}\t{io.fmt_float(r.median_seconds)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _dispatch(args) -> int:
    if args.command == "detect":
        return run_detect(args)
    if args.command == "simulate":
        if args.study == "series":
            return run_simulate_series(args)
        if args.study == "power":
            return run_simulate_power(args)
        if args.study == "coverage":
            return run_simulate_coverage(args)
        return run_simulate_modelsize(args)
    return run_bench_cmd(args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except ConfigError as exc:
        print(f"sarascan: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, NonFiniteValue, EmptyGroup, InvalidSeries) as exc:
        print(f"sarascan: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"sarascan: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SarascanError, ValueError) as exc:
        print(f"sarascan: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # invariant violation; never expected
        print(f"sarascan: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
