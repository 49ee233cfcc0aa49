"""TSV ingestion and emission.

All files are UTF-8, tab-separated, LF line endings, "." decimal separator.
Floats are written with 12 significant digits, enough for an ingest/emit
round trip to preserve values at that precision.

Formats
-------
series:        ``label<TAB>position<TAB>value`` (one observation per row)
profile:       ``position<TAB>D`` (window contrast per domain position; the
               equal-weight sign convention is left mean minus right mean)
segmentation:  ``label<TAB>start<TAB>end<TAB>mean`` (1-based inclusive index
               ranges; genomic positions substituted when the series has them)
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, TextIO

import numpy as np

from .diagnostics import DiagnosticProfile, Series
from .errors import EmptyGroup, NonFiniteValue, ParseError
from .selection import SegmentationModel

SERIES_HEADER = "label\tposition\tvalue"
PROFILE_HEADER = "position\tD"
SEGMENTS_HEADER = "label\tstart\tend\tmean"


def fmt_float(x: float) -> str:
    return format(float(x), ".12g")


def ingest(path) -> list[Series]:
    """Parse a series TSV into one Series per label.

    Rows are grouped by label (one Series each, in first-appearance order)
    and sorted by position within a group.  Non-finite or unparseable values
    are rejected with their line number; a label needs at least two rows.
    """
    groups: dict[str, list[tuple[int, float, int]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != SERIES_HEADER:
            raise ParseError(1, f"expected header {SERIES_HEADER!r}, got {header!r}")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(lineno, f"expected 3 columns, got {len(parts)}")
            label, pos_text, val_text = parts
            try:
                position = int(pos_text)
            except ValueError:
                raise ParseError(lineno, f"bad position {pos_text!r}") from None
            try:
                value = float(val_text)
            except ValueError:
                raise NonFiniteValue(lineno, f"bad value {val_text!r}") from None
            if not math.isfinite(value):
                raise NonFiniteValue(lineno, f"non-finite value {val_text!r}")
            groups.setdefault(label, []).append((position, value, lineno))

    out = []
    for label, rows in groups.items():
        if len(rows) < 2:
            raise EmptyGroup(label)
        rows.sort(key=lambda r: r[0])
        for (p0, _, _), (p1, _, line1) in zip(rows, rows[1:]):
            if p1 == p0:
                raise ParseError(line1, f"duplicate position {p1} for label {label!r}")
        positions = np.array([r[0] for r in rows], dtype=np.int64)
        values = np.array([r[1] for r in rows], dtype=np.float64)
        out.append(Series(values, positions=positions, label=label))
    return out


def write_series(fh: TextIO, series_list: Iterable[Series]) -> None:
    fh.write(SERIES_HEADER + "\n")
    for series in series_list:
        label = series.label or "series"
        positions = (
            series.positions
            if series.positions is not None
            else np.arange(1, series.n + 1)
        )
        for p, v in zip(positions, series.values):
            fh.write(f"{label}\t{int(p)}\t{fmt_float(v)}\n")


def write_profile(fh: TextIO, profile: DiagnosticProfile) -> None:
    """Dump a profile for debugging or plotting (index positions)."""
    fh.write(PROFILE_HEADER + "\n")
    for x, d in zip(profile.positions, profile.values):
        fh.write(f"{int(x)}\t{fmt_float(d)}\n")


def segment_rows(series: Series, model: SegmentationModel) -> list[tuple[str, int, int, float]]:
    """Per-segment (label, start, end, mean) rows, 1-based inclusive.

    When the series carries genomic positions those replace the index range.
    """
    label = series.label or "series"
    rows = []
    for (lo, hi), mean in zip(model.segment_bounds(series.n), model.segment_means):
        if series.positions is not None:
            start, end = int(series.positions[lo]), int(series.positions[hi - 1])
        else:
            start, end = lo + 1, hi
        rows.append((label, start, end, mean))
    return rows


def write_segments(
    fh: TextIO, fitted: Sequence[tuple[Series, SegmentationModel]]
) -> None:
    fh.write(SEGMENTS_HEADER + "\n")
    for series, model in fitted:
        for label, start, end, mean in segment_rows(series, model):
            fh.write(f"{label}\t{start}\t{end}\t{fmt_float(mean)}\n")
