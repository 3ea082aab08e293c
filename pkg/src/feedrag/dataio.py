"""Return-series CSV ingestion, portfolio trajectories, and plot-ready output.

Everything here works on in-memory text; reading and writing files is left to
the CLI. Numbers are written with ``repr`` (shortest round-trip form, always
``.`` as decimal separator), so emitted files reparse to identical floats.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .accuracy import AxisMismatchError, ErrorGrid, RegionMask
from .model import (
    DomainError,
    DuplicateLabelError,
    ParseError,
    ReturnSeries,
    check_rate,
    gross,
)

RETURNS_HEADER = ("year", "return")
TRAJECTORY_HEADER = (
    "year_index", "year_label", "value_no_fee", "value_with_fee", "loss_fraction", "l1_prediction",
)
GRID_HEADER = ("n", "eps", "r", "error", "acceptable", "boundary_r")

# typical-investor markers on the region maps, as (eps, r)
REFERENCE_POINTS = (("square", 0.01, 0.10), ("circle", 0.005, 0.10))


class PercentWarning(UserWarning):
    """A rate looks like a percentage typed where a fraction was expected."""


def fmt(x: float) -> str:
    """Shortest round-trip decimal text for ``x``; integral values drop ``.0``."""
    x = float(x)
    if x == 0.0:
        return "0"
    s = repr(x)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _write_rows(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def parse_returns_csv(text: str | TextIO) -> ReturnSeries:
    """Parse ``year,return`` CSV text into a :class:`ReturnSeries`.

    Returns are decimal fractions. Blank lines and lines starting with ``#``
    are skipped. Values above 1.0 are accepted with a :class:`PercentWarning`.
    """
    if not isinstance(text, str):
        text = text.read()
    text = text.lstrip("\ufeff")

    header_seen = False
    entries: list[tuple[str, float]] = []
    line_of: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if not header_seen:
            if tuple(f.lower() for f in fields) != RETURNS_HEADER:
                raise ParseError(f"expected header 'year,return', got {stripped!r}", lineno)
            header_seen = True
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", lineno)
        label, raw = fields
        if not label:
            raise ParseError("empty year label", lineno)
        try:
            ret = float(raw)
        except ValueError:
            raise ParseError(f"return {raw!r} is not a number", lineno) from None
        if not math.isfinite(ret):
            raise ParseError(f"return {raw!r} is not finite", lineno)
        if ret <= -1.0:
            raise DomainError(f"line {lineno}: return {ret!r} for {label} is <= -100%")
        if ret > 1.0:
            warnings.warn(
                f"line {lineno}: return {ret!r} for {label} exceeds 100%; "
                "returns are fractions (0.10 means 10%), not percents",
                PercentWarning,
                stacklevel=2,
            )
        if label in line_of:
            raise DuplicateLabelError(
                f"duplicate year label {label!r} (first seen on line {line_of[label]})", lineno
            )
        line_of[label] = lineno
        entries.append((label, ret))

    if not header_seen:
        raise ParseError("missing header 'year,return'")
    if not entries:
        raise ParseError("no data rows")
    return ReturnSeries(tuple(entries))


def emit_returns_csv(series: ReturnSeries) -> str:
    return _write_rows(RETURNS_HEADER, ((label, fmt(ret)) for label, ret in series))


@dataclass(frozen=True)
class TrajectoryPoint:
    year_index: int
    year_label: str
    value_no_fee: float
    value_with_fee: float
    loss_fraction: float
    l1_prediction: float


def run_trajectory(principal: float, series: ReturnSeries, fee: float) -> list[TrajectoryPoint]:
    """Year-by-year values of a no-fee and a with-fee portfolio.

    Point 0 is the starting principal (label ``start``); point k is the state
    after the k-th return in the series. The loss fraction is accumulated in
    log space, the same way as :func:`feedrag.loss.true_loss_series`.
    """
    principal = float(principal)
    if not (math.isfinite(principal) and principal > 0.0):
        raise DomainError(f"principal must be positive, got {principal!r}")
    fee = check_rate(fee, "fee")
    if not isinstance(series, ReturnSeries):
        series = ReturnSeries.from_returns(series)
    if not len(series):
        raise DomainError("return series is empty")

    points = [TrajectoryPoint(0, "start", principal, principal, 0.0, 0.0)]
    no_fee = with_fee = principal
    log_terms: list[float] = []
    for k, (label, ret) in enumerate(series, start=1):
        base = gross(ret)
        no_fee *= base
        with_fee *= gross(ret, fee, where=f"year {label}")
        log_terms.append(math.log1p(-fee / base))
        loss = -math.expm1(math.fsum(log_terms)) if fee != 0.0 else 0.0
        points.append(TrajectoryPoint(k, label, no_fee, with_fee, loss, k * fee))
    return points


def emit_trajectory_csv(points: Sequence[TrajectoryPoint]) -> str:
    if not points:
        raise ValueError("no trajectory points to write")
    return _write_rows(
        TRAJECTORY_HEADER,
        (
            (str(p.year_index), p.year_label, fmt(p.value_no_fee), fmt(p.value_with_fee),
             fmt(p.loss_fraction), fmt(p.l1_prediction))
            for p in points
        ),
    )


def _check_same_axes(grid: ErrorGrid, mask: RegionMask) -> None:
    if (grid.eps_axis, grid.r_axis, grid.n) != (mask.eps_axis, mask.r_axis, mask.n):
        raise AxisMismatchError("grid and mask do not share axes and horizon")


def emit_grid_csv(grid: ErrorGrid, mask: RegionMask, boundary: Sequence[tuple[float, float]]) -> str:
    """Long-format CSV, one row per (r, eps) cell, r-major.

    ``boundary_r`` is empty where the analytic boundary was clipped.
    """
    _check_same_axes(grid, mask)
    boundary_at = dict(boundary)
    rows = []
    for i, r in enumerate(grid.r_axis):
        for j, eps in enumerate(grid.eps_axis):
            b = boundary_at.get(eps)
            rows.append((
                str(grid.n), fmt(eps), fmt(r), fmt(grid.values[i][j]),
                "true" if mask.cells[i][j] else "false",
                "" if b is None else fmt(b),
            ))
    return _write_rows(GRID_HEADER, rows)


# --- SVG -------------------------------------------------------------------

WIDTH, HEIGHT = 480, 400
LEFT, RIGHT, TOP, BOTTOM = 64, 20, 36, 52
GREY = "#b3b3b3"


def _edges(axis: Sequence[float]) -> tuple[float, ...]:
    """Cell boundaries: midpoints between axis values, half a step past each end."""
    if len(axis) == 1:
        half = abs(axis[0]) * 0.5 or 0.005
        return (axis[0] - half, axis[0] + half)
    mids = [(a + b) / 2 for a, b in zip(axis, axis[1:])]
    return (axis[0] - (mids[0] - axis[0]), *mids, axis[-1] + (axis[-1] - mids[-1]))


class _Frame:
    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        self.x_lo, self.x_hi, self.y_lo, self.y_hi = x_lo, x_hi, y_lo, y_hi
        self.w = WIDTH - LEFT - RIGHT
        self.h = HEIGHT - TOP - BOTTOM

    def x(self, v: float) -> float:
        return LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * self.w

    def y(self, v: float) -> float:
        return TOP + (self.y_hi - v) / (self.y_hi - self.y_lo) * self.h

    def contains(self, xv: float, yv: float) -> bool:
        return self.x_lo <= xv <= self.x_hi and self.y_lo <= yv <= self.y_hi


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="{TOP - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{_escape(title)}</text>',
    ]


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _axes(frame: _Frame, x_label: str, y_label: str, x_ticks, y_ticks) -> list[str]:
    x0, x1 = LEFT, LEFT + frame.w
    y0, y1 = TOP + frame.h, TOP
    out = [
        f'<rect class="frame" x="{x0}" y="{y1}" width="{frame.w}" height="{frame.h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">{_escape(y_label)}</text>',
    ]
    for v, text in x_ticks:
        out.append(
            f'<text x="{frame.x(v):.2f}" y="{y0 + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_escape(text)}</text>'
        )
    for v, text in y_ticks:
        out.append(
            f'<text x="{x0 - 4}" y="{frame.y(v) + 3:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_escape(text)}</text>'
        )
    return out


def _pct(v: float) -> str:
    return f"{v * 100:.4g}%"


def emit_region_svg(grid: ErrorGrid, mask: RegionMask, boundary: Sequence[tuple[float, float]]) -> str:
    """Minimal region map: eps across, r up.

    Grey rectangles mark acceptable cells (class ``acceptable``), a black
    polyline traces the analytic boundary, red markers sit at the reference
    points (eps=1%, r=10%) and (eps=0.5%, r=10%) when they fall on the plot.
    """
    _check_same_axes(grid, mask)
    ex, ey = _edges(grid.eps_axis), _edges(grid.r_axis)
    frame = _Frame(ex[0], ex[-1], ey[0], ey[-1])
    out = _svg_open(f"N = {grid.n}, error threshold = {_pct(mask.threshold)}")
    out.append(
        f'<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{frame.w}" '
        f'height="{frame.h}"/></clipPath></defs>'
    )
    for i in range(len(grid.r_axis)):
        for j in range(len(grid.eps_axis)):
            if not mask.cells[i][j]:
                continue
            x0, x1 = frame.x(ex[j]), frame.x(ex[j + 1])
            y0, y1 = frame.y(ey[i + 1]), frame.y(ey[i])
            out.append(
                f'<rect class="acceptable" x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{GREY}" stroke="none"/>'
            )
    if boundary:
        pts = " ".join(f"{frame.x(e):.2f},{frame.y(r):.2f}" for e, r in boundary)
        out.append(
            f'<polyline class="boundary" points="{pts}" fill="none" stroke="black" '
            'stroke-width="1.5" clip-path="url(#plot)"/>'
        )
    for shape, eps, r in REFERENCE_POINTS:
        if not frame.contains(eps, r):
            continue
        cx, cy = frame.x(eps), frame.y(r)
        if shape == "square":
            out.append(
                f'<rect class="marker" x="{cx - 4:.2f}" y="{cy - 4:.2f}" width="8" height="8" fill="red"/>'
            )
        else:
            out.append(f'<circle class="marker" cx="{cx:.2f}" cy="{cy:.2f}" r="4" fill="red"/>')
    eps_ticks = [(v, _pct(v)) for v in (grid.eps_axis[0], grid.eps_axis[-1])]
    r_ticks = [(v, _pct(v)) for v in (grid.r_axis[0], grid.r_axis[-1])]
    out += _axes(frame, "annual fee eps", "annual return r", eps_ticks, r_ticks)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_lines_svg(
    title: str,
    xs: Sequence[float],
    lines: Sequence[tuple[str, str, bool, Sequence[float]]],
    x_label: str = "years",
    y_label: str = "",
) -> str:
    """Simple line chart. Each line is ``(name, colour, dashed, ys)``."""
    if not xs:
        raise ValueError("no points to plot")
    all_y = [y for *_, ys in lines for y in ys]
    y_lo, y_hi = min(0.0, *all_y), max(all_y)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    x_lo, x_hi = xs[0], xs[-1]
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    frame = _Frame(x_lo, x_hi, y_lo, y_hi)
    out = _svg_open(title)
    for k, (name, colour, dashed, ys) in enumerate(lines):
        pts = " ".join(f"{frame.x(x):.2f},{frame.y(y):.2f}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        out.append(
            f'<polyline class="line" points="{pts}" fill="none" stroke="{colour}" '
            f'stroke-width="1.5"{dash}/>'
        )
        out.append(
            f'<text x="{LEFT + 8}" y="{TOP + 14 + 14 * k}" font-family="sans-serif" '
            f'font-size="11" fill="{colour}">{_escape(name)}</text>'
        )
    x_ticks = [(x_lo, fmt(x_lo)), (x_hi, fmt(x_hi))]
    y_ticks = [(y_lo, f"{y_lo:.4g}"), (y_hi, f"{y_hi:.4g}")]
    out += _axes(frame, x_label, y_label, x_ticks, y_ticks)
    out.append("</svg>")
    return "\n".join(out) + "\n"
