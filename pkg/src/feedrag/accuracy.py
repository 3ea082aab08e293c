"""Accuracy of the ``n * eps`` loss estimate over the (eps, r, n) space.

Numeric relative error against the exact loss, the second-order analytic
estimate ``r + (n - 1) * eps / 2``, (eps, r) grid sweeps, threshold masks and
the analytic boundary curve where the estimate equals the threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .loss import approx_loss_l1, true_loss_constant
from .model import DomainError, check_horizon, check_rate

DEFAULT_EPS_RANGE = (0.0005, 0.02, 40)
DEFAULT_R_RANGE = (0.0, 0.15, 31)
DEFAULT_N_LIST = (10, 30, 50)
DEFAULT_THETA_LIST = (0.10, 0.25, 0.50)


class GridCellError(DomainError):
    def __init__(self, r: float, eps: float, n: int, cause: object):
        self.r, self.eps, self.n, self.cause = r, eps, n, str(cause)
        super().__init__(f"cell (r={r!r}, eps={eps!r}, n={n}): {cause}")

    def __reduce__(self):
        # survive the trip back from a worker process
        return type(self), (self.r, self.eps, self.n, self.cause)


class AxisMismatchError(ValueError):
    pass


def relative_error(r: float, eps: float, n: int) -> float:
    """``|n*eps - L| / L`` where ``L`` is the exact loss.

    Undefined (DomainError) unless eps > 0 and n >= 1.
    """
    eps = check_rate(eps, "eps")
    n = check_horizon(n, "n")
    if not eps > 0.0:
        raise DomainError(f"relative error needs eps > 0, got {eps!r}")
    if n < 1:
        raise DomainError("relative error needs n >= 1")
    exact = true_loss_constant(r, eps, n)
    return abs(approx_loss_l1(eps, n) - exact) / exact


def analytic_error_estimate(r: float, eps: float, n: int) -> float:
    """Second-order estimate ``r + (n - 1) * eps / 2`` of :func:`relative_error`.

    Evaluated exactly on the float inputs and rounded down, so a cell strictly
    below :func:`boundary_r` always has an estimate strictly below theta.
    """
    r = check_rate(r, "r")
    eps = check_rate(eps, "eps")
    n = check_horizon(n, "n")
    if n < 1:
        raise DomainError("analytic error estimate needs n >= 1")
    return _round_down(Fraction(r) + Fraction(n - 1, 2) * Fraction(eps))


def _round_down(q: Fraction) -> float:
    x = float(q)
    return x if Fraction(x) <= q else math.nextafter(x, -math.inf)


def boundary_r(n: int, theta: float, eps: float) -> float:
    """The r at which ``analytic_error_estimate(r, eps, n) == theta`` (may be negative)."""
    return _round_down(Fraction(theta) - Fraction(n - 1, 2) * Fraction(eps))


def analytic_boundary(n: int, theta: float, eps_axis: Sequence[float]) -> list[tuple[float, float]]:
    """Points ``(eps, r)`` on the analytic boundary, omitting those with r < 0."""
    n = check_horizon(n, "n")
    if n < 1:
        raise DomainError("analytic boundary needs n >= 1")
    theta = check_rate(theta, "theta")
    if not theta > 0.0:
        raise DomainError(f"theta must be > 0, got {theta!r}")
    points = []
    for eps in eps_axis:
        eps = check_rate(eps, "eps")
        r = boundary_r(n, theta, eps)
        if r >= 0.0:
            points.append((eps, r))
    return points


def linspace(start: float, stop: float, steps: int) -> list[float]:
    """``steps`` evenly spaced points from start to stop, both ends included."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if stop < start:
        raise ValueError(f"stop {stop!r} is below start {start!r}")
    if steps == 1:
        return [float(start)]
    span = stop - start
    points = [start + span * i / (steps - 1) for i in range(steps - 1)]
    points.append(float(stop))
    return points


@dataclass(frozen=True)
class ErrorGrid:
    """Relative errors at fixed n; ``values[i][j]`` is at ``(r_axis[i], eps_axis[j])``."""

    eps_axis: tuple[float, ...]
    r_axis: tuple[float, ...]
    n: int
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.values) != len(self.r_axis) or any(
            len(row) != len(self.eps_axis) for row in self.values
        ):
            raise AxisMismatchError(
                f"values shape does not match {len(self.r_axis)} x {len(self.eps_axis)} axes"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.r_axis), len(self.eps_axis)

    def cells(self):
        """Yield ``(r, eps, value)`` in row-major order."""
        for r, row in zip(self.r_axis, self.values):
            for eps, value in zip(self.eps_axis, row):
                yield r, eps, value


@dataclass(frozen=True)
class RegionMask:
    eps_axis: tuple[float, ...]
    r_axis: tuple[float, ...]
    n: int
    threshold: float
    cells: tuple[tuple[bool, ...], ...]

    def count(self) -> int:
        return sum(sum(row) for row in self.cells)

    def issubset(self, other: RegionMask) -> bool:
        if (self.eps_axis, self.r_axis) != (other.eps_axis, other.r_axis):
            raise AxisMismatchError("masks are on different grids")
        return all(
            b or not a
            for row_a, row_b in zip(self.cells, other.cells)
            for a, b in zip(row_a, row_b)
        )


def _check_axis(axis: Sequence[float], name: str) -> tuple[float, ...]:
    axis = tuple(check_rate(x, name) for x in axis)
    if not axis:
        raise DomainError(f"{name} is empty")
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise DomainError(f"{name} must be strictly increasing")
    return axis


def _error_row(r: float, eps_axis: tuple[float, ...], n: int) -> tuple[float, ...]:
    row = []
    for eps in eps_axis:
        try:
            row.append(relative_error(r, eps, n))
        except DomainError as exc:
            raise GridCellError(r, eps, n, exc) from exc
    return tuple(row)


def sweep_error_grid(
    eps_axis: Sequence[float],
    r_axis: Sequence[float],
    n: int,
    workers: int | None = None,
) -> ErrorGrid:
    """Relative error at every (r, eps) cell for horizon ``n``.

    With ``workers > 1`` rows are evaluated in a process pool; each cell is a
    pure function of its coordinates so the result is bit-identical to the
    sequential sweep.
    """
    eps_axis = _check_axis(eps_axis, "eps_axis")
    r_axis = _check_axis(r_axis, "r_axis")
    n = check_horizon(n, "n")
    if workers and workers > 1 and len(r_axis) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(_error_row, r_axis, [eps_axis] * len(r_axis), [n] * len(r_axis)))
    else:
        rows = tuple(_error_row(r, eps_axis, n) for r in r_axis)
    return ErrorGrid(eps_axis, r_axis, n, rows)


def classify_region(grid: ErrorGrid, theta: float) -> RegionMask:
    """Mark cells whose relative error is at most ``theta`` (inclusive)."""
    theta = check_rate(theta, "theta")
    if not theta > 0.0:
        raise DomainError(f"theta must be > 0, got {theta!r}")
    cells = tuple(tuple(value <= theta for value in row) for row in grid.values)
    return RegionMask(grid.eps_axis, grid.r_axis, grid.n, theta, cells)


def max_error(grid: ErrorGrid) -> float:
    return max(max(row) for row in grid.values)

