"""Exact fractional loss to fees and its closed-form approximations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import (
    DomainError,
    ReturnSeries,
    _series_entries,
    check_horizon,
    check_rate,
    compound_series,
    gross,
)


def true_loss_constant(r: float, eps: float, n: int) -> float:
    """Fraction of the no-fee final value lost to a constant annual fee.

    Equal to ``1 - ((1 + r - eps) / (1 + r)) ** n``. A negative ``eps`` is a
    return boost and gives a negative loss (a gain).
    """
    r = check_rate(r, "r")
    eps = check_rate(eps, "eps")
    n = check_horizon(n, "n")
    base = gross(r)
    gross(r, eps)
    if eps == 0.0 or n == 0:
        return 0.0
    # log1p/expm1 keep full relative precision when eps or the loss is tiny
    return -math.expm1(n * math.log1p(-eps / base))


def true_loss_series(series: ReturnSeries | Sequence[float], eps: float) -> float:
    """Loss fraction ``1 - compound_series(series, eps) / compound_series(series, 0)``."""
    eps = check_rate(eps, "eps")
    entries = _series_entries(series)
    if not entries:
        raise DomainError("return series is empty")
    # validates every year, naming the first bad one
    compound_series(series, eps)
    if eps == 0.0:
        return 0.0
    log_ratio = math.fsum(math.log1p(-eps / gross(ret)) for _, ret in entries)
    return -math.expm1(log_ratio)


def approx_loss_l1(eps: float, n: int) -> float:
    """First-order loss estimate ``n * eps``. Unbounded: exceeds 1 once n*eps > 1."""
    return check_horizon(n, "n") * check_rate(eps, "eps")


def approx_loss_l2(r: float, eps: float, n: int) -> float:
    """Second-order loss estimate from the eps**2-truncated Taylor expansion.

    ``n*eps/(1+r) - n*(n-1)*eps**2 / (2*(1+r)**2)``
    """
    r = check_rate(r, "r")
    eps = check_rate(eps, "eps")
    n = check_horizon(n, "n")
    x = eps / gross(r)
    return n * x - 0.5 * n * (n - 1) * x * x


def approx_loss_l1_improved(r: float, eps: float, n: int) -> float:
    return check_horizon(n, "n") * check_rate(eps, "eps") * (1.0 - check_rate(r, "r"))


def gain_approx(eps: float, n: int) -> float:
    """Approximate fractional value GAIN from raising the annual return by ``eps``.

    Same number as :func:`approx_loss_l1`; it underestimates the exact gain
    ``((1 + r + eps) / (1 + r)) ** n - 1``.
    """
    return approx_loss_l1(eps, n)


def true_gain_constant(r: float, eps: float, n: int) -> float:
    return -true_loss_constant(r, -eps, n)


@dataclass(frozen=True)
class LossReport:
    true_loss: float
    l1: float
    l2: float
    l1_improved: float
    r: float | str
    eps: float
    n: int
    # constant rate used by l2 and l1_improved; differs from r for series input
    effective_r: float

    @property
    def relative_error(self) -> float | None:
        """Relative error of ``l1`` against the true loss, None when undefined."""
        if self.true_loss == 0.0:
            return None
        return abs(self.l1 - self.true_loss) / self.true_loss


def loss_report(r: float, eps: float, n: int) -> LossReport:
    return LossReport(
        true_loss=true_loss_constant(r, eps, n),
        l1=approx_loss_l1(eps, n),
        l2=approx_loss_l2(r, eps, n),
        l1_improved=approx_loss_l1_improved(r, eps, n),
        r=float(r),
        eps=float(eps),
        n=int(n),
        effective_r=float(r),
    )


def series_loss_report(series: ReturnSeries | Sequence[float], eps: float) -> LossReport:
    """Loss report for a return series.

    The approximations that need a single rate use the series' geometric-mean
    annual return.
    """
    if not isinstance(series, ReturnSeries):
        series = ReturnSeries.from_returns(series)
    true_loss = true_loss_series(series, eps)
    n = len(series)
    geo_r = compound_series(series) ** (1.0 / n) - 1.0
    labels = series.labels
    span = labels[0] if n == 1 else f"{labels[0]}-{labels[-1]}"
    return LossReport(
        true_loss=true_loss,
        l1=approx_loss_l1(eps, n),
        l2=approx_loss_l2(geo_r, eps, n),
        l1_improved=approx_loss_l1_improved(geo_r, eps, n),
        r=span,
        eps=float(eps),
        n=n,
        effective_r=geo_r,
    )
