"""Domain types and the exact annual-compounding engine.

Rates are plain floats holding fractions per year (0.01 is 1%/yr), horizons
are plain ints counting whole years. A fee is subtracted from each year's
return, so a year with return ``r`` and fee ``eps`` grows by ``1 + r - eps``.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Iterable, Sequence


class FeeDragError(Exception):
    """Base class for errors raised by this package."""


class DomainError(FeeDragError, ValueError):
    """An input lies outside the domain where a quantity is defined."""


class ParseError(FeeDragError, ValueError):
    """Malformed input text. ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DuplicateLabelError(ParseError):
    pass


def check_rate(value: float, name: str = "rate") -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_horizon(years: int, name: str = "years") -> int:
    if isinstance(years, bool):
        raise DomainError(f"{name} must be an integer, got {years!r}")
    if isinstance(years, float):
        if not years.is_integer():
            raise DomainError(f"{name} must be a whole number of years, got {years!r}")
        years = int(years)
    try:
        years = operator.index(years)
    except TypeError:
        raise DomainError(f"{name} must be an integer, got {years!r}") from None
    if years < 0:
        raise DomainError(f"{name} must be >= 0, got {years}")
    return years


def gross(r: float, eps: float = 0.0, where: str = "") -> float:
    """Return the gross growth factor ``1 + r - eps``, which must be positive."""
    factor = 1.0 + r - eps
    if not factor > 0.0:
        suffix = f" ({where})" if where else ""
        raise DomainError(
            f"gross growth factor 1 + r - eps = {factor!r} is not positive{suffix}"
        )
    return factor


@dataclass(frozen=True)
class ReturnSeries:
    """Ordered annual returns, one ``(label, return)`` pair per year."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        entries = tuple((str(label), check_rate(ret, f"return for {label}"))
                        for label, ret in self.entries)
        seen = set()
        for label, ret in entries:
            if label in seen:
                raise DuplicateLabelError(f"duplicate year label {label!r}")
            seen.add(label)
            if not 1.0 + ret > 0.0:
                raise DomainError(f"return {ret!r} for {label} is <= -100%")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_returns(cls, returns: Iterable[float], labels: Iterable | None = None) -> ReturnSeries:
        returns = list(returns)
        if labels is None:
            labels = range(1, len(returns) + 1)
        return cls(tuple(zip((str(x) for x in labels), returns, strict=True)))

    @classmethod
    def constant(cls, r: float, years: int, first_label: int = 1) -> ReturnSeries:
        years = check_horizon(years)
        return cls.from_returns([r] * years, range(first_label, first_label + years))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    @property
    def returns(self) -> list[float]:
        return [ret for _, ret in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def compound_constant(r: float, n: int) -> float:
    """Growth multiplier ``(1 + r) ** n`` after ``n`` years at constant rate ``r``."""
    r = check_rate(r, "r")
    n = check_horizon(n, "n")
    return gross(r) ** n


def _series_entries(series: ReturnSeries | Sequence[float]) -> Sequence[tuple[str, float]]:
    if isinstance(series, ReturnSeries):
        return series.entries
    return ReturnSeries.from_returns(series).entries


def compound_series(series: ReturnSeries | Sequence[float], fee: float = 0.0) -> float:
    """Product of ``1 + r_i - fee`` over the series.

    Raises DomainError naming the first year whose net gross factor is not
    positive.
    """
    fee = check_rate(fee, "fee")
    growth = 1.0
    for label, ret in _series_entries(series):
        growth *= gross(ret, fee, where=f"year {label}")
    return growth
