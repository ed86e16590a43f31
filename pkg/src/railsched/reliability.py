"""Weibull remaining-useful-life math.

A railcar's lifetime is Weibull with scale ``alpha`` (periods) and shape
``beta``. Conditioning on the railcar having survived to its initial age
``y'`` gives the remaining-life law

    F(y | y') = 1 - exp((y'/alpha)^beta - (y/alpha)^beta),   y >= y',

from which failure periods are sampled by inverse transform and
reliability-based maintenance windows are derived for the deterministic
model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "WeibullParams",
    "MaintenanceInterval",
    "conditional_failure_cdf",
    "raw_failure_age",
    "sample_failure_time",
    "reliability_time",
    "maintenance_interval",
]


@dataclass(frozen=True)
class WeibullParams:
    """Scale ``alpha`` (in periods) and dimensionless shape ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("Weibull parameters must be positive")


@dataclass(frozen=True)
class MaintenanceInterval:
    """Preferred maintenance window ``[due, end]`` in 1-based periods."""

    due: int
    end: int

    def __post_init__(self) -> None:
        if not 1 <= self.due <= self.end:
            raise ValueError(f"invalid maintenance interval [{self.due}, {self.end}]")

    @property
    def width(self) -> int:
        return self.end - self.due


def conditional_failure_cdf(w: WeibullParams, y: float, y_prime: float) -> float:
    """Probability that a railcar of initial age ``y_prime`` fails by age ``y``.

    Returns ``1 - exp((y'/alpha)^beta - (y/alpha)^beta)``; zero at
    ``y == y_prime`` and monotone non-decreasing in ``y``.
    """
    if y_prime < 0:
        raise ValueError("initial age must be non-negative")
    if y < y_prime:
        raise ValueError("evaluation age must not precede the initial age")
    exponent = (y_prime / w.alpha) ** w.beta - (y / w.alpha) ** w.beta
    return -math.expm1(exponent)


def raw_failure_age(w: WeibullParams, y_prime: float, u: float) -> float:
    """Undiscretized inverse of the conditional failure law at quantile ``u``.

    This is the failure *age* (not the in-horizon period); it satisfies
    ``conditional_failure_cdf(w, raw_failure_age(w, y', u), y') == u``.
    """
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")
    if y_prime < 0:
        raise ValueError("initial age must be non-negative")
    return w.alpha * ((y_prime / w.alpha) ** w.beta - math.log1p(-u)) ** (1.0 / w.beta)


def sample_failure_time(w: WeibullParams, y_prime: int, horizon_len: int, u: float) -> int:
    """Failure period for quantile ``u``, clipped to ``[1, horizon_len + 1]``.

    The raw failure age is rounded up to a whole period and shifted by the
    initial age. A result of ``horizon_len + 1`` means the railcar survives
    the whole horizon; draws that would land at or before period zero are
    clamped to 1, the earliest representable failure.
    """
    if horizon_len < 1:
        raise ValueError("horizon must contain at least one period")
    age = raw_failure_age(w, y_prime, u)
    period = math.ceil(age) - int(y_prime)
    return max(1, min(period, horizon_len + 1))


def reliability_time(w: WeibullParams, r: float) -> int:
    """Smallest whole age by which a new railcar fails with probability ``r``."""
    if not 0.0 < r < 1.0:
        raise ValueError("reliability level must lie strictly inside (0, 1)")
    return math.ceil(w.alpha * (-math.log1p(-r)) ** (1.0 / w.beta))


def maintenance_interval(w: WeibullParams, r: float, y_prime: int) -> MaintenanceInterval:
    """Preferred maintenance window for a railcar of initial age ``y_prime``.

    Let ``tau`` be the reliability time at level ``r`` and ``h = ceil(0.1 tau)``
    the window half-length. The window is ``[ceil(tau + h/2), tau + h]``
    expressed relative to the planning start by subtracting the initial age,
    clamped so it stays within representable periods for very old railcars.
    """
    tau = reliability_time(w, r)
    half = math.ceil(0.1 * tau)
    if y_prime < 0:
        raise ValueError("initial age must be non-negative")
    due = max(1, math.ceil(tau + half / 2.0) - int(y_prime))
    end = max(due, tau + half - int(y_prime))
    return MaintenanceInterval(due=due, end=end)
