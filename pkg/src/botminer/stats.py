"""Order statistics, empirical CDFs and the two-sample Kolmogorov-Smirnov test.

Everything here is deliberately dependency-free so results are identical on
any platform: quantiles are computed from explicit order statistics and the
KS p-value uses the classic asymptotic series.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "NEAREST_RANK",
    "LINEAR",
    "quantile",
    "iqr",
    "Ecdf",
    "ecdf",
    "KsResult",
    "ks_two_sample",
]

# quantile interpolation methods
NEAREST_RANK = "nearest-rank"
LINEAR = "linear"

# truncation threshold for the Kolmogorov series
_KS_SERIES_EPS = 1e-12
_KS_SERIES_MAX_TERMS = 1_000_000


def quantile(values: Iterable[float], q: float, method: str = NEAREST_RANK) -> float:
    """Return the q-quantile of *values*.

    ``nearest-rank`` picks the ceil(q*n)-th order statistic (1-based), so the
    result is always an element of the sample.  ``linear`` interpolates
    between the two adjacent order statistics (the textbook/R-7 definition
    used for quartiles).
    """
    data = sorted(values)
    n = len(data)
    if n == 0:
        raise ValueError("quantile of empty sequence")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {q!r}")
    if method == NEAREST_RANK:
        rank = math.ceil(q * n)  # 1-based; q > 0 guarantees rank >= 1
        return data[rank - 1]
    if method == LINEAR:
        pos = (n - 1) * q
        lo = math.floor(pos)
        frac = pos - lo
        if frac == 0.0 or lo + 1 >= n:
            return float(data[lo])
        return data[lo] + frac * (data[lo + 1] - data[lo])
    raise ValueError(f"unknown quantile method {method!r}")


def iqr(values: Iterable[float]) -> float:
    """Interquartile range Q3 - Q1, quartiles via linear interpolation."""
    data = sorted(values)
    return quantile(data, 0.75, LINEAR) - quantile(data, 0.25, LINEAR)


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF of a fixed sample."""

    sorted_values: tuple
    n: int

    def evaluate(self, x: float) -> float:
        """F(x) = (# sample points <= x) / n."""
        return bisect_right(self.sorted_values, x) / self.n

    def points(self) -> list[tuple[float, float]]:
        """Distinct (x, F(x)) pairs in increasing x order."""
        out = []
        prev = object()
        for i, x in enumerate(self.sorted_values):
            if x != prev:
                out.append((x, 0.0))
                prev = x
            out[-1] = (x, (i + 1) / self.n)
        return out


def ecdf(values: Iterable[float]) -> Ecdf:
    """Build the empirical CDF of a non-empty sample."""
    data = tuple(sorted(values))
    if not data:
        raise ValueError("ecdf of empty sequence")
    return Ecdf(data, len(data))


@dataclass(frozen=True)
class KsResult:
    """Two-sample KS statistic with its asymptotic p-value."""

    d_statistic: float
    p_value: float
    n1: int
    n2: int


def _kolmogorov_sf(lam: float) -> float:
    # Q(lambda) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
    # At lambda == 0 the series never converges numerically but the limit is 1.
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, _KS_SERIES_MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < _KS_SERIES_EPS:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    D is the exact supremum of |F_a - F_b| over the pooled sample points;
    the p-value is the asymptotic Kolmogorov distribution evaluated at
    D * sqrt(n1*n2/(n1+n2)).
    """
    sa = sorted(a)
    sb = sorted(b)
    n1, n2 = len(sa), len(sb)
    if n1 == 0 or n2 == 0:
        raise ValueError("ks_two_sample requires two non-empty samples")
    d = 0.0
    for x in sorted(set(sa).union(sb)):
        gap = abs(bisect_right(sa, x) / n1 - bisect_right(sb, x) / n2)
        if gap > d:
            d = gap
    lam = d * math.sqrt(n1 * n2 / (n1 + n2))
    return KsResult(d, _kolmogorov_sf(lam), n1, n2)
