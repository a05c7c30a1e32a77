"""Render-ready aggregates over benchmark samples.

Missing values travel as None. Conventions pinned here so plots are
reproducible run to run:

* quartiles by linear interpolation of order statistics at rank (n-1)*p
* whiskers at the most extreme data within 1.5*IQR of the quartiles
* notch half-width 1.58*IQR/sqrt(n)
* confidence bands 1.96*s/sqrt(n) with the sample standard deviation
* ECDF denominator counts missing samples, so curves saturate below 1
  when some runs failed
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

Z95 = 1.96


def _quantile(ordered: list[float], p: float) -> float:
    """Linear interpolation at rank (n-1)*p over presorted data."""
    n = len(ordered)
    if n == 1:
        return ordered[0]
    rank = (n - 1) * p
    lo = math.floor(rank)
    hi = min(lo + 1, n - 1)
    frac = rank - lo
    return ordered[lo] * (1.0 - frac) + ordered[hi] * frac


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values)


def _sample_std(values: list[float]) -> float:
    m = _mean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / (len(values) - 1))


@dataclass
class BoxStats:
    n: int
    n_missing: int
    median: float | None = None
    q1: float | None = None
    q3: float | None = None
    whisker_low: float | None = None
    whisker_high: float | None = None
    notch_low: float | None = None
    notch_high: float | None = None
    outliers: list[float] = field(default_factory=list)


def boxplot_stats(samples: list[float | None]) -> BoxStats:
    """Five-number summary with 1.5*IQR whiskers and notches; None dropped."""
    values = sorted(v for v in samples if v is not None)
    n_missing = len(samples) - len(values)
    if not values:
        return BoxStats(n=0, n_missing=n_missing)
    n = len(values)
    q1 = _quantile(values, 0.25)
    median = _quantile(values, 0.5)
    q3 = _quantile(values, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inliers = [v for v in values if lo_fence <= v <= hi_fence]
    outliers = [v for v in values if v < lo_fence or v > hi_fence]
    notch = 1.58 * iqr / math.sqrt(n)
    return BoxStats(
        n=n,
        n_missing=n_missing,
        median=median,
        q1=q1,
        q3=q3,
        whisker_low=min(inliers),
        whisker_high=max(inliers),
        notch_low=median - notch,
        notch_high=median + notch,
        outliers=outliers,
    )


def ecdf(samples: list[float | None]) -> list[tuple[float, float]]:
    """Step points (x, fraction of all samples <= x); missing stays in the denominator."""
    values = sorted(v for v in samples if v is not None)
    if not values:
        raise ValueError("ecdf needs at least one defined sample")
    n_total = len(samples)
    points = []
    seen = 0
    for i, v in enumerate(values):
        seen += 1
        if i + 1 < len(values) and values[i + 1] == v:
            continue
        points.append((v, seen / n_total))
    return points


def success_fraction(statuses: list[int | None], success_value: int = 0) -> tuple[float, float, float]:
    """Fraction of runs with the given status plus its Wilson 95% interval."""
    if not statuses:
        raise ValueError("success_fraction needs at least one sample")
    n = len(statuses)
    successes = sum(1 for s in statuses if s == success_value)
    p = successes / n
    z2 = Z95 * Z95
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4 * n * n)) / denom
    return p, max(0.0, center - half), min(1.0, center + half)


@dataclass
class ProgressAggregate:
    grid: list[float]
    mean: list[float | None]
    ci_low: list[float | None]
    ci_high: list[float | None]
    counts_1s: list[int]


def _locf_at(series: list[tuple[float, float | None]], t: float) -> float | None:
    """Best cost at time t: last defined observation at or before t."""
    best = None
    for ts, cost in series:
        if ts > t:
            break
        if cost is not None:
            best = cost
    return best


def _smooth(values: list[float | None], window: int) -> list[float | None]:
    """Centered moving average; a point stays None, and None neighbors are skipped."""
    if window <= 1:
        return list(values)
    half = window // 2
    out: list[float | None] = []
    for i, v in enumerate(values):
        if v is None:
            out.append(None)
            continue
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        neighborhood = [values[j] for j in range(lo, hi) if values[j] is not None]
        out.append(_mean(neighborhood))
    return out


def progress_aggregate(
    series_list: list[list[tuple[float, float | None]]],
    time_limit: float,
    grid_step: float = 0.1,
    smooth_window: int = 5,
) -> ProgressAggregate:
    """Mean best-cost curve with a 95% band over a fixed time grid.

    Each series is carried forward between observations and is undefined
    before its first costed sample. The band needs at least two defined
    runs per grid point. Smoothing averages the mean and the band
    half-width separately, which keeps ci_low <= mean <= ci_high.
    counts_1s counts raw costed samples per one-second interval.
    """
    n_grid = int(math.floor(time_limit / grid_step + 1e-9)) + 1
    grid = [i * grid_step for i in range(n_grid)]
    mean: list[float | None] = []
    half_width: list[float | None] = []
    for t in grid:
        defined = []
        for series in series_list:
            v = _locf_at(series, t)
            if v is not None:
                defined.append(v)
        if not defined:
            mean.append(None)
            half_width.append(None)
        else:
            mean.append(_mean(defined))
            if len(defined) >= 2:
                half_width.append(Z95 * _sample_std(defined) / math.sqrt(len(defined)))
            else:
                half_width.append(None)
    smooth_mean = _smooth(mean, smooth_window)
    smooth_half = _smooth(half_width, smooth_window)
    ci_low = [
        None if m is None or h is None else m - h for m, h in zip(smooth_mean, smooth_half)
    ]
    ci_high = [
        None if m is None or h is None else m + h for m, h in zip(smooth_mean, smooth_half)
    ]
    n_intervals = max(0, int(math.ceil(time_limit - 1e-9)))
    counts = [0] * n_intervals
    for series in series_list:
        for ts, cost in series:
            if cost is None:
                continue
            k = int(math.floor(ts))
            if 0 <= k < n_intervals:
                counts[k] += 1
    return ProgressAggregate(grid, smooth_mean, ci_low, ci_high, counts)


@dataclass
class RegressionBar:
    planner: str
    version: str
    mean: float
    stderr: float | None
    n: int


def regression_aggregate(
    grouped: dict[str, dict[str, list[float | None]]],
) -> list[RegressionBar]:
    """Mean +/- s/sqrt(n) per (planner, version), versions ascending.

    A planner with no defined samples under some version gets no bar
    there. stderr is None for singleton groups.
    """
    bars = []
    for planner in sorted(grouped):
        for version in sorted(grouped[planner], key=lambda v: (v is None, v)):
            values = [v for v in grouped[planner][version] if v is not None]
            if not values:
                continue
            stderr = _sample_std(values) / math.sqrt(len(values)) if len(values) >= 2 else None
            bars.append(RegressionBar(planner, version or "", _mean(values), stderr, len(values)))
    return bars


def missing_counts(per_planner: dict[str, list[object | None]]) -> list[tuple[str, int, int]]:
    """Per planner: total runs and how many lack a value for the attribute."""
    return [
        (name, len(values), sum(1 for v in values if v is None))
        for name, values in sorted(per_planner.items())
    ]
