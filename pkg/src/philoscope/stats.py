"""Correlation, regression, influence, resampling, and effect-size statistics.

Pearson and Spearman correlations come with Fisher-z 95% confidence intervals
and two-tailed p-values from the Student-t transform (the t CDF is evaluated
through the regularized incomplete beta function, accurate to ~1e-10). The
Spearman interval reuses the Fisher-z machinery on rank correlations and is
flagged as approximate. Simple regression reports R-squared, per-observation
Cook's distances against a 4/n threshold, and an optional percentile
bootstrap CI for R-squared driven by counter-based RNG streams, so results
are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc
from scipy.stats import rankdata

from .errors import StatsError

FISHER_Z_95 = 1.96
BOOTSTRAP_PERCENTILES = (2.5, 97.5)


class CorrelationKind(enum.Enum):
    PEARSON = "Pearson"
    SPEARMAN = "Spearman"


@dataclass(frozen=True)
class PairedSeries:
    """Paired observations with ids. Lengths must match, n >= 3, all finite."""

    labels: tuple[str, ...]
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.x) == len(self.y)):
            raise StatsError("labels, x, and y must have equal lengths")
        if len(self.x) < 3:
            raise StatsError(f"need at least 3 observations, got {len(self.x)}")
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise StatsError("non-finite value in series")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def from_values(cls, x: Sequence[float], y: Sequence[float], labels: Optional[Sequence[str]] = None) -> "PairedSeries":
        if labels is None:
            labels = [str(i) for i in range(len(x))]
        return cls(tuple(labels), tuple(float(v) for v in x), tuple(float(v) for v in y))


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    ci_low: float
    ci_high: float
    p_two_tailed: float
    n: int
    kind: CorrelationKind
    approx_ci: bool = False


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float
    cooks_d: tuple[float, ...]
    influence_threshold: float
    bootstrap_ci: Optional[tuple[float, float]] = None


def two_tailed_p_from_t(t: float, df: int) -> float:
    """Two-tailed Student-t p-value via the regularized incomplete beta identity
    P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)."""
    if df <= 0:
        raise StatsError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("zero variance")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _correlation_result(r: float, n: int, kind: CorrelationKind) -> CorrelationResult:
    if abs(r) == 1.0:
        ci_low = ci_high = r
        p = 0.0
    else:
        z = math.atanh(r)
        half = FISHER_Z_95 / math.sqrt(n - 3)
        ci_low, ci_high = math.tanh(z - half), math.tanh(z + half)
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = two_tailed_p_from_t(t, n - 2)
    return CorrelationResult(
        r=r,
        ci_low=ci_low,
        ci_high=ci_high,
        p_two_tailed=p,
        n=n,
        kind=kind,
        approx_ci=kind is CorrelationKind.SPEARMAN,
    )


def pearson(series: PairedSeries) -> CorrelationResult:
    """Sample Pearson correlation with Fisher-z CI and t-transform p-value.

    Requires n >= 4 (the Fisher interval needs n - 3 > 0) unless the
    correlation is exactly +/-1, where the interval degenerates to a point.
    """
    x = np.asarray(series.x, dtype=float)
    y = np.asarray(series.y, dtype=float)
    r = _pearson_r(x, y)
    if series.n < 4 and abs(r) != 1.0:
        raise StatsError("need n >= 4 for a Fisher-z confidence interval")
    return _correlation_result(r, series.n, CorrelationKind.PEARSON)


def spearman(series: PairedSeries) -> CorrelationResult:
    """Spearman rank correlation: Pearson on average ranks; CI and p reuse the
    Fisher-z / t machinery on rho (approximation, flagged on the result)."""
    rx = rankdata(series.x, method="average")
    ry = rankdata(series.y, method="average")
    r = _pearson_r(rx, ry)
    if series.n < 4 and abs(r) != 1.0:
        raise StatsError("need n >= 4 for a Fisher-z confidence interval")
    return _correlation_result(r, series.n, CorrelationKind.SPEARMAN)


def bootstrap_r_squared_ci(
    x: Sequence[float], y: Sequence[float], resamples: int, seed: int
) -> tuple[float, float]:
    """Percentile 95% CI of simple-regression R-squared under case resampling.

    Resample b draws its indices from an RNG stream keyed by (seed, b), so the
    collection of resamples is identical regardless of evaluation order or
    parallel scheduling. Degenerate resamples (constant x or y) are dropped.
    """
    if resamples < 1:
        raise StatsError("resamples must be >= 1")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    n = len(xa)
    values = []
    for b in range(resamples):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, b)))
        idx = rng.integers(0, n, size=n)
        xs, ys = xa[idx], ya[idx]
        if np.ptp(xs) == 0.0 or np.ptp(ys) == 0.0:
            continue
        xc = xs - xs.mean()
        yc = ys - ys.mean()
        r = float(xc @ yc) / math.sqrt(float(xc @ xc) * float(yc @ yc))
        values.append(r * r)
    if not values:
        raise StatsError("all bootstrap resamples were degenerate")
    lo, hi = np.percentile(values, BOOTSTRAP_PERCENTILES)
    return float(lo), float(hi)


def simple_regression(
    series: PairedSeries, bootstrap: Optional[tuple[int, int]] = None
) -> RegressionResult:
    """Ordinary least squares y = a + b*x with influence diagnostics.

    Cook's distance per observation: D_i = (e_i^2 / (p * s^2)) * h_ii / (1 - h_ii)^2
    with p = 2 parameters, s^2 = SSE / (n - 2), and leverage
    h_ii = 1/n + (x_i - mean)^2 / Sxx. A perfect fit has every D_i = 0.
    bootstrap, when given, is (resamples, seed) for the R-squared CI.
    """
    x = np.asarray(series.x, dtype=float)
    y = np.asarray(series.y, dtype=float)
    n = series.n
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise StatsError("zero variance in x")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    sse = float(residuals @ residuals)
    sst = float((y - y.mean()) @ (y - y.mean()))
    r_squared = 1.0 if sst == 0.0 else 1.0 - sse / sst
    leverage = 1.0 / n + xc * xc / sxx
    s2 = sse / (n - 2)
    if s2 == 0.0:
        cooks = tuple(0.0 for _ in range(n))
    else:
        cooks = tuple(
            float((e * e / (2.0 * s2)) * (h / (1.0 - h) ** 2))
            for e, h in zip(residuals, leverage)
        )
    ci = None
    if bootstrap is not None:
        resamples, seed = bootstrap
        ci = bootstrap_r_squared_ci(series.x, series.y, resamples, seed)
    return RegressionResult(
        slope=slope,
        intercept=intercept,
        r_squared=float(r_squared),
        cooks_d=cooks,
        influence_threshold=4.0 / n,
        bootstrap_ci=ci,
    )


def cohens_d(group_a: Sequence[float], group_b: Sequence[float]) -> float:
    """(mean_a - mean_b) / pooled sample SD. Each group needs >= 2 values."""
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise StatsError("each group needs at least 2 values")
    pooled_var = ((len(a) - 1) * a.var(ddof=1) + (len(b) - 1) * b.var(ddof=1)) / (
        len(a) + len(b) - 2
    )
    if pooled_var == 0.0:
        raise StatsError("zero pooled standard deviation")
    return float((a.mean() - b.mean()) / math.sqrt(pooled_var))


def permutation_pvalue(series: PairedSeries, kind: CorrelationKind = CorrelationKind.PEARSON) -> float:
    """Exact two-tailed permutation p-value for the correlation, n <= 10.

    Enumerates all n! pairings of y against x and reports the fraction with
    |r| >= |r_observed| (the identity permutation counts, so p >= 1/n!).
    Independent of the t-transform p-value; intended as a small-n cross-check.
    """
    if series.n > 10:
        raise StatsError("exact permutation p-value supported only for n <= 10")
    if kind is CorrelationKind.SPEARMAN:
        x = rankdata(series.x, method="average")
        y = rankdata(series.y, method="average")
    else:
        x = np.asarray(series.x, dtype=float)
        y = np.asarray(series.y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("zero variance")
    observed = abs(float(xc @ yc) / math.sqrt(sxx * syy))
    perm_idx = np.array(list(permutations(range(series.n))))
    numerators = yc[perm_idx] @ xc
    r_all = np.abs(numerators) / math.sqrt(sxx * syy)
    return float(np.mean(r_all >= observed - 1e-12))


def significance_stars(p: float) -> str:
    """Marker convention: *** p < .001, ** p < .01, * p < .05."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class CorrelationCell:
    metric: str
    group: str
    result: CorrelationResult

    @property
    def stars(self) -> str:
        return significance_stars(self.result.p_two_tailed)


def correlation_table(
    series_by_metric: dict[str, dict[str, PairedSeries]],
    kinds: Sequence[CorrelationKind] = (CorrelationKind.PEARSON,),
) -> list[CorrelationCell]:
    """Correlations per metric per grouping, in deterministic input order."""
    cells = []
    for metric, groups in series_by_metric.items():
        for group, series in groups.items():
            for kind in kinds:
                result = pearson(series) if kind is CorrelationKind.PEARSON else spearman(series)
                cells.append(CorrelationCell(metric=metric, group=group, result=result))
    return cells
