"""Monte Carlo estimates and statistical test plumbing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as sstats

__all__ = ["McEstimate", "TestReport", "mc_mean", "ks_test", "chi2_test"]


@dataclass
class McEstimate:
    mean: float
    std_error: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("estimate needs at least one sample")
        if self.std_error < 0:
            raise ValueError("standard error must be nonnegative")

    def agrees(self, other, k: float = 3.0) -> bool:
        """|difference| within k combined standard errors."""
        target = other.mean if isinstance(other, McEstimate) else float(other)
        se2 = other.std_error**2 if isinstance(other, McEstimate) else 0.0
        return abs(self.mean - target) <= k * np.sqrt(self.std_error**2 + se2)


@dataclass
class TestReport:
    """One verification outcome; deterministic given (seed, config).

    ``margin`` is the tolerance slack (>= 0 means pass) for tolerance-style
    checks; p-value style checks fill ``p_value`` instead."""

    name: str
    passed: bool
    statistic: float = float("nan")
    p_value: Optional[float] = None
    margin: Optional[float] = None
    t: Optional[float] = None
    estimate: Optional[float] = None
    se: Optional[float] = None
    target: Optional[float] = None
    seed: Optional[int] = None
    wall_ms: int = 0
    extra: dict = field(default_factory=dict)


def mc_mean(values, weights=None) -> McEstimate:
    """Plain or self-normalized weighted mean with a delta-method standard
    error; with unit weights this reduces to the sample mean and its SE."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample")
    if weights is None:
        return McEstimate(float(v.mean()), float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0, v.size)
    w = np.asarray(weights, dtype=float)
    if w.shape != v.shape:
        raise ValueError("weights must match values")
    tot = w.sum()
    if tot <= 0:
        raise ValueError("weights sum to zero")
    m = float((w * v).sum() / tot)
    se = float(np.sqrt(np.sum((w * (v - m)) ** 2)) / tot)
    return McEstimate(m, se, v.size)


def ks_test(sample, cdf, name="ks", alpha=0.01, max_stat=None, seed=None) -> TestReport:
    """One-sample Kolmogorov-Smirnov test against a callable CDF.

    Pass rule: p > alpha, and additionally statistic <= max_stat when a
    distance tolerance is given."""
    sample = np.asarray(sample, dtype=float)
    if sample.size < 10:
        raise ValueError("KS test needs at least 10 points")
    res = sstats.kstest(sample, cdf)
    ok = res.pvalue > alpha if max_stat is None else res.statistic <= max_stat
    return TestReport(
        name=name,
        passed=bool(ok),
        statistic=float(res.statistic),
        p_value=float(res.pvalue),
        margin=None if max_stat is None else float(max_stat - res.statistic),
        estimate=float(res.statistic),
        target=0.0 if max_stat is None else float(max_stat),
        seed=seed,
    )


def chi2_test(counts, pmf, name="chi2", alpha=0.01, min_expected=5.0, seed=None) -> TestReport:
    """Chi-square goodness of fit of integer counts against a pmf; sparse
    tail cells are pooled until every expected count reaches the floor."""
    counts = np.asarray(counts, dtype=float)
    pmf = np.asarray(pmf, dtype=float)
    if counts.size < 2 or counts.size > pmf.size:
        raise ValueError("counts and pmf sizes are inconsistent")
    n = counts.sum()
    if n < 10:
        raise ValueError("chi-square test needs at least 10 observations")
    pmf = pmf[: counts.size].copy()
    pmf[-1] += max(1.0 - pmf.sum(), 0.0)  # fold the unobserved tail into the last cell
    expected = n * pmf
    # pool from the right until all expected counts are above the floor
    while expected.size > 2 and expected[-1] < min_expected:
        expected[-2] += expected[-1]
        counts[-2] += counts[-1]
        expected = expected[:-1]
        counts = counts[:-1]
    stat, p = sstats.chisquare(counts, f_exp=expected * (counts.sum() / expected.sum()))
    return TestReport(
        name=name,
        passed=bool(p > alpha),
        statistic=float(stat),
        p_value=float(p),
        estimate=float(stat),
        seed=seed,
    )
