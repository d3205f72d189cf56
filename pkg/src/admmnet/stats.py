"""Run-accuracy aggregation and the unequal-variance two-sample t-test.

Repeated training runs produce accuracy samples; :func:`summarize` reduces
them to the mean / sample-standard-deviation pairs reported in comparison
tables, and :func:`welch_t_test` compares two methods without assuming
equal variances (Welch's t statistic with Welch-Satterthwaite degrees of
freedom, a two-sided p-value, and a 99% confidence interval for the mean
difference).

The t-distribution CDF is evaluated in-repo through the regularized
incomplete beta function (continued fraction, accurate to about 1e-6), so
the module has no dependency beyond numpy; the quantiles behind the
confidence interval come from bisecting that CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "RunSummary",
    "WelchResult",
    "summarize",
    "welch_t_test",
    "student_t_cdf",
    "student_t_ppf",
]


@dataclass(frozen=True)
class RunSummary:
    """Mean and sample spread (n-1 denominator) of one method's runs.

    ``degenerate`` flags a single-element sample, whose spread is reported
    as zero because it is undefined.
    """

    method: str
    accuracies: tuple[float, ...]
    mean: float
    std: float
    degenerate: bool = False


@dataclass(frozen=True)
class WelchResult:
    """Welch test outcome: statistic, fractional degrees of freedom,
    two-sided p-value, and the 99% confidence interval for mean(a) - mean(b)."""

    t: float
    df: float
    p_two_sided: float
    ci99: tuple[float, float]


def summarize(method: str, accuracies) -> RunSummary:
    """Sample mean and sample standard deviation of a list of run scores."""
    vals = tuple(float(a) for a in accuracies)
    if not vals:
        raise ValueError("need at least one accuracy value")
    n = len(vals)
    mean = sum(vals) / n
    if n == 1:
        return RunSummary(method, vals, mean, 0.0, degenerate=True)
    var = sum((v - mean) ** 2 for v in vals) / (n - 1)
    return RunSummary(method, vals, mean, math.sqrt(var))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz's method)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    return h


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only below the distribution
    # mode; above it, evaluate the complement.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for a Student t variable with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    if t == 0.0:
        return 0.5
    tail = 0.5 * _betainc_reg(0.5 * df, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def student_t_ppf(q: float, df: float) -> float:
    """Quantile of the Student t distribution, by bisection on the CDF."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    if q == 0.5:
        return 0.0
    # Symmetric, so solve in the upper tail.
    target = max(q, 1.0 - q)
    hi = 1.0
    while student_t_cdf(hi, df) < target and hi < 1e12:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < target:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return x if q > 0.5 else -x


def welch_t_test(a, b) -> WelchResult:
    """Compare two samples without assuming equal variances.

    ``t = (mean(a) - mean(b)) / sqrt(var(a)/n_a + var(b)/n_b)`` with sample
    variances; degrees of freedom by Welch-Satterthwaite; p two-sided.  If
    both samples have zero variance the statistic degenerates: t is 0 for
    equal means (p = 1) and +/-inf otherwise (p = 0), with the confidence
    interval collapsing onto the observed difference.
    """
    va = [float(x) for x in a]
    vb = [float(x) for x in b]
    na, nb = len(va), len(vb)
    if na < 2 or nb < 2:
        raise ValueError(f"each sample needs >= 2 values, got {na} and {nb}")
    ma = sum(va) / na
    mb = sum(vb) / nb
    sa2 = sum((v - ma) ** 2 for v in va) / (na - 1)
    sb2 = sum((v - mb) ** 2 for v in vb) / (nb - 1)
    qa, qb = sa2 / na, sb2 / nb
    diff = ma - mb
    se = math.sqrt(qa + qb)
    if se == 0.0:
        if diff == 0.0:
            return WelchResult(0.0, float(na + nb - 2), 1.0, (0.0, 0.0))
        t = math.inf if diff > 0 else -math.inf
        return WelchResult(t, float(na + nb - 2), 0.0, (diff, diff))
    t = diff / se
    df = (qa + qb) ** 2 / (qa**2 / (na - 1) + qb**2 / (nb - 1))
    p = 2.0 * (1.0 - student_t_cdf(abs(t), df))
    p = min(1.0, max(0.0, p))
    crit = student_t_ppf(0.995, df)
    return WelchResult(t, df, p, (diff - crit * se, diff + crit * se))
