"""Two-system significance testing via OLS on a group dummy.

Regressing the per-query metric on an intercept plus a 0/1 system dummy is
algebraically the pooled two-sample t-test: the dummy coefficient is the
difference in group means, and its two-sided p-value comes from Student's
t with n_a + n_b - 2 degrees of freedom.  The t tail probability is
evaluated through the regularized incomplete beta function,

    p = I_x(dof / 2, 1 / 2)  with  x = dof / (dof + t^2),

computed by the standard continued fraction (modified Lentz), which is
accurate to ~1e-14 for the arguments that arise here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, isfinite, lgamma, log, sqrt
from pathlib import Path
from statistics import fmean
from typing import Sequence

from .corpus import Qrels
from .evaluate import single_metric
from .ranker import Run

_MAX_CF_ITERATIONS = 300
_CF_EPS = 1e-15
_CF_TINY = 1e-300


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Continued fraction for I_x(a, b); converges fast for x < (a+1)/(a+b+2).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITERATIONS + 1):
        m2 = 2 * m
        coef = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coef * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + coef / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coef * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + coef / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x)
    )
    front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_p_value(t_statistic: float, dof: int) -> float:
    """Two-sided tail probability of Student's t."""
    if dof < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {dof}")
    x = dof / (dof + t_statistic * t_statistic)
    return regularized_incomplete_beta(dof / 2.0, 0.5, x)


@dataclass(frozen=True)
class ComparisonResult:
    """OLS dummy fit: coefficient = mean(treatment) - mean(baseline)."""

    coefficient: float
    t_statistic: float
    p_value: float
    dof: int
    n_baseline: int
    n_treatment: int


def ols_dummy_test(
    baseline_values: Sequence[float], treatment_values: Sequence[float]
) -> ComparisonResult:
    """Fit value = b0 + b1 * is_treatment and test b1 = 0.

    Requires at least two observations per group and a positive pooled
    variance; two internally-constant groups have no error scale to test
    against and are rejected.
    """
    baseline = [float(v) for v in baseline_values]
    treatment = [float(v) for v in treatment_values]
    if len(baseline) < 2 or len(treatment) < 2:
        raise ValueError("need at least two observations in each group")
    if not all(isfinite(v) for v in baseline + treatment):
        raise ValueError("metric values must be finite")
    mean_baseline = fmean(baseline)
    mean_treatment = fmean(treatment)
    ss_baseline = sum((v - mean_baseline) ** 2 for v in baseline)
    ss_treatment = sum((v - mean_treatment) ** 2 for v in treatment)
    dof = len(baseline) + len(treatment) - 2
    pooled_variance = (ss_baseline + ss_treatment) / dof
    if pooled_variance <= 0.0:
        raise ValueError("zero pooled variance: both groups are internally constant")
    coefficient = mean_treatment - mean_baseline
    standard_error = sqrt(pooled_variance * (1.0 / len(baseline) + 1.0 / len(treatment)))
    t_statistic = coefficient / standard_error
    return ComparisonResult(
        coefficient=coefficient,
        t_statistic=t_statistic,
        p_value=student_t_p_value(t_statistic, dof),
        dof=dof,
        n_baseline=len(baseline),
        n_treatment=len(treatment),
    )


def compare_runs(
    run_baseline: Run, run_treatment: Run, qrels: Qrels, metric: str = "AP"
) -> ComparisonResult:
    """Significance of a per-query metric difference between two runs.

    Both runs must rank the same query set; the per-query vectors are
    ordered by query id so the pairing (and therefore the result) is
    deterministic.
    """
    if set(run_baseline.rankings) != set(run_treatment.rankings):
        raise ValueError("runs rank different query sets")
    baseline = single_metric(run_baseline, qrels, metric)
    treatment = single_metric(run_treatment, qrels, metric)
    order = sorted(baseline)
    return ols_dummy_test(
        [baseline[query_id] for query_id in order],
        [treatment[query_id] for query_id in order],
    )


def write_comparison_tsv(
    result: ComparisonResult, metric: str, path: str | Path
) -> None:
    """One row: metric, group sizes, coefficient, t, dof, p."""
    line = (
        f"{metric}\t{result.n_baseline}\t{result.n_treatment}\t"
        f"{result.coefficient!r}\t{result.t_statistic!r}\t{result.dof}\t"
        f"{result.p_value!r}"
    )
    Path(path).write_text(line + "\n", encoding="utf-8")
