"""Small statistical utilities used by the verification experiments.

Thin, typed wrappers with fixed conventions: two-sided p-values unless the
name says otherwise, Wilson score intervals for binomial proportions, and
chi-square goodness of fit against a fully specified cell law.  Heavy
p-value machinery is delegated to scipy.stats.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as sps

from .errors import InsufficientData


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise InsufficientData("wilson interval needs at least one trial")
    if not (0 <= successes <= trials):
        raise ValueError("successes must lie in [0, trials]")
    z = sps.norm.ppf(0.5 + level / 2.0)
    n = float(trials)
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
    return (max(0.0, center - half), min(1.0, center + half))


def ks_two_sample(xs, ys) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and p-value."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0 or ys.size == 0:
        raise InsufficientData("KS needs nonempty samples")
    res = sps.ks_2samp(xs, ys, method="auto")
    return float(res.statistic), float(res.pvalue)


def ks_exponential(xs, mean: float = 1.0) -> tuple[float, float]:
    """One-sample KS against the exponential law with the given mean."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise InsufficientData("KS needs a nonempty sample")
    res = sps.kstest(xs, "expon", args=(0.0, mean))
    return float(res.statistic), float(res.pvalue)


def ks_uniform(xs, lo: float = 0.0, hi: float = 1.0) -> tuple[float, float]:
    """One-sample KS against Uniform[lo, hi]."""
    xs = np.asarray(xs, dtype=float)
    res = sps.kstest(xs, "uniform", args=(lo, hi - lo))
    return float(res.statistic), float(res.pvalue)


def chi_square_gof(observed, probs) -> tuple[float, float]:
    """Chi-square goodness of fit of observed counts against cell probabilities.

    probs must sum to 1 (the cells partition the sample space); degrees of
    freedom are cells - 1, no parameters estimated from the data.
    """
    obs = np.asarray(observed, dtype=float)
    p = np.asarray(probs, dtype=float)
    if obs.shape != p.shape or obs.ndim != 1:
        raise ValueError("observed and probs must be 1-D and aligned")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"cell probabilities sum to {p.sum()}, not 1")
    n = obs.sum()
    if n <= 0:
        raise InsufficientData("no observations")
    expected = n * p
    if expected.min() <= 0:
        raise ValueError("every cell needs positive expected count")
    stat = float(((obs - expected) ** 2 / expected).sum())
    df = obs.size - 1
    return stat, float(sps.chi2.sf(stat, df))


def chi_square_two_sample(counts_a, counts_b) -> tuple[float, float]:
    """Chi-square homogeneity test for two vectors of cell counts."""
    table = np.vstack([np.asarray(counts_a, float), np.asarray(counts_b, float)])
    keep = table.sum(axis=0) > 0
    table = table[:, keep]
    stat, p, _, _ = sps.chi2_contingency(table)
    return float(stat), float(p)


def binomial_greater(successes_a: int, trials_a: int,
                     successes_b: int, trials_b: int) -> float:
    """One-sided p-value for H1: proportion A exceeds proportion B.

    Fisher's exact test on the 2x2 table; small p favours A > B.
    """
    table = [[successes_a, trials_a - successes_a],
             [successes_b, trials_b - successes_b]]
    return float(sps.fisher_exact(table, alternative="greater")[1])
