"""Closed-form and numeric evaluation of the model's quantitative laws.

Everything here is a pure function.  Infinite products are truncated with an
explicit tail bound obtained from -log(1-y) <= y + y^2 for y <= 1/2, so each
returned value carries a certified absolute error below the requested
tolerance.  The 1-D integrals use an adaptive Simpson rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import DeltaSpec, DistSpec
from .errors import DomainError, PreconditionViolation, ZfireError


class UnsupportedSpec(ZfireError):
    """Analytic continuation asked for a spec it cannot integrate."""


# ---------------------------------------------------------------------------
# certified log-products
# ---------------------------------------------------------------------------

def log_product_shifted_geometric(t: float, a: float, tol: float = 1e-12) -> float:
    """log prod_{n>=1} (1 - e^{-(t + a n)}) with absolute error <= tol.

    The factor ratios are geometric with rate e^{-a}, so the tail of the log
    sum is bounded by a geometric series once the terms drop below 1/2.
    """
    if a <= 0:
        raise DomainError("geometric product needs a > 0")
    if t < 0:
        raise DomainError("t must be nonnegative")
    r = math.exp(-a)
    total = 0.0
    n = 1
    while True:
        y = math.exp(-(t + a * n))
        total += math.log1p(-y)
        n += 1
        y_next = y * r
        if y_next <= 0.5:
            tail = y_next / (1.0 - r) + (y_next * y_next) / (1.0 - r * r)
            if tail <= tol:
                return total
        if n > 100000:
            raise DomainError("product did not converge (a too small?)")


def _log_product_c_over_x(t: float, x: int, c: float, tol: float) -> float:
    """log prod_{n>x} (1 - e^{-(t + S_{x,n})}) for the c/x delay family.

    S_{x,n} accumulates c/i from i=x (with c at i=0).  Requires c > 1 for
    convergence.  The terms decay like n^{-c}, too slowly to sum outright,
    so after N explicit factors the remaining log sum is replaced by the
    midpoint of an integral sandwich on sum_{m>N} y_m derived from
    c log(m/N) <= S_m - S_N <= c log((m-1)/(N-1)); the half-width of the
    sandwich plus the quadratic-term bound certifies the error.
    """
    if c <= 1.0:
        raise DomainError("the log-series diverges for c <= 1")
    s = 0.0
    total = 0.0
    n = x  # i runs over the source sites x, x+1, ...; the target is i+1
    checkpoint = max(x, 1) * 2 + 16
    while True:
        s += c if n == 0 else c / n
        n += 1
        y = math.exp(-(t + s))
        total += math.log1p(-y)
        if total < -745.0:
            return -math.inf  # product underflows to an honest zero
        if n >= checkpoint and y <= 0.5:
            hi = y * n / (c - 1.0)
            lo = y * (n - 1.0) ** c * n ** (1.0 - c) / (c - 1.0)
            square = y * y * n / (2.0 * c - 1.0)
            err = 0.5 * (hi - lo) + square
            if err <= tol:
                return total - 0.5 * (hi + lo)
            checkpoint *= 2
        if n - x > 20_000_000:
            raise DomainError("continuation product tail needs a looser tol "
                              f"for c this close to 1 (c={c})")


def continuation_product(t: float, x: int, spec: DeltaSpec | DistSpec,
                         tol: float = 1e-6) -> float:
    """Probability that a fire first reaching site x at time t never stops.

    Valid for instantaneous burning and deterministic delay specs.  Returns
    0.0 outright when the underlying log series diverges (the c <= 1 family
    and the zero-delay case).
    """
    if isinstance(spec, DistSpec):
        spec = DeltaSpec("homogeneous", base=spec)
    if t < 0:
        raise DomainError("t must be nonnegative")
    if x < 0:
        raise DomainError("x must be a site index")
    if spec.family == "homogeneous":
        a = spec.constant_value
        if a is None:
            raise UnsupportedSpec("continuation product needs a deterministic delay spec")
        if a == 0.0:
            return 0.0
        return math.exp(log_product_shifted_geometric(t, a, tol))
    if spec.family == "deterministic_c_over_x":
        if spec.c <= 1.0:
            return 0.0
        lp = _log_product_c_over_x(t, x, spec.c, tol)
        return 0.0 if lp == -math.inf else math.exp(lp)
    raise UnsupportedSpec(f"continuation product unsupported for family {spec.family!r}; "
                          "estimate it by simulation instead")


# ---------------------------------------------------------------------------
# adaptive Simpson quadrature
# ---------------------------------------------------------------------------

def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 48) -> float:
    """Integrate f over [a, b] to absolute tolerance tol."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


# ---------------------------------------------------------------------------
# probability that the very first fire is the infinite one (constant delay)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KappaBounds:
    """Closed-form envelope for the first-fire infinite probability."""

    a: float
    mu: float      # e^a - 1
    lower: float   # 1 - 1/(2 mu); may be negative for small a
    upper: float   # mu (1 - e^{-1/mu})
    approx: float  # 1 - (e^{-a} + e^{-2a})/2 - e^{-3a}/6


def p_kappa1_bounds(a: float) -> KappaBounds:
    if a <= 0:
        raise DomainError("delay constant must be positive")
    mu = math.expm1(a)
    lower = 1.0 - 1.0 / (2.0 * mu)
    upper = mu * -math.expm1(-1.0 / mu)
    approx = 1.0 - 0.5 * (math.exp(-a) + math.exp(-2.0 * a)) - math.exp(-3.0 * a) / 6.0
    return KappaBounds(a=a, mu=mu, lower=lower, upper=upper, approx=approx)


def _truncation_order(r: float, bound: float) -> int:
    """Smallest X with r^{X+1}/(1-r) + r^{2X+2}/(1-r^2) <= bound and r^{X+1} <= 1/2."""
    x = 1
    while r ** (x + 1) > 0.5 or (r ** (x + 1)) / (1 - r) + (r ** (2 * x + 2)) / (1 - r * r) > bound:
        x += 1
        if x > 200000:
            raise DomainError("cannot truncate product (a too small)")
    return x


def p_kappa1_quadrature(a: float, tol: float = 1e-8) -> float:
    """P(first fire is infinite) = int_0^1 prod_{x>=1}(1 - v e^{-ax}) dv.

    The infinite product is truncated to certified accuracy well below tol
    and the integral evaluated adaptively to absolute tolerance tol.
    """
    if a <= 0:
        raise DomainError("delay constant must be positive")
    if not (0 < tol <= 1e-3):
        raise DomainError("tol must lie in (0, 1e-3]")
    r = math.exp(-a)
    order = _truncation_order(r, 1e-3 * tol)
    powers = [r ** x for x in range(1, order + 1)]

    def integrand(v: float) -> float:
        s = 0.0
        for p in powers:
            s += math.log1p(-v * p)
        return math.exp(s)

    return adaptive_simpson(integrand, 0.0, 1.0, 0.5 * tol)


# ---------------------------------------------------------------------------
# law of the first fire's rightmost site m_1 (constant delay, zero burn time)
# ---------------------------------------------------------------------------

def m1_pmf(nu1: float, a: float, k: int) -> float:
    """P(m_1 = k | first fire starts at nu1), k = 0, 1, 2, ...

    k = 0 means the fire never leaves the origin; the paper states the
    formula for k >= 1 but it extends to k = 0 with an empty product.
    """
    if nu1 < 0:
        raise DomainError("nu1 must be nonnegative")
    if a <= 0:
        raise DomainError("delay constant must be positive")
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    logp = -nu1 - a * (k + 1)
    for x in range(1, k + 1):
        logp += math.log1p(-math.exp(-nu1 - a * x))
    return math.exp(logp)


def m1_infinite_mass(nu1: float, a: float, tol: float = 1e-12) -> float:
    """P(m_1 = infinity | nu1): the atom completing the m_1 law."""
    return math.exp(log_product_shifted_geometric(nu1, a, tol))


def marginal_m1_pmf(a: float, k: int, tol: float = 1e-10) -> float:
    """P(m_1 = k) with nu1 ~ exp(1) integrated out by quadrature."""
    if a <= 0:
        raise DomainError("delay constant must be positive")
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    powers = [math.exp(-a * x) for x in range(1, k + 1)]
    scale = math.exp(-a * (k + 1))

    def integrand(v: float) -> float:
        s = 0.0
        for p in powers:
            s += math.log1p(-v * p)
        return v * math.exp(s)

    return scale * adaptive_simpson(integrand, 0.0, 1.0, tol)


# ---------------------------------------------------------------------------
# exact frontier classification (constant delay, zero burn time)
# ---------------------------------------------------------------------------

def frontier_q(t: float, a: float, tol: float = 1e-12) -> float:
    """Bernoulli parameter for 'the fire at a fresh frontier never stops'."""
    return math.exp(log_product_shifted_geometric(t, a, tol))


def classify_frontier(t: float, a: float, next_uniform, tol: float = 1e-12):
    """Decide the whole future of a fire standing at a fresh frontier.

    The fire ignited the frontier site at time t; every site beyond is
    untouched, so the tree-presence indicator at offset j >= 1 when the fire
    arrives (time t + a j) is an independent Bernoulli(1 - e^{-(t+aj)}).

    Returns None when the fire continues forever (probability q, drawn
    first), otherwise the offset j - 1 >= 0 of the rightmost burnt site
    relative to the frontier, sampled from the exact conditional law via
    sequential conditionals: pass offset j with probability
    s_j (1 - Q_{j+1}) / (1 - Q_j) where Q_j = prod_{m>=j} s_m.
    """
    if a <= 0:
        raise DomainError("delay constant must be positive")
    if t < 0:
        raise PreconditionViolation("frontier time must be nonnegative")
    log_q = log_product_shifted_geometric(t, a, tol)
    if next_uniform() < math.exp(log_q):
        return None
    j = 1
    while True:
        s_j = -math.expm1(-(t + a * j))
        log_q_next = log_q - math.log(s_j)
        one_minus_q = -math.expm1(log_q)
        one_minus_q_next = -math.expm1(log_q_next)
        pass_prob = s_j * one_minus_q_next / one_minus_q
        if next_uniform() >= pass_prob:
            return j - 1
        j += 1
        log_q = log_q_next
        if j > 10_000_000:
            raise DomainError("stop-site sampler failed to terminate")


def frontier_stop_pmf(t: float, a: float, j: int, tol: float = 1e-12) -> float:
    """P(stop exactly at offset j | the frontier fire is finite), j >= 1.

    Stopping at offset j means offsets 1..j-1 passed and offset j failed;
    the rightmost burnt offset is then j - 1.
    """
    if j < 1:
        raise DomainError("offsets start at 1")
    log_pass = 0.0
    for m in range(1, j):
        log_pass += math.log1p(-math.exp(-(t + a * m)))
    fail = math.exp(-(t + a * j))
    q = math.exp(log_product_shifted_geometric(t, a, tol))
    return math.exp(log_pass) * fail / (1.0 - q)


# ---------------------------------------------------------------------------
# post-processing of completed runs
# ---------------------------------------------------------------------------

def extract_maxima(run) -> list:
    """Re-derive the successive-maxima records of a run from raw timelines.

    This is an independent scan over the recorded ignitions (it does not
    look at the engine's own maxima records), used to cross-check them.
    Requires the run to have been made with attempt recording on.
    """
    from .engine import MaximaRecord  # local import to avoid a cycle

    window_start = {}
    for att in run.attempts:
        if att.ignited_at is not None:
            window_start[(att.target, att.ignited_at)] = att.window_start

    ignitions = []
    for site, episodes in run.timelines.items():
        for ep in episodes:
            if ep.ignite_time is not None:
                ignitions.append((ep.ignite_time, site, ep.fire_index))
    ignitions.sort()

    by_fire_class = {f.index: f.classification for f in run.fires}
    records = []
    current = None
    gmax = -1
    for t, site, fire in ignitions:
        if site <= gmax:
            continue
        if current is not None and current["fire"] != fire:
            records.append(current)
            current = None
        if current is None:
            current = {"fire": fire, "prev_max": gmax, "stretches": [], "first": t}
        if site == 0:
            w_s = t  # origin ignitions happen at the plant instant
        else:
            w_s = window_start[(site, t)]
        jump = t > w_s
        if not current["stretches"]:
            current["stretches"].append(1)
        elif jump:
            current["stretches"].append(1)
        else:
            current["stretches"][-1] += 1
        current["m"] = site
        current["f_first"] = t
        gmax = site
    if current is not None:
        records.append(current)

    out = []
    for i, rec in enumerate(records, start=1):
        m = rec["m"]
        second = None
        eps = run.timelines.get(m, [])
        burn_times = [ep.ignite_time for ep in eps if ep.ignite_time is not None]
        if len(burn_times) >= 2:
            second = sorted(burn_times)[1]
        cls = by_fire_class.get(rec["fire"], "finite")
        out.append(MaximaRecord(
            index=i,
            site=m,
            fire_index=rec["fire"],
            f_first=rec["f_first"],
            f_second=second,
            stretch_lengths=tuple(rec["stretches"]),
            jumps=len(rec["stretches"]),
            completed=(cls == "finite"),
        ))
    return out


def burn_ratio_stats(first_burn_maps: list, sites: list) -> list:
    """Per-site summary of f_{n,1} / log n across runs.

    Sites 0 and 1 are excluded (log n vanishes).  Each row reports the
    number of runs in which the site burnt, quantiles of the ratio, and the
    fraction inside (0.7, 1.3).
    """
    import numpy as np

    rows = []
    for n in sites:
        if n <= 1:
            continue
        ratios = np.array([fb[n] / math.log(n) for fb in first_burn_maps if n in fb])
        row = {"site": n, "observed": int(ratios.size), "runs": len(first_burn_maps)}
        if ratios.size:
            qs = np.quantile(ratios, [0.05, 0.25, 0.5, 0.75, 0.95])
            row.update(q05=float(qs[0]), q25=float(qs[1]), median=float(qs[2]),
                       q75=float(qs[3]), q95=float(qs[4]),
                       frac_in_band=float(np.mean((ratios > 0.7) & (ratios < 1.3))))
        rows.append(row)
    return rows
