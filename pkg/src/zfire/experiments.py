"""Ensemble orchestration and statistical verification experiments.

Each experiment runs N independent replications (seed_i derived from the
master seed by a keyed hash, so results do not depend on worker count or
completion order), reduces every run to a small record inside the worker,
and aggregates the records into a StatResult carrying full provenance.
Replication failures are collected into a ledger instead of aborting the
ensemble.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import __version__, analytics, io, stats
from . import distributions as dist
from .engine import ModelConfig, simulate, simulate_sheared
from .errors import EmptyEnsemble, InsufficientData
from .rng import RngPolicy

EXPERIMENT_KINDS = (
    "kappa_estimate",
    "jump_law",
    "burn_ratio",
    "coupling_test",
    "dichotomy_compare",
    "infinite_fire_existence",
    "stop_rate",
    "run_record",
)

_CHUNK = 64  # replications per worker task; independent of worker count


@dataclass(frozen=True)
class EnsembleSpec:
    """What to replicate and how to reduce it."""

    base: ModelConfig
    replications: int
    kind: str
    master_seed: int
    parallelism: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "replications": self.replications,
                "master_seed": self.master_seed, "parallelism": self.parallelism,
                "params": dict(self.params)}

    @staticmethod
    def from_dict(d: dict, base: ModelConfig) -> "EnsembleSpec":
        return EnsembleSpec(base=base, replications=d["replications"], kind=d["kind"],
                            master_seed=d["master_seed"],
                            parallelism=d.get("parallelism", 1),
                            params=d.get("params", {}))


@dataclass(frozen=True)
class StatResult:
    """Outcome of one verification experiment, reproducible from provenance."""

    kind: str
    estimate: float | None
    interval: tuple | None
    statistic: float | None
    p_value: float | None
    replications: int
    wall_seconds: float
    provenance: dict
    passed: bool | None
    details: dict


# ---------------------------------------------------------------------------
# per-replication runners (top level so worker processes can pickle them)
# ---------------------------------------------------------------------------

def _reduce_kappa(run) -> dict:
    first = run.fires[0] if run.fires else None
    return {
        "kappa": run.kappa,
        "T": run.T,
        "fires": len(run.fires),
        "m1": None if first is None else first.rightmost,
        "m1_infinite": bool(first and first.classification == "infinite_exact"),
    }


def _reduce_jumps(run) -> dict:
    return {
        "Ns": [m.jumps for m in run.maxima if m.completed],
        "clean": run.truncated_by_sentinel == 0,
    }


def _reduce_stop_rate(run) -> dict:
    trials = run.frontier_trials
    return {
        "trials": len(trials),
        "stops": sum(1 for t in trials if not t.continued),
        "clean": run.truncated_by_sentinel == 0,
    }


def _reduce_burn_ratio(run) -> dict:
    sites = run.config.stop_when_site_burnt
    grid = (10, 100, sites) if sites else (10, 100, 1000)
    return {f"f{n}": run.first_burn.get(n) for n in grid}


def _reduce_detection(run) -> dict:
    return {"t_detect": run.detection_time}


def _run_one(config: ModelConfig, kind: str, params: dict) -> dict:
    if kind == "coupling_test":
        trace = simulate_sheared(config, window_sites=params["window_sites"],
                                 observe_for=params["observe_for"])
        clusters = [f.rightmost for f in trace.run.fires
                    if f.start_time > trace.T and f.index > trace.run.kappa
                    and (f.classification == "finite"
                         or (f.classification == "truncated"
                             and f.truncated_reason == "window"))]
        # a fixed count of gaps per replication: pooling every gap inside a
        # fixed window right-truncates long gaps and biases a one-sample KS
        gaps = trace.interburn_times()[:params["gaps_per_rep"]]
        return {"diffs": gaps, "clusters": clusters, "T": trace.T}
    run = simulate(config)
    if kind == "kappa_estimate":
        return _reduce_kappa(run)
    if kind == "jump_law":
        return _reduce_jumps(run)
    if kind == "stop_rate":
        return _reduce_stop_rate(run)
    if kind == "burn_ratio":
        return _reduce_burn_ratio(run)
    if kind in ("dichotomy_compare", "infinite_fire_existence"):
        return _reduce_detection(run)
    if kind == "run_record":
        rec = io.run_record(run)
        if run.config.site_window is not None:
            diffs = []
            prev = 0.0
            for ep in run.timelines.get(0, []):
                if ep.ignite_time is not None:
                    diffs.append(ep.ignite_time - prev)
                    prev = ep.ignite_time
            cap = params.get("gaps_per_rep")
            if cap is not None:
                diffs = diffs[:cap]
            rec["origin_interburn"] = [float(f"{d:.12g}") for d in diffs]
        return rec
    raise ValueError(kind)


def _run_chunk(args) -> list:
    base, kind, params, master_seed, lo, hi = args
    policy = RngPolicy(master_seed)
    out = []
    for i in range(lo, hi):
        cfg = replace(base, seed=policy.replicate_seed(i))
        try:
            out.append((i, _run_one(cfg, kind, params), None))
        except Exception as exc:  # per-replication failure ledger
            out.append((i, None, f"{type(exc).__name__}: {exc}"))
    return out


def run_ensemble(spec: EnsembleSpec):
    """Execute all replications; returns (records, failures, wall_seconds).

    records[i] corresponds to replication i in derivation order, so the
    output is identical for any parallelism degree.
    """
    if spec.replications <= 0:
        raise EmptyEnsemble("an ensemble needs at least one replication")
    t0 = time.perf_counter()
    chunks = [(spec.base, spec.kind, spec.params, spec.master_seed, lo,
               min(lo + _CHUNK, spec.replications))
              for lo in range(0, spec.replications, _CHUNK)]
    results = []
    if spec.parallelism > 1:
        with ProcessPoolExecutor(max_workers=spec.parallelism) as pool:
            for part in pool.map(_run_chunk, chunks):
                results.extend(part)
    else:
        for chunk in chunks:
            results.extend(_run_chunk(chunk))
    results.sort(key=lambda r: r[0])
    records = [rec for _, rec, err in results if err is None]
    failures = [{"index": i, "error": err} for i, _, err in results if err is not None]
    return records, failures, time.perf_counter() - t0


def _provenance(spec: EnsembleSpec) -> dict:
    return {
        "config_hash": io.config_hash(spec.base),
        "master_seed": spec.master_seed,
        "version": __version__,
        "kind": spec.kind,
        "replications": spec.replications,
    }


def _result(spec, wall, *, estimate=None, interval=None, statistic=None,
            p_value=None, passed=None, replications=None, **details) -> StatResult:
    return StatResult(kind=spec.kind, estimate=estimate, interval=interval,
                      statistic=statistic, p_value=p_value,
                      replications=spec.replications if replications is None else replications,
                      wall_seconds=wall, provenance=_provenance(spec),
                      passed=passed, details=details)


# ---------------------------------------------------------------------------
# the experiments
# ---------------------------------------------------------------------------

def kappa_experiment(a: float, replications: int, master_seed: int,
                     sentinel: int = 12, parallelism: int = 1) -> StatResult:
    """Estimate P(first fire is infinite) with exact frontier classification.

    Every fire's infinite-vs-finite decision is sampled from its exact
    continuation law, so the estimate carries no truncation bias at any
    sentinel.  Pass condition: the Wilson 95% interval contains the
    quadrature value.
    """
    base = ModelConfig(theta_spec=dist.zero(),
                       delta_spec=dist.homogeneous(dist.constant(a)),
                       t_max=math.inf, seed=0, site_sentinel=sentinel,
                       frontier_mode="exact", stop_on_infinite=True,
                       record_attempts=False)
    spec = EnsembleSpec(base, replications, "kappa_estimate", master_seed, parallelism)
    records, failures, wall = run_ensemble(spec)
    n = len(records)
    k1 = sum(1 for r in records if r["kappa"] == 1)
    est = k1 / n
    ci = stats.wilson_interval(k1, n)
    tail = {f"p_kappa_gt_{j}": sum(1 for r in records if r["kappa"] > j) / n
            for j in range(1, 6)}
    quad = analytics.p_kappa1_quadrature(a, 1e-8)
    return _result(spec, wall, estimate=est, interval=ci,
                   passed=ci[0] <= quad <= ci[1], replications=n,
                   quadrature=quad, a=a, failures=failures, **tail)


def m1_law_experiment(a: float, replications: int, master_seed: int,
                      bins: int = 15, sentinel: int = 40,
                      parallelism: int = 1) -> StatResult:
    """Chi-square of the simulated m_1 histogram against the marginal law.

    Cells are {1..bins} plus one cell absorbing everything else (m_1 = 0,
    m_1 > bins, and the infinite fire); the sentinel sits beyond the last
    explicit bin so binned counts come from plain simulation.
    """
    if sentinel <= bins:
        raise ValueError("sentinel must exceed the last explicit bin")
    base = ModelConfig(theta_spec=dist.zero(),
                       delta_spec=dist.homogeneous(dist.constant(a)),
                       t_max=math.inf, seed=0, site_sentinel=sentinel,
                       max_fires=1, frontier_mode="exact",
                       stop_on_infinite=True, record_attempts=False)
    spec = EnsembleSpec(base, replications, "kappa_estimate", master_seed, parallelism)
    records, failures, wall = run_ensemble(spec)
    counts = [0] * (bins + 1)
    for r in records:
        m1 = r["m1"]
        if not r["m1_infinite"] and 1 <= m1 <= bins:
            counts[m1 - 1] += 1
        else:
            counts[bins] += 1
    probs = [analytics.marginal_m1_pmf(a, k) for k in range(1, bins + 1)]
    probs.append(1.0 - sum(probs))
    stat, p = stats.chi_square_gof(counts, probs)
    return _result(spec, wall, statistic=stat, p_value=p, passed=p > 0.01,
                   replications=len(records), counts=counts, probs=probs,
                   a=a, failures=failures)


def jump_law_experiment(theta_const: float, replications: int, master_seed: int,
                        t_max: float = 8.0, parallelism: int = 1,
                        min_maxima: int = 200) -> StatResult:
    """Pooled stretch counts N_i against Geometric(e^{-theta}).

    Only completed excursions from runs without sentinel truncation are
    pooled.  The tail bin is chosen so its expected count stays above 5.
    """
    if theta_const <= 0:
        raise ValueError("jump law needs a positive constant burn time")
    base = ModelConfig(theta_spec=dist.constant(theta_const),
                       delta_spec=dist.homogeneous(dist.zero()),
                       t_max=t_max, seed=0, site_sentinel=100_000,
                       frontier_mode="truncate", record_attempts=False)
    spec = EnsembleSpec(base, replications, "jump_law", master_seed, parallelism)
    records, failures, wall = run_ensemble(spec)
    ns = []
    for r in records:
        if r["clean"]:
            ns.extend(r["Ns"])
    if len(ns) < min_maxima:
        raise InsufficientData(f"only {len(ns)} maxima observed, need {min_maxima}")
    p_geo = math.exp(-theta_const)
    j_max = 2
    while j_max < 15 and len(ns) * (1.0 - p_geo) ** j_max >= 5.0:
        j_max += 1
    counts = [0] * j_max
    for n in ns:
        counts[min(n, j_max) - 1] += 1
    probs = [(1.0 - p_geo) ** (k - 1) * p_geo for k in range(1, j_max)]
    probs.append((1.0 - p_geo) ** (j_max - 1))
    stat, p = stats.chi_square_gof(counts, probs)
    return _result(spec, wall, statistic=stat, p_value=p, passed=p > 0.01,
                   replications=len(records), pooled=len(ns), counts=counts,
                   probs=probs, theta=theta_const, failures=failures)


def stop_rate_experiment(theta_spec: dist.DistSpec, replications: int,
                         master_seed: int, t_max: float = 4.0,
                         parallelism: int = 1,
                         min_events: int = 1000) -> StatResult:
    """Frequency of frontier stop events against p* = E e^{-theta}.

    A frontier event is an influence window opening on a fresh, vacant
    site; with instantaneous spread each such event stops the fire
    independently with probability p*.
    """
    base = ModelConfig(theta_spec=theta_spec,
                       delta_spec=dist.homogeneous(dist.zero()),
                       t_max=t_max, seed=0, site_sentinel=100_000,
                       frontier_mode="truncate", record_attempts=False)
    spec = EnsembleSpec(base, replications, "stop_rate", master_seed, parallelism)
    records, failures, wall = run_ensemble(spec)
    trials = sum(r["trials"] for r in records if r["clean"])
    stops = sum(r["stops"] for r in records if r["clean"])
    if trials < min_events:
        raise InsufficientData(f"only {trials} frontier events, need {min_events}")
    p_star = theta_spec.laplace_at_one()
    est = stops / trials
    ci = stats.wilson_interval(stops, trials)
    return _result(spec, wall, estimate=est, interval=ci,
                   passed=ci[0] <= p_star <= ci[1], replications=len(records),
                   p_star=p_star, trials=trials, stops=stops, failures=failures)


def coupling_test(a: float, replications: int, master_seed: int,
                  gaps_per_rep: int = 100, window_sites: int = 24,
                  parallelism: int = 1) -> StatResult:
    """Compare the post-infinite-fire process, sheared by t -> t + T + a x,
    with a direct zero-delay zero-burn baseline.

    Two-sample KS on origin inter-burn times, one-sample KS of the baseline
    inter-burn times against exp(1), and a two-sample comparison of
    window-capped cluster sizes as a diagnostic.  Each replication
    contributes its first `gaps_per_rep` gaps, observed over a horizon with
    so much slack that the fixed-window truncation bias is negligible.
    """
    observe_for = 2.0 * gaps_per_rep
    sheared_base = ModelConfig(theta_spec=dist.zero(),
                               delta_spec=dist.homogeneous(dist.constant(a)),
                               t_max=math.inf, seed=0, site_sentinel=12,
                               frontier_mode="exact", stop_on_infinite=True,
                               record_attempts=False)
    spec = EnsembleSpec(sheared_base, replications, "coupling_test", master_seed,
                        parallelism, params={"observe_for": observe_for,
                                             "window_sites": window_sites,
                                             "gaps_per_rep": gaps_per_rep})
    records, failures, wall = run_ensemble(spec)

    policy = RngPolicy(master_seed)
    baseline_base = ModelConfig(theta_spec=dist.zero(),
                                delta_spec=dist.homogeneous(dist.zero()),
                                t_max=observe_for, seed=0,
                                site_sentinel=window_sites + 2,
                                site_window=window_sites,
                                frontier_mode="truncate", record_attempts=False)
    base_spec = EnsembleSpec(baseline_base, replications, "run_record",
                             policy.replicate_seed(10 ** 9), parallelism,
                             params={"gaps_per_rep": gaps_per_rep})
    base_records, base_failures, base_wall = run_ensemble(base_spec)

    sheared_diffs = [d for r in records for d in r["diffs"]]
    sheared_clusters = [c for r in records for c in r["clusters"]]
    base_diffs = [d for r in base_records for d in r["origin_interburn"]]
    base_clusters = [f["rightmost"] for r in base_records for f in r["fires"]
                     if f["classification"] == "finite"
                     or (f["classification"] == "truncated" and f["reason"] == "window")]

    ks_stat, ks_p = stats.ks_two_sample(sheared_diffs, base_diffs)
    exp_stat, exp_p = stats.ks_exponential(base_diffs)
    cmax = max(sheared_clusters + base_clusters + [1])
    bins = list(range(0, min(cmax, window_sites) + 1))
    sc = [sum(1 for c in sheared_clusters if c == b) for b in bins]
    bc = [sum(1 for c in base_clusters if c == b) for b in bins]
    cl_stat, cl_p = stats.chi_square_two_sample(sc, bc)
    passed = ks_p > 0.01 and exp_p > 0.01
    return _result(spec, wall + base_wall, statistic=ks_stat, p_value=ks_p,
                   passed=passed, replications=len(records),
                   n_sheared=len(sheared_diffs), n_baseline=len(base_diffs),
                   baseline_exp_ks=(exp_stat, exp_p),
                   cluster_chi2=(cl_stat, cl_p), a=a,
                   failures=failures + base_failures)


def traversal_time(c: float, reach: int) -> float:
    """Time the c/x front needs to cross `reach` bonds from the origin."""
    return c * (1.0 + sum(1.0 / x for x in range(1, reach)))


def dichotomy_experiment(c_low: float, c_high: float, replications: int,
                         master_seed: int, reach: int = 1000,
                         slack: float = 3.0, t_max: float | None = None,
                         parallelism: int = 1) -> StatResult:
    """Long-reach frequency for site-dependent delays c/x at two values of c.

    Counts runs in which some fire advances `reach` sites beyond the
    previous global maximum; one-sided test that the supercritical c does
    this more often, reported next to the analytic continuation products.

    The horizon matters: crossing `reach` bonds takes the c/x front about
    c log(reach) units outright, so at any common horizon the comparison is
    confounded by front speed (the smaller c arrives first).  By default
    each c therefore runs to its own traversal time plus `slack`, which
    compares the propensity to produce an unbroken long traversal per
    opportunity, the quantity the continuation product describes.  Pass an
    explicit t_max to force a common horizon instead.
    """
    fractions = {}
    counts = {}
    wall = 0.0
    all_failures = []
    policy = RngPolicy(master_seed)
    spec_high = None
    horizons = {}
    for tag, c, seed_ix in (("low", c_low, 1), ("high", c_high, 2)):
        horizon = t_max if t_max is not None else traversal_time(c, reach) + slack
        horizons[tag] = horizon
        base = ModelConfig(theta_spec=dist.zero(),
                           delta_spec=dist.deterministic_c_over_x(c),
                           t_max=horizon, seed=0, site_sentinel=reach,
                           frontier_mode="heuristic", stop_on_infinite=True,
                           record_attempts=False)
        spec = EnsembleSpec(base, replications, "dichotomy_compare",
                            policy.replicate_seed(seed_ix), parallelism,
                            params={"c": c})
        if tag == "high":
            spec_high = spec
        records, failures, w = run_ensemble(spec)
        wall += w
        all_failures.extend(failures)
        hits = sum(1 for r in records if r["t_detect"] is not None)
        counts[tag] = (hits, len(records))
        fractions[tag] = hits / len(records)
    p = stats.binomial_greater(counts["high"][0], counts["high"][1],
                               counts["low"][0], counts["low"][1])
    products = {
        "q_low": analytics.continuation_product(1.0, 10, dist.deterministic_c_over_x(c_low)),
        "q_high": analytics.continuation_product(1.0, 10, dist.deterministic_c_over_x(c_high)),
    }
    return _result(spec_high, wall, estimate=fractions["high"], p_value=p,
                   passed=p < 0.01, fraction_low=fractions["low"],
                   fraction_high=fractions["high"], counts=counts,
                   continuation=products, c_low=c_low, c_high=c_high,
                   reach=reach, horizons=horizons, failures=all_failures)


def existence_experiment(delta_spec: dist.DeltaSpec, theta_spec: dist.DistSpec,
                         replications: int, master_seed: int,
                         t_grid=(10.0, 100.0, 1000.0), sentinel: int = 1000,
                         parallelism: int = 1) -> StatResult:
    """Fraction of runs with a detected infinite fire by each horizon.

    Detection uses the heuristic sentinel; each run is simulated once to
    the largest horizon and its first detection time compared against the
    grid, so the reported fractions are nondecreasing by construction.
    """
    grid = sorted(t_grid)
    base = ModelConfig(theta_spec=theta_spec, delta_spec=delta_spec,
                       t_max=grid[-1], seed=0, site_sentinel=sentinel,
                       frontier_mode="heuristic", stop_on_infinite=True,
                       record_attempts=False)
    spec = EnsembleSpec(base, replications, "infinite_fire_existence",
                        master_seed, parallelism, params={"t_grid": list(grid)})
    records, failures, wall = run_ensemble(spec)
    n = len(records)
    hits = [sum(1 for r in records if r["t_detect"] is not None
                and r["t_detect"] <= g) for g in grid]
    fractions = [h / n for h in hits]
    monotone = all(fractions[i] <= fractions[i + 1] for i in range(len(grid) - 1))
    return _result(spec, wall, estimate=fractions[-1],
                   interval=stats.wilson_interval(hits[-1], n),
                   passed=monotone and fractions[-1] > 0.9,
                   replications=n, t_grid=list(grid), fractions=fractions,
                   monotone=monotone, failures=failures)


def burn_ratio_experiment(replications: int, master_seed: int, site: int = 1000,
                          theta_const: float = 1.0, t_max: float = 12.0,
                          band=(0.7, 1.3), parallelism: int = 1) -> StatResult:
    """Fraction of runs with f_{n,1} / log n inside the band at n = site.

    Runs in which the site never burns within the horizon count as outside
    the band.
    """
    base = ModelConfig(theta_spec=dist.constant(theta_const),
                       delta_spec=dist.homogeneous(dist.zero()),
                       t_max=t_max, seed=0, site_sentinel=100_000,
                       frontier_mode="truncate", stop_when_site_burnt=site,
                       record_attempts=False)
    spec = EnsembleSpec(base, replications, "burn_ratio", master_seed, parallelism,
                        params={"site": site})
    records, failures, wall = run_ensemble(spec)
    key = f"f{site}"
    log_n = math.log(site)
    ratios = [r[key] / log_n for r in records if r[key] is not None]
    inside = sum(1 for x in ratios if band[0] < x < band[1])
    n = len(records)
    frac = inside / n
    table = analytics.burn_ratio_stats(
        [{site: r[key]} for r in records if r[key] is not None], [site])
    return _result(spec, wall, estimate=frac,
                   interval=stats.wilson_interval(inside, n), replications=n,
                   passed=frac >= 0.95, observed=len(ratios), band=list(band),
                   site=site, table=table, failures=failures)


# ---------------------------------------------------------------------------
# exploratory diagnostics (inspection only, never acceptance)
# ---------------------------------------------------------------------------

def exploratory_diagnostics(run) -> dict:
    """Per-run series the asymptotic statements talk about.

    Reports log log m_i for the double-exponential growth of successive
    maxima, the ratios f_{m_i,1}/log m_i and f_{m_i,2}/log m_i, and the
    number of boundary-classified fires (the uniqueness question has no
    finite-horizon observable, so this is inspection material only).
    """
    rows = []
    for m in run.maxima:
        if m.site < 2:
            continue
        log_m = math.log(m.site)
        rows.append({
            "i": m.index,
            "m": m.site,
            "loglog_m": math.log(log_m),
            "f1_over_log": m.f_first / log_m,
            "f2_over_log": None if m.f_second is None else m.f_second / log_m,
        })
    boundary = sum(1 for f in run.fires
                   if f.classification in ("infinite_exact", "infinite_heuristic")
                   or (f.classification == "truncated"
                       and f.truncated_reason == "sentinel"))
    return {"maxima": rows, "boundary_classified_fires": boundary}
