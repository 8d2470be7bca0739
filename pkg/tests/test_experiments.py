"""Statistical utilities, ensemble determinism, and experiment smoke checks."""

import math

import numpy as np
import pytest
from scipy import stats as sps

from zfire import distributions as d
from zfire import experiments as ex
from zfire import stats
from zfire.engine import ModelConfig
from zfire.errors import EmptyEnsemble, InsufficientData


# -- statistical utilities -----------------------------------------------------

def test_wilson_degenerate_endpoints():
    lo, hi = stats.wilson_interval(0, 50)
    assert lo == 0.0 and 0.0 < hi < 0.2
    lo, hi = stats.wilson_interval(50, 50)
    assert hi == 1.0 and 0.8 < lo < 1.0


def test_wilson_contains_point_estimate():
    lo, hi = stats.wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert 0.0 <= lo <= hi <= 1.0


def test_ks_identical_samples():
    xs = np.linspace(0.1, 5.0, 200)
    stat, p = stats.ks_two_sample(xs, xs)
    assert stat == 0.0
    assert p == 1.0


def test_chi_square_hand_value():
    # fair die, counts (12, 8, 10, 10, 10, 10): stat = (4 + 4)/10 = 0.8, df 5
    obs = [12, 8, 10, 10, 10, 10]
    probs = [1 / 6] * 6
    stat, p = stats.chi_square_gof(obs, probs)
    assert stat == pytest.approx(0.8, abs=1e-12)
    assert p == pytest.approx(float(sps.chi2.sf(0.8, 5)), abs=1e-12)


def test_chi_square_rejects_bad_probs():
    with pytest.raises(ValueError):
        stats.chi_square_gof([1, 2], [0.5, 0.4])


def test_ks_exponential_on_true_sample():
    rng = np.random.default_rng(11)
    xs = rng.exponential(1.0, size=20_000)
    _, p = stats.ks_exponential(xs)
    assert p > 0.01


def test_binomial_greater_direction():
    p_hi = stats.binomial_greater(90, 100, 10, 100)
    p_lo = stats.binomial_greater(10, 100, 90, 100)
    assert p_hi < 1e-6
    assert p_lo > 0.99


# -- ensemble machinery -----------------------------------------------------------

def _tiny_config():
    return ModelConfig(theta_spec=d.exponential(1.0),
                       delta_spec=d.homogeneous(d.exponential(1.0)),
                       t_max=4.0, seed=0, site_sentinel=100,
                       frontier_mode="heuristic", record_attempts=False)


def test_empty_ensemble_rejected():
    spec = ex.EnsembleSpec(_tiny_config(), 0, "run_record", 1)
    with pytest.raises(EmptyEnsemble):
        ex.run_ensemble(spec)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        ex.EnsembleSpec(_tiny_config(), 4, "not_a_kind", 1)


def test_parallelism_leaves_records_identical():
    spec1 = ex.EnsembleSpec(_tiny_config(), 40, "run_record", 999, parallelism=1)
    spec4 = ex.EnsembleSpec(_tiny_config(), 40, "run_record", 999, parallelism=4)
    rec1, fail1, _ = ex.run_ensemble(spec1)
    rec4, fail4, _ = ex.run_ensemble(spec4)
    assert rec1 == rec4
    assert fail1 == fail4 == []


def test_replication_seeds_differ():
    spec = ex.EnsembleSpec(_tiny_config(), 30, "run_record", 5)
    records, _, _ = ex.run_ensemble(spec)
    seeds = [r["seed"] for r in records]
    assert len(set(seeds)) == 30


def test_failure_ledger_collects_per_replication_errors():
    # a site cap just past the sentinel: runs trip ResourceLimit but the
    # ensemble keeps going and records them
    bad = ModelConfig(theta_spec=d.zero(), delta_spec=d.homogeneous(d.zero()),
                      t_max=12.0, seed=0, site_sentinel=10, site_cap=12,
                      frontier_mode="truncate", record_attempts=False)
    spec = ex.EnsembleSpec(bad, 10, "run_record", 3)
    records, failures, _ = ex.run_ensemble(spec)
    assert len(records) + len(failures) == 10
    assert any("ResourceLimit" in f["error"] for f in failures)


def test_provenance_fields():
    res = ex.kappa_experiment(1.0, 200, master_seed=8)
    assert set(res.provenance) >= {"config_hash", "master_seed", "version", "kind"}
    assert res.provenance["master_seed"] == 8
    assert res.replications == 200


# -- experiment smoke checks (small sizes; acceptance runs the full ones) ---------

def test_kappa_experiment_small():
    res = ex.kappa_experiment(2.0, 400, master_seed=21)
    # large delay: the first fire is almost surely the infinite one
    assert res.estimate > 0.85
    assert res.interval[0] <= res.details["quadrature"] <= res.interval[1]
    assert res.details["p_kappa_gt_1"] < 0.15


def test_kappa_tail_probabilities_decreasing():
    res = ex.kappa_experiment(0.7, 500, master_seed=4)
    tails = [res.details[f"p_kappa_gt_{j}"] for j in range(1, 6)]
    assert all(a >= b for a, b in zip(tails, tails[1:]))


def test_m1_experiment_small():
    res = ex.m1_law_experiment(1.0, 2500, master_seed=17)
    assert res.p_value > 0.01
    assert sum(res.details["counts"]) == res.replications


def test_jump_law_small():
    res = ex.jump_law_experiment(1.0, 150, master_seed=33, t_max=8.0)
    assert res.details["pooled"] >= 200
    assert res.p_value > 0.01


def test_jump_law_insufficient_data():
    with pytest.raises(InsufficientData):
        ex.jump_law_experiment(1.0, 3, master_seed=1, t_max=5.0)


def test_stop_rate_small():
    res = ex.stop_rate_experiment(d.constant(1.0), 400, master_seed=9, t_max=4.0)
    assert res.details["p_star"] == pytest.approx(math.exp(-1))
    assert res.interval[0] <= math.exp(-1) <= res.interval[1]


def test_coupling_small():
    res = ex.coupling_test(1.0, 20, master_seed=6, gaps_per_rep=40, window_sites=8)
    assert res.p_value > 0.01
    assert res.details["baseline_exp_ks"][1] > 0.01
    assert res.details["n_sheared"] == 20 * 40


def test_dichotomy_small():
    res = ex.dichotomy_experiment(0.5, 2.0, 120, master_seed=12, reach=300)
    assert res.details["fraction_high"] > res.details["fraction_low"]
    assert res.p_value < 0.01
    assert res.details["continuation"]["q_low"] == 0.0
    assert res.details["continuation"]["q_high"] > 0.0
    # the horizons are scaled to each model's own traversal clock
    assert res.details["horizons"]["high"] > res.details["horizons"]["low"]


def test_dichotomy_common_horizon_reports_honestly():
    # at a common horizon the slower supercritical front cannot reach yet;
    # the experiment must report that rather than mask it
    res = ex.dichotomy_experiment(0.5, 2.0, 60, master_seed=12, reach=300, t_max=8.0)
    assert res.details["fraction_low"] >= res.details["fraction_high"]
    assert res.passed is False


def test_existence_small():
    res = ex.existence_experiment(d.homogeneous(d.exponential(1.0)),
                                  d.exponential(1.0), 60, master_seed=3,
                                  t_grid=(5.0, 20.0, 60.0), sentinel=30)
    fr = res.details["fractions"]
    assert res.details["monotone"]
    assert fr[-1] > 0.9


def test_burn_ratio_small():
    res = ex.burn_ratio_experiment(60, master_seed=14, site=100, t_max=8.0)
    assert res.details["observed"] > 0
    assert 0.0 <= res.estimate <= 1.0
    assert res.details["table"][0]["site"] == 100


def test_exploratory_diagnostics():
    from zfire.engine import simulate
    run = simulate(ModelConfig(theta_spec=d.constant(1.0),
                               delta_spec=d.homogeneous(d.zero()),
                               t_max=8.0, seed=77, site_sentinel=10 ** 5,
                               frontier_mode="truncate"))
    diag = ex.exploratory_diagnostics(run)
    assert diag["boundary_classified_fires"] == 0
    rows = diag["maxima"]
    assert rows
    assert all(r["f1_over_log"] > 0 for r in rows)
    lls = [r["loglog_m"] for r in rows]
    assert lls == sorted(lls)
