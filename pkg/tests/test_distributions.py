"""Law specs: values, means, Laplace transforms, empirical distributions."""

import math

import numpy as np
import pytest
from scipy import stats as sps

from zfire import distributions as d
from zfire.errors import ConfigError
from zfire.rng import DELTA, THETA, RngPolicy

POLICY = RngPolicy(31337)


def _sample_many(spec, n, purpose=THETA, site=2):
    return np.array([spec.sample(POLICY, site, purpose, occ) for occ in range(n)])


def test_zero_always_zero():
    z = d.zero()
    assert all(z.sample(POLICY, s, THETA, o) == 0.0 for s in range(3) for o in range(3))
    assert z.mean() == 0.0 and z.laplace_at_one() == 1.0


def test_constant_value_and_canonicalization():
    c = d.constant(2.0)
    assert c.sample(POLICY, 9, THETA, 5) == 2.0
    assert c.mean() == 2.0
    assert d.constant(0.0).kind == "zero"


def test_means():
    assert d.exponential(2.0).mean() == 0.5
    assert d.bernoulli_scaled(3.0, 0.25).mean() == 0.75
    assert d.uniform(1.0, 3.0).mean() == 2.0


def test_laplace_at_one():
    assert d.constant(1.0).laplace_at_one() == pytest.approx(math.exp(-1))
    assert d.exponential(1.0).laplace_at_one() == pytest.approx(0.5)
    assert d.bernoulli_scaled(2.0, 0.5).laplace_at_one() == pytest.approx(
        0.5 + 0.5 * math.exp(-2))
    assert d.uniform(0.0, 2.0).laplace_at_one() == pytest.approx(
        (1 - math.exp(-2)) / 2)


def test_samples_nonnegative_and_deterministic():
    for spec in (d.exponential(0.7), d.bernoulli_scaled(2.0, 0.3), d.uniform(0.5, 1.5)):
        xs = _sample_many(spec, 1000)
        assert xs.min() >= 0.0
        assert np.array_equal(xs, _sample_many(spec, 1000))


def test_empirical_mean_within_3_sigma():
    spec = d.exponential(1.0)
    xs = _sample_many(spec, 100_000)
    se = xs.std() / math.sqrt(xs.size)
    assert abs(xs.mean() - spec.mean()) < 3 * se


@pytest.mark.parametrize("spec,dist,args", [
    (d.exponential(2.0), "expon", (0, 0.5)),
    (d.uniform(0.25, 1.75), "uniform", (0.25, 1.5)),
])
def test_continuous_law_ks(spec, dist, args):
    xs = _sample_many(spec, 100_000)
    p = sps.kstest(xs, dist, args=args).pvalue
    assert p > 0.01


def test_bernoulli_frequency():
    spec = d.bernoulli_scaled(5.0, 0.2)
    xs = _sample_many(spec, 100_000)
    frac = np.mean(xs == 5.0)
    assert abs(frac - 0.2) < 0.004
    assert set(np.unique(xs)) <= {0.0, 5.0}


def test_delta_deterministic_c_over_x():
    spec = d.deterministic_c_over_x(2.0)
    assert spec.sample(POLICY, 10, 0) == pytest.approx(0.2)
    assert spec.sample(POLICY, 1, 0) == pytest.approx(2.0)
    assert spec.sample(POLICY, 0, 0) == pytest.approx(2.0)  # c at the origin
    assert spec.mean(4) == pytest.approx(0.5)


def test_delta_bounded_c_over_x():
    spec = d.bounded_c_over_x(2.0, delta_cap=1.0)
    for x in (1, 5, 50, 5000):
        cap = spec.support_cap(x)
        assert cap == pytest.approx(min(4.0 / x, 1.0 / math.sqrt(2 * x)))
        xs = np.array([spec.sample(POLICY, x, occ) for occ in range(2000)])
        assert xs.min() >= 0.0 and xs.max() <= cap
        se = cap / math.sqrt(12 * xs.size)
        assert abs(xs.mean() - spec.mean(x)) < 4 * se
    # the support bound times sqrt(x) vanishes
    assert spec.support_cap(10 ** 8) * math.sqrt(10 ** 8) < 1e-3
    # and the mean is c/x once the cap stops binding
    assert spec.mean(10 ** 6) == pytest.approx(2.0 / 10 ** 6)


def test_delta_homogeneous_wraps_distspec():
    spec = d.homogeneous(d.exponential(3.0))
    xs = np.array([spec.sample(POLICY, 7, occ) for occ in range(50_000)])
    assert abs(xs.mean() - 1 / 3) < 0.01
    assert spec.mean(123) == pytest.approx(1 / 3)


def test_validation_errors():
    with pytest.raises(ConfigError):
        d.DistSpec("nope")
    with pytest.raises(ConfigError):
        d.exponential(0.0)
    with pytest.raises(ConfigError):
        d.uniform(2.0, 1.0)
    with pytest.raises(ConfigError):
        d.bernoulli_scaled(1.0, 1.5)
    with pytest.raises(ConfigError):
        d.DeltaSpec("homogeneous")


def test_round_trip_dicts():
    for spec in (d.zero(), d.constant(1.5), d.exponential(2.0),
                 d.bernoulli_scaled(1.0, 0.5), d.uniform(0.0, 2.0)):
        assert d.DistSpec.from_dict(spec.to_dict()) == spec
    for spec in (d.homogeneous(d.exponential(1.0)), d.deterministic_c_over_x(2.0),
                 d.bounded_c_over_x(1.5, 0.7)):
        assert d.DeltaSpec.from_dict(spec.to_dict()) == spec
