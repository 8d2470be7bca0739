"""Analytic formulas against closed-form arithmetic and independent oracles."""

import math

import numpy as np
import pytest

import oracles
from zfire import analytics as an
from zfire import distributions as d
from zfire.errors import DomainError
from zfire.stats import chi_square_two_sample

LN2 = math.log(2.0)


# -- first-fire probability envelope ----------------------------------------

def test_bounds_at_mu_one():
    b = an.p_kappa1_bounds(LN2)
    assert b.mu == pytest.approx(1.0)
    assert b.lower == pytest.approx(0.5)
    assert b.upper == pytest.approx(1 - math.exp(-1), abs=1e-12)


def test_approx_value_a1():
    b = an.p_kappa1_bounds(1.0)
    expected = 1 - (math.exp(-1) + math.exp(-2)) / 2 - math.exp(-3) / 6
    assert b.approx == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.7401, abs=2e-4)


@pytest.mark.parametrize("a", [0.4, LN2, 1.0, 2.0, 4.0])
def test_quadrature_inside_bounds(a):
    q = an.p_kappa1_quadrature(a, 1e-8)
    b = an.p_kappa1_bounds(a)
    assert b.lower <= q <= b.upper
    assert 0.0 < q < 1.0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_approx_relative_error_tight(a):
    q = an.p_kappa1_quadrature(a, 1e-8)
    assert abs(q - an.p_kappa1_bounds(a).approx) / q <= 0.01


def test_approx_relative_error_small_a():
    q = an.p_kappa1_quadrature(0.35, 1e-8)
    assert abs(q - an.p_kappa1_bounds(0.35).approx) / q <= 0.07


def test_quadrature_against_grid_simpson_oracle():
    for a in (0.5, 1.0, 2.0):
        mine = an.p_kappa1_quadrature(a, 1e-9)
        grid = oracles.p_kappa1_grid_quadrature(a)
        assert mine == pytest.approx(grid, abs=1e-7)


def test_quadrature_large_a_limit():
    assert an.p_kappa1_quadrature(30.0, 1e-8) == pytest.approx(1.0, abs=1e-8)


def test_quadrature_domain_errors():
    with pytest.raises(DomainError):
        an.p_kappa1_quadrature(0.0)
    with pytest.raises(DomainError):
        an.p_kappa1_quadrature(1.0, tol=0.5)
    with pytest.raises(DomainError):
        an.p_kappa1_bounds(-1.0)


# -- shifted geometric products ----------------------------------------------

@pytest.mark.parametrize("t,a", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.3), (3.0, 2.0)])
def test_product_against_mpmath(t, a):
    mine = math.exp(an.log_product_shifted_geometric(t, a, 1e-12))
    assert mine == pytest.approx(oracles.product_one_minus_exp(t, a), abs=1e-10)


def test_frontier_q_value():
    # prod_{n>=1}(1 - e^{-n}); frozen from the mpmath oracle
    assert an.frontier_q(0.0, 1.0) == pytest.approx(0.504428654726, abs=1e-9)


# -- law of m_1 ---------------------------------------------------------------

def test_m1_pmf_point_value():
    assert an.m1_pmf(0.0, 1.0, 1) == pytest.approx(
        math.exp(-2) * (1 - math.exp(-1)), abs=1e-15)


def test_m1_pmf_k0_is_no_spread():
    nu = 0.8
    assert an.m1_pmf(nu, 1.0, 0) == pytest.approx(math.exp(-nu - 1.0), abs=1e-15)


def test_m1_masses_sum_to_one_with_infinite_atom():
    for nu in (0.0, 0.3, 2.0):
        total = sum(an.m1_pmf(nu, 1.0, k) for k in range(2000))
        total += an.m1_infinite_mass(nu, 1.0)
        assert abs(total - 1.0) <= 1e-10


def test_m1_mass_escapes_for_large_nu():
    # the infinite atom swallows everything as the start time grows
    assert an.m1_infinite_mass(40.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert an.m1_pmf(40.0, 1.0, 3) < 1e-15


def test_marginal_m1_against_polynomial_oracle():
    for k in (0, 1, 2, 5, 10, 15):
        mine = an.marginal_m1_pmf(1.0, k, 1e-12)
        exact = oracles.marginal_m1_polynomial(1.0, k)
        assert mine == pytest.approx(exact, abs=1e-11)


def test_marginal_m1_plus_infinite_is_one():
    s = sum(an.marginal_m1_pmf(1.0, k) for k in range(400))
    assert s + an.p_kappa1_quadrature(1.0, 1e-10) == pytest.approx(1.0, abs=1e-7)


# -- continuation products ----------------------------------------------------

def test_continuation_zero_for_subcritical():
    assert an.continuation_product(1.0, 10, d.deterministic_c_over_x(1.0)) == 0.0
    assert an.continuation_product(1.0, 10, d.deterministic_c_over_x(0.5)) == 0.0
    assert an.continuation_product(1.0, 0, d.homogeneous(d.zero())) == 0.0


def test_continuation_positive_supercritical():
    q = an.continuation_product(1.0, 10, d.deterministic_c_over_x(2.0))
    assert q > 0.0
    # frozen from the mpmath partial-product oracle with tail correction
    assert q == pytest.approx(0.0292479, abs=2e-5)


def test_continuation_constant_matches_geometric_product():
    spec = d.homogeneous(d.constant(1.0))
    assert an.continuation_product(0.0, 5, spec) == pytest.approx(
        oracles.product_one_minus_exp(0.0, 1.0), abs=1e-6)


def test_continuation_monotone_in_t_and_c():
    qs_t = [an.continuation_product(t, 10, d.deterministic_c_over_x(2.0))
            for t in (0.25, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(qs_t, qs_t[1:]))
    qs_c = [an.continuation_product(1.0, 10, d.deterministic_c_over_x(c))
            for c in (1.3, 1.7, 2.5)]
    assert all(a < b for a, b in zip(qs_c, qs_c[1:]))


def test_continuation_unsupported_spec():
    with pytest.raises(an.UnsupportedSpec):
        an.continuation_product(1.0, 3, d.homogeneous(d.exponential(1.0)))
    with pytest.raises(an.UnsupportedSpec):
        an.continuation_product(1.0, 3, d.bounded_c_over_x(2.0))


# -- frontier classification ---------------------------------------------------

def test_classifier_bernoulli_parameter_matches_product():
    # frequency of "infinite" across keyed uniforms approximates q
    t, a = 0.5, 1.0
    q = an.frontier_q(t, a)
    rng = np.random.default_rng(2025)
    hits = 0
    n = 40_000
    for _ in range(n):
        it = iter(rng.random(64))
        if an.classify_frontier(t, a, lambda: next(it)) is None:
            hits += 1
    se = math.sqrt(q * (1 - q) / n)
    assert abs(hits / n - q) < 4 * se


def test_classifier_certain_for_large_t():
    rng = np.random.default_rng(7)
    for _ in range(200):
        it = iter(rng.random(8))
        assert an.classify_frontier(50.0, 1.0, lambda: next(it)) is None


def test_stop_offset_law_matches_rejection_oracle():
    t, a = 0.2, 1.0
    rng = np.random.default_rng(99)
    mine = []
    while len(mine) < 20_000:
        it = iter(rng.random(256))
        res = an.classify_frontier(t, a, lambda: next(it))
        if res is not None:
            mine.append(res)
    ora = oracles.frontier_stop_rejection(t, a, 20_000, np.random.default_rng(1234))
    top = 8
    mine_counts = [sum(1 for v in mine if v == j) for j in range(top)]
    mine_counts.append(sum(1 for v in mine if v >= top))
    ora_counts = [sum(1 for v in ora if v == j) for j in range(top)]
    ora_counts.append(sum(1 for v in ora if v >= top))
    _, p = chi_square_two_sample(mine_counts, ora_counts)
    assert p > 0.01


def test_stop_pmf_normalizes():
    t, a = 0.3, 0.8
    total = sum(an.frontier_stop_pmf(t, a, j) for j in range(1, 400))
    assert total == pytest.approx(1.0, abs=1e-9)


# -- run post-processing --------------------------------------------------------

def test_burn_ratio_stats_excludes_low_sites():
    maps = [{1: 0.5, 10: 2.0}, {10: 2.5}]
    rows = an.burn_ratio_stats(maps, [1, 10])
    assert [r["site"] for r in rows] == [10]
    assert rows[0]["observed"] == 2
    assert rows[0]["median"] == pytest.approx(2.25 / math.log(10))
