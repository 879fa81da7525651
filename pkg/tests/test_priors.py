"""Tests for the prior families: densities, CDFs, moments, sampling, schedules."""

import math
import warnings

import numpy as np
import pytest
import scipy.integrate
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinklab.priors import (
    GDP,
    DEFAULT_SHAPES,
    GaussianOracle,
    HorseshoeLike,
    Laplace,
    ScheduleSpec,
    StudentT,
    cdf,
    interval_probability,
    log_density,
    prior_from_json,
    prior_to_json,
    sample_prior,
    schedule_from_json,
    schedule_hyper,
    schedule_to_json,
    scheduled_prior,
    second_moment,
)

ALL_PRIORS = [
    Laplace(s=1.0),
    Laplace(s=0.1),
    StudentT(s=1.0, d0=3.0),
    StudentT(s=0.5, d0=5.0),
    GDP(alpha=3.0, eta=1.0),
    GDP(alpha=5.0, eta=0.3),
    HorseshoeLike(a0=1.0, b0=2.0, xi=1.0),
    HorseshoeLike(a0=0.6, b0=1.2, xi=0.5),
    GaussianOracle(v=1.0),
    GaussianOracle(v=0.04),
]


# ---------------------------------------------------------------- log_density


def test_log_density_laplace_at_zero():
    assert math.isclose(log_density(Laplace(s=1.0), 0.0), math.log(0.5), rel_tol=1e-12)


def test_log_density_student_t_matches_reference():
    prior = StudentT(s=1.0, d0=3.0)
    assert math.isclose(
        log_density(prior, 0.0), float(scipy.stats.t.logpdf(0.0, 3.0)), rel_tol=1e-12
    )
    prior2 = StudentT(s=0.7, d0=4.5)
    for x in (-2.3, 0.4, 5.0):
        ref = float(scipy.stats.t.logpdf(x / 0.7, 4.5)) - math.log(0.7)
        assert math.isclose(log_density(prior2, x), ref, rel_tol=1e-12)


def test_log_density_gdp_at_zero():
    assert math.isclose(
        log_density(GDP(alpha=3.0, eta=2.0), 0.0), math.log(0.75), rel_tol=1e-12
    )


def test_log_density_horseshoe_at_zero_closed_form():
    # at a0=1, b0=1, xi=2 the marginal at zero reduces to sqrt(pi)/4
    prior = HorseshoeLike(a0=1.0, b0=1.0, xi=2.0)
    assert math.isclose(
        log_density(prior, 0.0), math.log(math.sqrt(math.pi) / 4.0), rel_tol=1e-7
    )


def test_log_density_horseshoe_diverges_at_zero_for_small_a0():
    # a0 <= 1/2 makes the marginal unbounded at the origin
    with pytest.raises(ValueError):
        log_density(HorseshoeLike(a0=0.5, b0=2.0, xi=1.0), 0.0)


def test_log_density_gaussian():
    prior = GaussianOracle(v=0.25)
    for x in (-1.0, 0.0, 2.0):
        assert math.isclose(
            log_density(prior, x),
            float(scipy.stats.norm.logpdf(x, scale=0.5)),
            rel_tol=1e-12,
        )


def test_log_density_horseshoe_large_beta_uses_asymptotic_branch():
    # far in the tail the U argument exceeds the branch switch; just confirm a
    # finite, decreasing log-density out to extreme beta
    prior = HorseshoeLike(a0=1.0, b0=2.0, xi=1.0)
    vals = [log_density(prior, b) for b in (1e2, 1e4, 1e8, 1e9)]
    assert all(math.isfinite(v) for v in vals)
    assert vals == sorted(vals, reverse=True)


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda p: repr(p))
def test_density_integrates_to_one(prior):
    def f(x):
        return math.exp(log_density(prior, x))

    # symmetric about 0, so integrate the positive half
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
        half, _ = scipy.integrate.quad(f, 0.0, np.inf, limit=300)
    assert math.isclose(2.0 * half, 1.0, abs_tol=1e-6)


# ------------------------------------------------------------------------ cdf


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda p: repr(p))
def test_cdf_half_at_zero(prior):
    assert math.isclose(cdf(prior, 0.0), 0.5, abs_tol=1e-12)


def test_cdf_laplace_closed_form():
    assert math.isclose(cdf(Laplace(s=1.0), 1.0), 1.0 - 0.5 * math.exp(-1.0), rel_tol=1e-12)


def test_cdf_gdp_closed_form():
    assert math.isclose(cdf(GDP(alpha=3.0, eta=1.0), 1.0), 0.9375, rel_tol=1e-12)


def test_cdf_student_t_matches_reference():
    prior = StudentT(s=0.7, d0=3.0)
    for x in (-3.0, -0.2, 0.9, 4.0):
        assert math.isclose(
            cdf(prior, x), float(scipy.stats.t.cdf(x / 0.7, 3.0)), rel_tol=1e-10
        )


def test_cdf_horseshoe_matches_density_integral():
    prior = HorseshoeLike(a0=1.0, b0=2.0, xi=1.0)
    for x in (0.3, 1.5):
        direct, _ = scipy.integrate.quad(
            lambda t: math.exp(log_density(prior, t)), 0.0, x, limit=200
        )
        assert math.isclose(cdf(prior, x), 0.5 + direct, abs_tol=1e-7)


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda p: repr(p))
def test_cdf_monotone_and_symmetric(prior):
    grid = [-5.0, -2.0, -1.0, -0.3, -0.05, 0.0, 0.05, 0.3, 1.0, 2.0, 5.0]
    vals = [cdf(prior, x) for x in grid]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    for x in (0.2, 1.0, 3.0):
        assert math.isclose(cdf(prior, -x), 1.0 - cdf(prior, x), abs_tol=1e-8)


@given(
    s=st.floats(0.05, 10.0),
    x=st.floats(-20.0, 20.0),
)
@settings(max_examples=60, deadline=None)
def test_cdf_laplace_properties(s, x):
    prior = Laplace(s=s)
    v = cdf(prior, x)
    assert 0.0 <= v <= 1.0
    assert math.isclose(cdf(prior, -x), 1.0 - v, abs_tol=1e-12)


# ----------------------------------------------------------- interval mass


def test_interval_probability_laplace_example():
    got = interval_probability(Laplace(s=0.1), center=0.5, radius=1.0)
    want = (1.0 - 0.5 * math.exp(-1.5 / 0.1)) - 0.5 * math.exp(-0.5 / 0.1)
    assert math.isclose(got, want, rel_tol=1e-12)
    assert math.isclose(got, 0.9966310, abs_tol=5e-7)


def test_interval_probability_gdp_example():
    got = interval_probability(GDP(alpha=3.0, eta=1.0), center=0.0, radius=1.0)
    assert math.isclose(got, 0.875, rel_tol=1e-12)


@pytest.mark.parametrize(
    "prior",
    [Laplace(s=1.0), StudentT(s=1.0, d0=3.0), GDP(alpha=3.0, eta=1.0), GaussianOracle(v=1.0)],
    ids=lambda p: repr(p),
)
def test_interval_probability_total_mass(prior):
    assert interval_probability(prior, center=0.0, radius=1e6) >= 1.0 - 1e-6


def test_interval_probability_rejects_bad_radius():
    with pytest.raises(ValueError):
        interval_probability(Laplace(s=1.0), center=0.0, radius=0.0)
    with pytest.raises(ValueError):
        interval_probability(Laplace(s=1.0), center=0.0, radius=-1.0)


# --------------------------------------------------------------- second moment


def test_second_moment_closed_forms():
    assert second_moment(Laplace(s=1.0)) == 2.0
    assert math.isclose(second_moment(StudentT(s=2.0, d0=3.0)), 12.0, rel_tol=1e-12)
    assert math.isclose(second_moment(GDP(alpha=3.0, eta=1.0)), 1.0, rel_tol=1e-12)
    assert math.isclose(
        second_moment(HorseshoeLike(a0=1.0, b0=2.0, xi=1.0)), 1.0, rel_tol=1e-12
    )
    assert second_moment(GaussianOracle(v=0.3)) == 0.3


def test_second_moment_horseshoe_gamma_ratio():
    # general (a0, b0) against the lgamma-free ratio a0/(b0-1)
    prior = HorseshoeLike(a0=2.5, b0=3.5, xi=0.7)
    assert math.isclose(second_moment(prior), 0.7 * 2.5 / 2.5, rel_tol=1e-12)


def test_second_moment_infinite_regions_raise():
    with pytest.raises(ValueError):
        second_moment(StudentT(s=1.0, d0=2.0))
    with pytest.raises(ValueError):
        second_moment(GDP(alpha=2.0, eta=1.0))
    with pytest.raises(ValueError):
        second_moment(HorseshoeLike(a0=0.5, b0=1.0, xi=1.0))


@pytest.mark.parametrize(
    "prior",
    [
        Laplace(s=0.8),
        StudentT(s=1.2, d0=4.0),
        GDP(alpha=3.5, eta=0.9),
        HorseshoeLike(a0=1.5, b0=2.5, xi=0.6),
        GaussianOracle(v=1.7),
    ],
    ids=lambda p: repr(p),
)
def test_second_moment_matches_numeric_integral(prior):
    val, _ = scipy.integrate.quad(
        lambda x: x * x * math.exp(log_density(prior, x)), 0.0, np.inf, limit=300
    )
    assert math.isclose(2.0 * val, second_moment(prior), rel_tol=1e-5)


# -------------------------------------------------------------------- sampling


def test_sample_prior_deterministic_given_seed():
    prior = GDP(alpha=3.0, eta=1.0)
    a = sample_prior(prior, 1000, seed=42)
    b = sample_prior(prior, 1000, seed=42)
    assert np.array_equal(a, b)
    c = sample_prior(prior, 1000, seed=43)
    assert not np.array_equal(a, c)


def test_sample_prior_laplace_second_moment():
    draws = sample_prior(Laplace(s=1.0), 1_000_000, seed=7)
    assert abs(float(np.mean(draws**2)) - 2.0) < 0.04  # within 2%


def test_sample_prior_horseshoe_second_moment():
    draws = sample_prior(HorseshoeLike(a0=1.0, b0=2.0, xi=1.0), 1_000_000, seed=11)
    assert abs(float(np.mean(draws**2)) - 1.0) < 0.05  # within 5%, heavy tails


def test_sample_prior_gdp_ecdf_at_one():
    draws = sample_prior(GDP(alpha=3.0, eta=1.0), 1_000_000, seed=3)
    ecdf = float(np.mean(draws <= 1.0))
    assert abs(ecdf - 0.9375) < 0.002


@pytest.mark.parametrize(
    "prior",
    [
        Laplace(s=1.3),
        StudentT(s=1.0, d0=5.0),
        GDP(alpha=5.0, eta=1.0),
        HorseshoeLike(a0=1.0, b0=3.0, xi=1.0),
        GaussianOracle(v=0.5),
    ],
    ids=lambda p: repr(p),
)
def test_sample_second_moment_within_three_se(prior):
    # families here all have finite fourth moments, so the sample second
    # moment is asymptotically normal with estimable standard error
    draws = sample_prior(prior, 1_000_000, seed=19)
    sq = draws**2
    se = float(np.std(sq)) / math.sqrt(len(sq))
    assert abs(float(np.mean(sq)) - second_moment(prior)) <= 3.0 * se


def test_sample_prior_horseshoe_matches_marginal_cdf():
    # hierarchy draws against the quadrature CDF of the closed-form marginal
    prior = HorseshoeLike(a0=1.0, b0=2.0, xi=1.0)
    draws = sample_prior(prior, 1_000_000, seed=23)
    grid = np.quantile(draws, np.linspace(0.05, 0.95, 19))
    for x in grid:
        emp = float(np.mean(draws <= x))
        assert abs(emp - cdf(prior, float(x))) <= 0.005


def test_sample_prior_rejects_bad_m():
    with pytest.raises(ValueError):
        sample_prior(Laplace(s=1.0), 0, seed=0)


# ------------------------------------------------------------------- schedules


def test_schedule_hyper_examples():
    lap = ScheduleSpec(family="laplace", C=1.0, rho=1.0)
    want = 1.0 / (math.sqrt(10.0) * 10.0 * math.log(100.0))
    assert math.isclose(schedule_hyper(lap, 100, 10), want, rel_tol=1e-12)
    assert math.isclose(schedule_hyper(lap, 100, 10), 0.0068675, abs_tol=1e-6)

    hs = ScheduleSpec(family="horseshoe_like", C=1.0, rho=1.0)
    want_hs = 1.0 / (10.0 * 100.0 * math.log(100.0))
    assert math.isclose(schedule_hyper(hs, 100, 10), want_hs, rel_tol=1e-12)
    assert math.isclose(schedule_hyper(hs, 100, 10), 2.1715e-4, abs_tol=5e-9)


def test_schedule_hyper_linear_in_C():
    for family in ("laplace", "student_t", "gdp", "horseshoe_like"):
        one = schedule_hyper(ScheduleSpec(family=family, C=1.0, rho=1.0), 50, 7)
        two = schedule_hyper(ScheduleSpec(family=family, C=2.0, rho=1.0), 50, 7)
        assert math.isclose(two, 2.0 * one, rel_tol=1e-12)


def test_schedule_hyper_decreasing_in_n_and_p():
    for family in ("laplace", "horseshoe_like", "gaussian_oracle"):
        spec = ScheduleSpec(family=family, C=1.0, rho=1.0)
        by_n = [schedule_hyper(spec, n, 10) for n in (10, 100, 1000, 10000)]
        assert all(b < a for a, b in zip(by_n, by_n[1:]))
        by_p = [schedule_hyper(spec, 100, p) for p in (1, 5, 20, 100)]
        assert all(b < a for a, b in zip(by_p, by_p[1:]))


def test_schedule_hyper_gaussian_is_squared_common_scale():
    common = schedule_hyper(ScheduleSpec(family="laplace", C=1.0, rho=1.0), 100, 10)
    g = schedule_hyper(ScheduleSpec(family="gaussian_oracle", C=1.0, rho=1.0), 100, 10)
    assert math.isclose(g, common * common, rel_tol=1e-12)


def test_schedule_hyper_rejects_small_n():
    with pytest.raises(ValueError):
        schedule_hyper(ScheduleSpec(family="laplace", C=1.0, rho=1.0), 1, 10)


def test_scheduled_prior_builds_each_family():
    n, p = 100, 10
    for family, cls in [
        ("laplace", Laplace),
        ("student_t", StudentT),
        ("gdp", GDP),
        ("horseshoe_like", HorseshoeLike),
        ("gaussian_oracle", GaussianOracle),
    ]:
        spec = ScheduleSpec(family=family, C=1.0, rho=1.0)
        prior = scheduled_prior(spec, n, p)
        assert isinstance(prior, cls)
    t = scheduled_prior(ScheduleSpec(family="student_t", C=1.0, rho=1.0), n, p)
    assert t.d0 == DEFAULT_SHAPES["d0"]
    g = scheduled_prior(ScheduleSpec(family="gdp", C=1.0, rho=1.0), n, p)
    assert math.isclose(
        g.eta, schedule_hyper(ScheduleSpec(family="gdp", C=1.0, rho=1.0), n, p)
    )


def test_scheduled_prior_rejects_infinite_moment_shapes():
    spec = ScheduleSpec(family="student_t", C=1.0, rho=1.0)
    with pytest.raises(ValueError):
        scheduled_prior(spec, 100, 10, shapes={"d0": 2.0})
    hs = ScheduleSpec(family="horseshoe_like", C=1.0, rho=1.0)
    with pytest.raises(ValueError):
        scheduled_prior(hs, 100, 10, shapes={"b0": 1.0})


# ------------------------------------------------------------------ validation


def test_construction_rejects_nonpositive_parameters():
    with pytest.raises(ValueError):
        Laplace(s=0.0)
    with pytest.raises(ValueError):
        StudentT(s=1.0, d0=-3.0)
    with pytest.raises(ValueError):
        GDP(alpha=3.0, eta=0.0)
    with pytest.raises(ValueError):
        HorseshoeLike(a0=0.0, b0=1.0, xi=1.0)
    with pytest.raises(ValueError):
        GaussianOracle(v=-1.0)
    with pytest.raises(ValueError):
        Laplace(s=math.inf)
    with pytest.raises(ValueError):
        ScheduleSpec(family="laplace", C=1.0, rho=0.0)
    with pytest.raises(ValueError):
        ScheduleSpec(family="nope", C=1.0, rho=1.0)


def test_prior_specs_are_immutable():
    prior = Laplace(s=1.0)
    with pytest.raises(Exception):
        prior.s = 2.0


# ----------------------------------------------------------------------- serde


@pytest.mark.parametrize("prior", ALL_PRIORS, ids=lambda p: repr(p))
def test_prior_json_round_trip(prior):
    obj = prior_to_json(prior)
    assert obj["family"] == prior.family
    assert prior_from_json(obj) == prior


def test_prior_from_json_errors():
    with pytest.raises(ValueError):
        prior_from_json({"s": 1.0})
    with pytest.raises(ValueError):
        prior_from_json({"family": "cauchy", "s": 1.0})
    with pytest.raises(ValueError):
        prior_from_json({"family": "laplace", "scale": 1.0})


def test_schedule_json_round_trip():
    spec = ScheduleSpec(family="gdp", C=2.0, rho=0.5)
    assert schedule_from_json(schedule_to_json(spec)) == spec
    with pytest.raises(ValueError):
        schedule_from_json({"family": "gdp", "C": 1.0})
