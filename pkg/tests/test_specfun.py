"""Tests for special functions and chi-square tail bounds."""

import math

import mpmath
import pytest
import scipy.stats

from shrinklab.specfun import (
    UEvalResult,
    chi2_tail_bound,
    confluent_u,
    laurent_massart_bound,
    log_beta,
    log_gamma,
    reg_inc_beta,
)

# U(1, 1, 1) = e * E_1(1), frozen from an independent high-precision evaluation.
U_1_1_1 = 0.5963473623231942


def test_log_gamma_known_values():
    assert math.isclose(log_gamma(0.5), math.log(math.sqrt(math.pi)), rel_tol=1e-14)
    assert math.isclose(log_gamma(1.0), 0.0, abs_tol=1e-15)
    assert math.isclose(log_gamma(5.0), math.log(24.0), rel_tol=1e-14)


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_gamma(0.0)
    with pytest.raises(ValueError):
        log_gamma(-1.5)


def test_log_beta_known_value():
    # B(2, 3) = 1/12
    assert math.isclose(log_beta(2.0, 3.0), math.log(1.0 / 12.0), rel_tol=1e-14)
    # symmetry
    assert log_beta(0.5, 1.5) == log_beta(1.5, 0.5)


def test_reg_inc_beta_endpoints_and_symmetry():
    assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
    assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0
    # I_x(a, b) = 1 - I_{1-x}(b, a)
    x = 0.37
    assert math.isclose(
        reg_inc_beta(2.0, 3.0, x), 1.0 - reg_inc_beta(3.0, 2.0, 1.0 - x), rel_tol=1e-12
    )
    # I_x(1, 1) = x
    assert math.isclose(reg_inc_beta(1.0, 1.0, 0.25), 0.25, rel_tol=1e-14)


def test_reg_inc_beta_domain():
    with pytest.raises(ValueError):
        reg_inc_beta(2.0, 3.0, 1.5)
    with pytest.raises(ValueError):
        reg_inc_beta(-1.0, 3.0, 0.5)


def test_confluent_u_frozen_value():
    res = confluent_u(1.0, 1.0, 1.0)
    assert res.method == "integral"
    assert math.isclose(res.value, U_1_1_1, rel_tol=1e-9)


@pytest.mark.parametrize("a", [0.5, 1.0, 1.7, 3.5])
@pytest.mark.parametrize("b", [-0.5, 0.3, 0.9, 1.5])
@pytest.mark.parametrize("z", [0.05, 0.8, 3.0, 20.0, 49.9])
def test_confluent_u_integral_branch_matches_reference(a, b, z):
    res = confluent_u(a, b, z)
    assert res.method == "integral"
    assert res.R is None
    ref = float(mpmath.hyperu(a, b, z))
    assert math.isclose(res.value, ref, rel_tol=1e-7)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("b", [-0.5, 0.5, 1.2])
@pytest.mark.parametrize("z", [60.0, 150.0, 1000.0])
def test_confluent_u_asymptotic_branch_matches_reference(a, b, z):
    res = confluent_u(a, b, z)
    assert res.method == "asymptotic"
    assert res.R is not None and res.R >= 1
    ref = float(mpmath.hyperu(a, b, z))
    assert math.isclose(res.value, ref, rel_tol=1e-8)


@pytest.mark.parametrize(
    "a,b",
    [(b0 + 0.5, 1.5 - a0) for a0 in (0.6, 1.0, 2.0) for b0 in (1.2, 2.0, 3.0)],
)
def test_confluent_u_branches_agree_at_switch(a, b):
    # The same z evaluated on both branches must agree within the sum of the
    # two reported error estimates (the asymptotic truncation error is bounded
    # by the first omitted term for this alternating-tail series).
    z = 50.0
    quad_res = confluent_u(a, b, z)
    asym_res = confluent_u(a, b, z, z_switch=49.0)
    assert quad_res.method == "integral"
    assert asym_res.method == "asymptotic"
    tol = (quad_res.est_rel_error + asym_res.est_rel_error) * abs(quad_res.value)
    assert abs(quad_res.value - asym_res.value) <= tol + 1e-15


def test_confluent_u_zero_z_integrable_case():
    # U(a, b, 0) = Gamma(1-b) / Gamma(a-b+1) for b < 1.
    a, b = 1.5, 0.5
    res = confluent_u(a, b, 0.0)
    ref = math.gamma(1.0 - b) / math.gamma(a - b + 1.0)
    assert math.isclose(res.value, ref, rel_tol=1e-8)


def test_confluent_u_zero_z_divergent_case():
    with pytest.raises(ValueError):
        confluent_u(1.5, 1.0, 0.0)


def test_confluent_u_domain():
    with pytest.raises(ValueError):
        confluent_u(-1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        confluent_u(1.0, 0.5, -1.0)


def test_confluent_u_asymptotic_guard_on_unusable_z():
    # Forcing the asymptotic branch at tiny z makes the truncation error as
    # large as the value itself for parameters with large a(1+a-b); that must
    # raise, not return garbage.
    with pytest.raises(ArithmeticError):
        confluent_u(8.0, -6.0, 0.5, z_switch=0.1)


def test_uevalresult_is_frozen():
    res = UEvalResult(value=1.0, method="integral", est_rel_error=0.0)
    with pytest.raises(Exception):
        res.value = 2.0


def test_chi2_tail_bound_dominates_exact_tail():
    for p in (1, 2, 5, 20):
        for x in (8 * p, 10 * p, 16 * p, 40 * p):
            bound = chi2_tail_bound(p, float(x))
            exact = float(scipy.stats.chi2.sf(x, df=p))
            assert exact <= bound


def test_chi2_tail_bound_precondition():
    with pytest.raises(ValueError):
        chi2_tail_bound(5, 39.0)
    with pytest.raises(ValueError):
        chi2_tail_bound(0, 10.0)


def test_laurent_massart_bound_dominates_exact_tail():
    for p in (1, 3, 10, 50):
        for x_lm in (0.0, 0.5, 2.0, 10.0):
            threshold, bound = laurent_massart_bound(p, x_lm)
            exact = float(scipy.stats.chi2.sf(threshold, df=p))
            assert exact <= bound + 1e-15
            assert threshold == p + 2.0 * math.sqrt(p * x_lm) + 2.0 * x_lm


def test_laurent_massart_bound_domain():
    with pytest.raises(ValueError):
        laurent_massart_bound(3, -0.1)
    with pytest.raises(ValueError):
        laurent_massart_bound(0, 1.0)


def test_bounds_vacuous_beyond_one_never():
    # Both tail bounds are probabilities' upper bounds; they must lie in (0, 1]
    # wherever their preconditions hold.
    assert 0.0 < chi2_tail_bound(2, 16.0) <= 1.0
    _, b = laurent_massart_bound(4, 0.0)
    assert b == 1.0
