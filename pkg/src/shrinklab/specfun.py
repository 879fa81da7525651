"""Special functions and probability tail bounds.

Log-gamma / log-beta wrappers, the regularized incomplete beta, the confluent
hypergeometric function of the second kind U(a, b, z) with an integral branch
for small z and an asymptotic-series branch for large z, and two chi-square
tail bounds (the two-term concentration inequality and its exp(-x/4)
simplification valid for x >= 8p).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import IntegrationWarning, quad
from scipy.special import betainc

Z_SWITCH_DEFAULT = 50.0
ASYMPTOTIC_MAX_TERMS = 60
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def log_gamma(x: float) -> float:
    """Natural log of the gamma function, x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    """log B(a, b) = log_gamma(a) + log_gamma(b) - log_gamma(a + b)."""
    if a <= 0 or b <= 0:
        raise ValueError(f"log_beta requires a, b > 0, got a={a}, b={b}")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) for x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"reg_inc_beta requires a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"reg_inc_beta requires x in [0, 1], got {x}")
    return float(betainc(a, b, x))


@dataclass(frozen=True)
class UEvalResult:
    """One evaluation of U(a, b, z).

    method is "integral" (adaptive quadrature) or "asymptotic" (truncated
    large-z series); R is the number of series terms kept, None for the
    integral branch; est_rel_error is the quadrature error estimate divided
    by the value, or the magnitude of the first omitted series term relative
    to the partial sum.
    """

    value: float
    method: str
    est_rel_error: float
    R: int | None = None


def _u_quadrature(a: float, b: float, z: float) -> UEvalResult:
    # U(a,b,z) = (1/Gamma(a)) \int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt,
    # mapped to [0,1) by t = u/(1-u), which gives the integrand
    # e^{-zu/(1-u)} u^{a-1} (1-u)^{-b} / Gamma(a). The endpoint
    # singularities are integrable (a > 0; at u = 1 either b < 1 or z > 0).
    lg = math.lgamma(a)

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0 if a != 1.0 else math.exp(-lg)
        if u >= 1.0:
            return 0.0
        return math.exp(
            -z * u / (1.0 - u) + (a - 1.0) * math.log(u) - b * math.log1p(-u) - lg
        )

    with warnings.catch_warnings():
        # the achieved-error check below is the real convergence gate; the
        # library's warning fires even when the estimate is acceptable
        warnings.simplefilter("ignore", IntegrationWarning)
        value, abserr = quad(
            integrand, 0.0, 1.0, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
        )
    if not math.isfinite(value) or value <= 0.0:
        raise QuadratureError(f"U({a}, {b}, {z}) quadrature returned {value}")
    rel = abserr / abs(value)
    # the achieved-error estimate is conservative; anything above this is a
    # genuine convergence failure, not estimator pessimism
    if rel > 1e-4:
        raise QuadratureError(
            f"U({a}, {b}, {z}) quadrature did not converge (est rel error {rel:.2e})"
        )
    return UEvalResult(value=value, method="integral", est_rel_error=rel)


def _u_asymptotic(a: float, b: float, z: float) -> UEvalResult:
    # U(a,b,z) = z^{-a} { sum_{m=0}^{R-1} (a)_m (1+a-b)_m (-z)^{-m} / m! + O(|z|^{-R}) },
    # truncated at the smallest term (the series is asymptotic, not convergent).
    term = 1.0
    total = 1.0
    kept = 1
    first_omitted = 0.0
    for m in range(ASYMPTOTIC_MAX_TERMS):
        nxt = term * (a + m) * (1.0 + a - b + m) / (-(m + 1) * z)
        if nxt == 0.0:
            break  # series terminates exactly (1+a-b a non-positive integer)
        if abs(nxt) >= abs(term):
            first_omitted = abs(nxt)
            break
        term = nxt
        total += term
        kept += 1
        if abs(term) < 1e-18:
            break
    else:
        first_omitted = abs(term * (a + ASYMPTOTIC_MAX_TERMS) / z)
    if total <= 0.0 or first_omitted >= 0.5 * abs(total):
        raise ArithmeticError(
            f"asymptotic series for U({a}, {b}, {z}) is unusable at this z "
            f"(partial sum {total:.3g}, first omitted term {first_omitted:.3g})"
        )
    value = math.exp(-a * math.log(z)) * total
    return UEvalResult(
        value=value, method="asymptotic", est_rel_error=first_omitted / abs(total), R=kept
    )


def confluent_u(a: float, b: float, z: float, z_switch: float = Z_SWITCH_DEFAULT) -> UEvalResult:
    """U(a, b, z) for a > 0 and z >= 0.

    z <= z_switch uses adaptive quadrature on the integral representation
    (which requires a > 0); z > z_switch uses the large-z asymptotic series
    truncated by the smallest-term rule. z = 0 is admitted only for b < 1,
    where the integral converges to the finite limit Gamma(1-b)/Gamma(a-b+1).
    """
    if a <= 0:
        raise ValueError(f"confluent_u requires a > 0, got a={a}")
    if z < 0:
        raise ValueError(f"confluent_u requires z >= 0, got z={z}")
    if z == 0 and b >= 1:
        raise ValueError(f"U(a, b, 0) diverges for b >= 1, got b={b}")
    if z > z_switch:
        return _u_asymptotic(a, b, z)
    return _u_quadrature(a, b, z)


def chi2_tail_bound(p: int, x: float) -> float:
    """Simplified chi-square tail bound: pr(chi2_p >= x) <= exp(-x/4) for x >= 8p."""
    if p < 1:
        raise ValueError(f"chi2_tail_bound requires p >= 1, got {p}")
    if x < 8 * p:
        raise ValueError(f"chi2_tail_bound requires x >= 8p = {8 * p}, got x={x}")
    return math.exp(-x / 4.0)


def laurent_massart_bound(p: int, x_lm: float) -> tuple[float, float]:
    """Two-term chi-square bound: pr(chi2_p >= t) <= exp(-x_lm).

    Returns (t, bound) with t = p + 2 sqrt(p x_lm) + 2 x_lm.
    """
    if p < 1:
        raise ValueError(f"laurent_massart_bound requires p >= 1, got {p}")
    if x_lm < 0:
        raise ValueError(f"laurent_massart_bound requires x_lm >= 0, got {x_lm}")
    threshold = p + 2.0 * math.sqrt(p * x_lm) + 2.0 * x_lm
    return threshold, math.exp(-x_lm)
