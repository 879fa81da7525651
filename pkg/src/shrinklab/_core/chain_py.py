"""Pure NumPy random-walk Metropolis chain, the fallback kernel.

Same argument list and chain logic as the compiled kernel so the backend
choice is transparent to callers. Randomness comes in as pre-generated
arrays; the chain itself is deterministic.
"""

from __future__ import annotations

import math

import numpy as np

FAMILY_GAUSSIAN = 0
FAMILY_LAPLACE = 1
FAMILY_STUDENT_T = 2
FAMILY_GDP = 3
FAMILY_HORSESHOE = 4

ASYMPTOTIC_MAX_TERMS = 60


def _log_u_asymptotic(a: float, b: float, z: float) -> float:
    # truncated large-z series for U(a, b, z), smallest-term rule; positivity
    # of the partial sum is guaranteed by the caller's z_eff threshold
    term = 1.0
    total = 1.0
    for m in range(ASYMPTOTIC_MAX_TERMS):
        nxt = term * (a + m) * (1.0 + a - b + m) / (-(m + 1) * z)
        if nxt == 0.0 or abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        if abs(term) < 1e-18:
            break
    return -a * math.log(z) + math.log(total)


def _spline_eval(w: np.ndarray, knots: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(knots, w, side="right") - 1, 0, len(knots) - 2)
    dx = w - knots[idx]
    return ((coeffs[0, idx] * dx + coeffs[1, idx]) * dx + coeffs[2, idx]) * dx + coeffs[
        3, idx
    ]


def _log_prior_sum(
    beta: np.ndarray,
    family: int,
    const_term: float,
    p1: float,
    p2: float,
    p3: float,
    hs_knots: np.ndarray,
    hs_coeffs: np.ndarray,
    z_eff: float,
    w_min: float,
) -> float:
    p = beta.shape[0]
    if family == FAMILY_GAUSSIAN:
        return p * const_term - float(np.dot(beta, beta)) / (2.0 * p1)
    if family == FAMILY_LAPLACE:
        return p * const_term - float(np.sum(np.abs(beta))) / p1
    if family == FAMILY_STUDENT_T:
        s, d0 = p1, p2
        return p * const_term - 0.5 * (d0 + 1.0) * float(
            np.sum(np.log1p(beta * beta / (d0 * s * s)))
        )
    if family == FAMILY_GDP:
        alpha, eta = p1, p2
        return p * const_term - (alpha + 1.0) * float(np.sum(np.log1p(np.abs(beta) / eta)))
    if family == FAMILY_HORSESHOE:
        xi, a, b = p1, p2, p3
        z = beta * beta / (2.0 * xi)
        total = p * const_term
        small = z <= z_eff
        if np.any(small):
            w = np.maximum(np.sqrt(z[small]), w_min)
            total += float(np.sum(_spline_eval(w, hs_knots, hs_coeffs)))
        for zi in z[~small]:
            total += _log_u_asymptotic(a, b, float(zi))
        return total
    raise ValueError(f"unknown family id {family}")


def run_chain(
    XtX: np.ndarray,
    Xty: np.ndarray,
    yty: float,
    sigma2: float,
    family: int,
    const_term: float,
    p1: float,
    p2: float,
    p3: float,
    beta_init: np.ndarray,
    iterations: int,
    burn_in: int,
    proposal_scale_init: float,
    adapt: bool,
    normals: np.ndarray,
    uniforms: np.ndarray,
    hs_knots: np.ndarray,
    hs_coeffs: np.ndarray,
    z_eff: float,
    w_min: float,
) -> tuple[np.ndarray, int, float]:
    """Adaptive random-walk Metropolis; returns (draws, accepted, final_scale)."""

    def log_post(beta: np.ndarray) -> float:
        rss = yty - 2.0 * float(np.dot(beta, Xty)) + float(beta @ XtX @ beta)
        return -rss / (2.0 * sigma2) + _log_prior_sum(
            beta, family, const_term, p1, p2, p3, hs_knots, hs_coeffs, z_eff, w_min
        )

    p = beta_init.shape[0]
    beta = beta_init.astype(float).copy()
    lp = log_post(beta)
    log_scale = math.log(proposal_scale_init)
    kept = iterations - burn_in
    draws = np.empty((kept, p))
    accepted = 0

    for t in range(iterations):
        prop = beta + math.exp(log_scale) * normals[t]
        lp_prop = log_post(prop)
        u = uniforms[t]
        accept = u <= 0.0 or math.log(u) < lp_prop - lp
        if accept:
            beta = prop
            lp = lp_prop
            accepted += 1
        if adapt and t < burn_in:
            log_scale += (t + 1) ** (-0.6) * ((1.0 if accept else 0.0) - 0.234)
        if t >= burn_in:
            draws[t - burn_in] = beta

    return draws, accepted, math.exp(log_scale)
