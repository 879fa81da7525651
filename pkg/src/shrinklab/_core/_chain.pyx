# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled random-walk Metropolis chain kernel.

Mirrors chain_py.run_chain exactly in logic and argument order; only the
evaluation strategy differs (tight C loops instead of vectorized NumPy).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log, log1p, pow, sqrt

cnp.import_array()

DEF FAMILY_GAUSSIAN = 0
DEF FAMILY_LAPLACE = 1
DEF FAMILY_STUDENT_T = 2
DEF FAMILY_GDP = 3
DEF FAMILY_HORSESHOE = 4

DEF ASYMPTOTIC_MAX_TERMS = 60


cdef double _log_u_asymptotic(double a, double b, double z) noexcept nogil:
    cdef double term = 1.0
    cdef double total = 1.0
    cdef double nxt
    cdef int m
    for m in range(ASYMPTOTIC_MAX_TERMS):
        nxt = term * (a + m) * (1.0 + a - b + m) / (-(m + 1) * z)
        if nxt == 0.0 or fabs(nxt) >= fabs(term):
            break
        term = nxt
        total += term
        if fabs(term) < 1e-18:
            break
    return -a * log(z) + log(total)


cdef double _spline_eval_scalar(
    double w, const double[::1] knots, const double[:, ::1] coeffs
) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = knots.shape[0] - 1
    cdef Py_ssize_t mid
    # rightmost knot index with knots[idx] <= w, clamped to a valid interval
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knots[mid] <= w:
            lo = mid
        else:
            hi = mid
    cdef double dx = w - knots[lo]
    return ((coeffs[0, lo] * dx + coeffs[1, lo]) * dx + coeffs[2, lo]) * dx + coeffs[3, lo]


cdef double _log_prior_sum(
    const double[::1] beta,
    int family,
    double const_term,
    double p1,
    double p2,
    double p3,
    const double[::1] hs_knots,
    const double[:, ::1] hs_coeffs,
    double z_eff,
    double w_min,
) noexcept nogil:
    cdef Py_ssize_t p = beta.shape[0]
    cdef double total = p * const_term
    cdef double b_j, z, w
    cdef Py_ssize_t j
    if family == FAMILY_GAUSSIAN:
        for j in range(p):
            total -= beta[j] * beta[j] / (2.0 * p1)
    elif family == FAMILY_LAPLACE:
        for j in range(p):
            total -= fabs(beta[j]) / p1
    elif family == FAMILY_STUDENT_T:
        for j in range(p):
            total -= 0.5 * (p2 + 1.0) * log1p(beta[j] * beta[j] / (p2 * p1 * p1))
    elif family == FAMILY_GDP:
        for j in range(p):
            total -= (p1 + 1.0) * log1p(fabs(beta[j]) / p2)
    else:  # FAMILY_HORSESHOE: p1=xi, p2=a, p3=b
        for j in range(p):
            z = beta[j] * beta[j] / (2.0 * p1)
            if z > z_eff:
                total += _log_u_asymptotic(p2, p3, z)
            else:
                w = sqrt(z)
                if w < w_min:
                    w = w_min
                total += _spline_eval_scalar(w, hs_knots, hs_coeffs)
    return total


def run_chain(
    const double[:, ::1] XtX,
    const double[::1] Xty,
    double yty,
    double sigma2,
    int family,
    double const_term,
    double p1,
    double p2,
    double p3,
    const double[::1] beta_init,
    int iterations,
    int burn_in,
    double proposal_scale_init,
    bint adapt,
    const double[:, ::1] normals,
    const double[::1] uniforms,
    const double[::1] hs_knots,
    const double[:, ::1] hs_coeffs,
    double z_eff,
    double w_min,
):
    """Adaptive random-walk Metropolis; returns (draws, accepted, final_scale)."""
    cdef Py_ssize_t p = beta_init.shape[0]
    cdef Py_ssize_t kept = iterations - burn_in
    draws_arr = np.empty((kept, p))
    beta_arr = np.array(beta_init, dtype=np.float64, copy=True)
    prop_arr = np.empty(p)
    cdef double[:, ::1] draws = draws_arr
    cdef double[::1] beta = beta_arr
    cdef double[::1] prop = prop_arr

    cdef double log_scale = log(proposal_scale_init)
    cdef double lp, lp_prop, rss, scale, u, quad, dot
    cdef Py_ssize_t t, j, k
    cdef int accepted = 0
    cdef bint accept

    with nogil:
        # log posterior at the initial point
        quad = 0.0
        dot = 0.0
        for j in range(p):
            dot += beta[j] * Xty[j]
            for k in range(p):
                quad += beta[j] * XtX[j, k] * beta[k]
        rss = yty - 2.0 * dot + quad
        lp = -rss / (2.0 * sigma2) + _log_prior_sum(
            beta, family, const_term, p1, p2, p3, hs_knots, hs_coeffs, z_eff, w_min
        )

        for t in range(iterations):
            scale = exp(log_scale)
            for j in range(p):
                prop[j] = beta[j] + scale * normals[t, j]
            quad = 0.0
            dot = 0.0
            for j in range(p):
                dot += prop[j] * Xty[j]
                for k in range(p):
                    quad += prop[j] * XtX[j, k] * prop[k]
            rss = yty - 2.0 * dot + quad
            lp_prop = -rss / (2.0 * sigma2) + _log_prior_sum(
                prop, family, const_term, p1, p2, p3, hs_knots, hs_coeffs, z_eff, w_min
            )
            u = uniforms[t]
            accept = u <= 0.0 or log(u) < lp_prop - lp
            if accept:
                for j in range(p):
                    beta[j] = prop[j]
                lp = lp_prop
                accepted += 1
            if adapt and t < burn_in:
                log_scale += pow(t + 1.0, -0.6) * ((1.0 if accept else 0.0) - 0.234)
            if t >= burn_in:
                for j in range(p):
                    draws[t - burn_in, j] = beta[j]

    return draws_arr, accepted, exp(log_scale)
