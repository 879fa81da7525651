"""Spline table of the horseshoe-like marginal's log U factor.

The chain kernel needs log U(b0+1/2, 3/2-a0, z) at z = beta^2/(2 xi) many
thousands of times per run; quadrature per call is far too slow. We
tabulate g(w) = log U(a, b, w^2) on w in [w_min, sqrt(z_eff)] with a cubic
spline (the w = sqrt(z) substitution absorbs the z^{1-b} branch point at the
origin), and leave z > z_eff to the large-z asymptotic series evaluated
directly in the kernel. z_eff is raised above the default branch switch when
needed so the truncated series stays positive from its first term on.

The table depends only on (a0, b0); xi enters through the caller's z, so one
cached table serves every schedule point of a family.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from ..specfun import Z_SWITCH_DEFAULT, confluent_u

TABLE_KNOTS = 801
# below this w the near-origin table is clamped for a0 <= 1/2, where the
# marginal is unbounded at zero
W_MIN_CLAMP = 1e-4


@lru_cache(maxsize=64)
def horseshoe_table(
    a0: float, b0: float, z_switch: float = Z_SWITCH_DEFAULT
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """(knots, coefficients, z_eff, w_min) for g(w) = log U(a, b, w^2).

    knots has shape (K,); coefficients has the cubic-spline layout (4, K-1)
    with leading cubic coefficient first, evaluated in (w - knot) offsets.
    """
    a = b0 + 0.5
    b = 1.5 - a0
    # first asymptotic term is a(1+a-b)/z = a(a0+b0)/z; z_eff >= twice that
    # keeps every truncated partial sum at least 1/2
    z_eff = max(z_switch, 2.0 * a * (a0 + b0))
    w_min = 0.0 if a0 > 0.5 else W_MIN_CLAMP
    w = np.linspace(w_min, math.sqrt(z_eff), TABLE_KNOTS)
    g = np.array(
        [math.log(confluent_u(a, b, wi * wi, z_switch=z_eff).value) for wi in w]
    )
    spline = CubicSpline(w, g)
    knots = np.ascontiguousarray(spline.x)
    coeffs = np.ascontiguousarray(spline.c)
    knots.setflags(write=False)
    coeffs.setflags(write=False)
    return knots, coeffs, z_eff, w_min
