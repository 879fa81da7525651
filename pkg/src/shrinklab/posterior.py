"""Posterior sampling for the sparse linear model with known noise variance.

Adaptive random-walk Metropolis over the coefficient vector, targeting the
exact marginal posterior exp{-||y - X beta||^2/(2 sigma2) + sum_j log
prior(beta_j)}. The chain loop runs in a compiled kernel when available (see
_core). Includes the conjugate Gaussian closed form used as a sampler
oracle, posterior ball-exclusion estimates, batch-means standard errors,
and CSV/JSON export.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _core
from ._core.chain_py import (
    FAMILY_GAUSSIAN,
    FAMILY_GDP,
    FAMILY_HORSESHOE,
    FAMILY_LAPLACE,
    FAMILY_STUDENT_T,
)
from ._core.hs_table import horseshoe_table
from .model_core import Dataset, ols_estimate
from .priors import (
    GDP,
    GaussianOracle,
    HorseshoeLike,
    Laplace,
    PriorSpec,
    StudentT,
    log_density,
)
from .specfun import log_beta

SUMMARY_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

CSV_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class SamplerConfig:
    """Chain length, burn-in, initialization, proposal scale, adaptation, seed.

    initial is "ols", "zeros", or an explicit length-p vector. Adaptation
    nudges the log proposal scale toward acceptance 0.234 during burn-in
    only; the scale is frozen afterwards so the kept draws target the exact
    posterior.
    """

    iterations: int
    burn_in: int
    initial: Union[str, np.ndarray] = "ols"
    proposal_scale_init: float = 0.1
    adapt: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError(
                f"burn_in must satisfy 0 <= burn_in < iterations, got {self.burn_in}"
            )
        if not self.proposal_scale_init > 0:
            raise ValueError(
                f"proposal_scale_init must be positive, got {self.proposal_scale_init}"
            )
        if isinstance(self.initial, str):
            if self.initial not in ("ols", "zeros"):
                raise ValueError(
                    f"initial must be 'ols', 'zeros', or a vector, got {self.initial!r}"
                )
        else:
            vec = np.asarray(self.initial, dtype=float)
            if vec.ndim != 1:
                raise ValueError("explicit initial must be a 1-d vector")
            object.__setattr__(self, "initial", vec)


@dataclass(eq=False)
class PosteriorSamples:
    draws: np.ndarray
    acceptance_rate: float
    final_proposal_scale: float

    def __post_init__(self) -> None:
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.ndim != 2 or self.draws.shape[0] < 1:
            raise ValueError("draws must be a non-empty (kept, p) matrix")
        if not 0.0 <= self.acceptance_rate <= 1.0:
            raise ValueError(f"acceptance_rate outside [0,1]: {self.acceptance_rate}")
        if not self.final_proposal_scale > 0:
            raise ValueError("final_proposal_scale must be positive")


def log_posterior(
    beta: np.ndarray, dataset: Dataset, sigma2: float, prior: PriorSpec
) -> float:
    """Unnormalized log posterior at beta (reference implementation)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (dataset.X.shape[1],):
        raise ValueError(
            f"beta has shape {beta.shape}, expected ({dataset.X.shape[1]},)"
        )
    resid = dataset.y - dataset.X @ beta
    ll = -float(resid @ resid) / (2.0 * sigma2)
    return ll + sum(log_density(prior, float(b)) for b in beta)


def _family_params(prior: PriorSpec) -> tuple[int, float, float, float, float]:
    """(family_id, const_term, p1, p2, p3) for the chain kernel."""
    if isinstance(prior, GaussianOracle):
        return FAMILY_GAUSSIAN, -0.5 * math.log(2.0 * math.pi * prior.v), prior.v, 0.0, 0.0
    if isinstance(prior, Laplace):
        return FAMILY_LAPLACE, -math.log(2.0 * prior.s), prior.s, 0.0, 0.0
    if isinstance(prior, StudentT):
        const = (
            -math.log(prior.s)
            - 0.5 * math.log(prior.d0)
            - log_beta(0.5, prior.d0 / 2.0)
        )
        return FAMILY_STUDENT_T, const, prior.s, prior.d0, 0.0
    if isinstance(prior, GDP):
        const = math.log(prior.alpha) - math.log(2.0 * prior.eta)
        return FAMILY_GDP, const, prior.alpha, prior.eta, 0.0
    if isinstance(prior, HorseshoeLike):
        return (
            FAMILY_HORSESHOE,
            prior.log_normalizer(),
            prior.xi,
            prior.b0 + 0.5,
            1.5 - prior.a0,
        )
    raise TypeError(f"not a prior spec: {prior!r}")


def sample_posterior(
    dataset: Dataset, sigma2: float, prior: PriorSpec, cfg: SamplerConfig
) -> PosteriorSamples:
    """Run one adaptive Metropolis chain; deterministic given cfg.seed."""
    X, y = dataset.X, dataset.y
    n, p = X.shape
    if isinstance(cfg.initial, str):
        init = ols_estimate(X, y) if cfg.initial == "ols" else np.zeros(p)
    else:
        init = np.asarray(cfg.initial, dtype=float)
        if init.shape != (p,):
            raise ValueError(f"initial vector has shape {init.shape}, expected ({p},)")
    if not np.all(np.isfinite(init)):
        raise ValueError("non-finite initial point")
    try:
        lp0 = log_posterior(init, dataset, sigma2, prior)
    except ValueError as exc:
        raise ValueError(f"log posterior undefined at initialization: {exc}") from exc
    if not math.isfinite(lp0):
        raise ValueError(f"non-finite log posterior at initialization: {lp0}")

    family, const_term, p1, p2, p3 = _family_params(prior)
    if family == FAMILY_HORSESHOE:
        hs_knots, hs_coeffs, z_eff, w_min = horseshoe_table(prior.a0, prior.b0)
    else:
        hs_knots = np.zeros(2)
        hs_coeffs = np.zeros((4, 1))
        z_eff, w_min = math.inf, 0.0

    XtX = np.ascontiguousarray(X.T @ X)
    Xty = np.ascontiguousarray(X.T @ y)
    yty = float(y @ y)

    # one batch of normals, then one batch of uniforms, so consumption order
    # is part of the determinism contract
    rng = np.random.default_rng(cfg.seed)
    normals = rng.standard_normal((cfg.iterations, p))
    uniforms = rng.random(cfg.iterations)

    draws, accepted, final_scale = _core.run_chain(
        XtX,
        Xty,
        yty,
        float(sigma2),
        family,
        const_term,
        p1,
        p2,
        p3,
        np.ascontiguousarray(init),
        cfg.iterations,
        cfg.burn_in,
        cfg.proposal_scale_init,
        cfg.adapt,
        normals,
        uniforms,
        np.ascontiguousarray(hs_knots),
        np.ascontiguousarray(hs_coeffs),
        z_eff,
        w_min,
    )
    return PosteriorSamples(
        draws=draws,
        acceptance_rate=accepted / cfg.iterations,
        final_proposal_scale=final_scale,
    )


def ball_exclusion_probability(
    samples: PosteriorSamples, beta0: np.ndarray, epsilon: float
) -> float:
    """Fraction of draws at Euclidean distance more than epsilon from beta0."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    beta0 = np.asarray(beta0, dtype=float)
    dist = np.linalg.norm(samples.draws - beta0, axis=1)
    return float(np.mean(dist > epsilon))


def conjugate_gaussian_posterior(
    dataset: Dataset, sigma2: float, v: float
) -> tuple[np.ndarray, np.ndarray]:
    """Exact posterior (mean, covariance) under the Gaussian prior N(0, v I)."""
    if not v > 0:
        raise ValueError(f"v must be positive, got {v}")
    X, y = dataset.X, dataset.y
    p = X.shape[1]
    A = X.T @ X / sigma2 + np.eye(p) / v
    c, low = cho_factor(A)
    mean = cho_solve((c, low), X.T @ y / sigma2)
    cov = cho_solve((c, low), np.eye(p))
    return mean, cov


def batch_means_se(draws: np.ndarray, n_batches: int = 50) -> np.ndarray:
    """Autocorrelation-robust standard error of the column means.

    Splits the chain into contiguous batches (dropping any remainder) and
    uses the spread of batch means.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim == 1:
        draws = draws[:, None]
    m = draws.shape[0]
    n_b = min(n_batches, m // 2)
    if n_b < 2:
        raise ValueError(f"need at least 4 draws for batch means, got {m}")
    batch_len = m // n_b
    trimmed = draws[: n_b * batch_len]
    means = trimmed.reshape(n_b, batch_len, -1).mean(axis=1)
    return np.std(means, axis=0, ddof=1) / math.sqrt(n_b)


def save_draws_csv(samples: PosteriorSamples, path: str | Path) -> None:
    """One row per kept draw, full-precision comma-separated."""
    np.savetxt(Path(path), samples.draws, fmt=CSV_FLOAT_FMT, delimiter=",")


def summary_json(samples: PosteriorSamples, seed: int) -> dict:
    """Posterior mean, coordinate quantiles, acceptance rate, and seed."""
    qs = np.quantile(samples.draws, SUMMARY_QUANTILES, axis=0)
    return {
        "mean": [float(v) for v in samples.draws.mean(axis=0)],
        "quantiles": {
            str(q): [float(v) for v in row] for q, row in zip(SUMMARY_QUANTILES, qs)
        },
        "acceptance_rate": samples.acceptance_rate,
        "final_proposal_scale": samples.final_proposal_scale,
        "seed": seed,
    }


def save_summary_json(samples: PosteriorSamples, path: str | Path, seed: int) -> None:
    Path(path).write_text(json.dumps(summary_json(samples, seed), indent=2) + "\n")
