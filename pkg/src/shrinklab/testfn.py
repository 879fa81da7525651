"""Consistent separation test for the full coefficient vector.

The test rejects beta0 when the least-squares estimate lands farther
than epsilon/2 from it. Both error probabilities decay like
exp{-eps^2 n lambda_min^2 / (16 sigma^2)} in the scaled minimum singular
value of the design; the Monte Carlo harnesses here estimate the type-I
rate under the null and the worst type-II rate over boundary
alternatives at distance exactly epsilon.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .concentration import _csv_cell
from .model_core import (
    Dataset,
    FixedMatrix,
    ModelConfig,
    design_summary,
    generate_dataset,
    ols_estimate,
)

TEST_COLUMNS = (
    "n",
    "p",
    "epsilon",
    "type1_rate",
    "type2_max_rate",
    "bound",
    "n_trials",
    "seed",
)


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # despite the name, not a pytest class

    phi: bool
    distance: float
    threshold: float

    def __post_init__(self) -> None:
        if self.phi != (self.distance > self.threshold):
            raise ValueError(
                f"phi={self.phi} inconsistent with distance {self.distance} "
                f"vs threshold {self.threshold}"
            )


class Type1Result(NamedTuple):
    rate: float
    bound: float
    lambda_min_scaled: float  # smallest realized value over the replicates
    chi2_valid: bool


def phi_test(dataset: Dataset, epsilon: float) -> TestOutcome:
    """Reject when the least-squares estimate is over epsilon/2 from beta0."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    beta_hat = ols_estimate(dataset.X, dataset.y)
    distance = float(np.linalg.norm(beta_hat - dataset.beta0))
    threshold = epsilon / 2.0
    return TestOutcome(phi=distance > threshold, distance=distance, threshold=threshold)


def lemma1_bound(
    epsilon: float, n: int, lambda_min_scaled: float, sigma2: float
) -> float:
    """Shared exponential bound on both error probabilities of the test."""
    for name, value in (
        ("epsilon", epsilon),
        ("n", n),
        ("lambda_min_scaled", lambda_min_scaled),
        ("sigma2", sigma2),
    ):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    return math.exp(-(epsilon**2) * n * lambda_min_scaled**2 / (16.0 * sigma2))


def lemma1_validity(
    epsilon: float, n: int, p: int, lambda_min_scaled: float, sigma2: float
) -> bool:
    """Whether the chi-square tail step behind the bound applies.

    The argument eps^2 n lambda_min^2 / (4 sigma^2) must reach 8p; small
    grid points fail this and should be skipped rather than compared
    against a bound used outside its validity region.
    """
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    x = epsilon**2 * n * lambda_min_scaled**2 / (4.0 * sigma2)
    return x >= 8.0 * p


def type1_error_mc(
    config: ModelConfig, epsilon: float, trials: int, seed
) -> Type1Result:
    """Null rejection rate over fresh datasets, with the matching bound.

    The bound is evaluated at the smallest realized lambda_min among the
    replicates, the weakest (largest) value consistent with all of them.
    """
    if trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials}")
    child_seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    rejections = 0
    lam_min = math.inf
    for child in child_seeds:
        ds = generate_dataset(replace(config, seed=int(child)))
        rejections += phi_test(ds, epsilon).phi
        lam_min = min(lam_min, design_summary(ds.X).lambda_min_scaled)
    bound = lemma1_bound(epsilon, config.n, lam_min, config.sigma2)
    return Type1Result(
        rate=rejections / trials,
        bound=bound,
        lambda_min_scaled=lam_min,
        chi2_valid=lemma1_validity(
            epsilon, config.n, config.p, lam_min, config.sigma2
        ),
    )


def type2_error_mc(
    config: ModelConfig, epsilon: float, directions: int, trials: int, seed
) -> float:
    """Worst Monte Carlo acceptance rate over boundary alternatives.

    Alternatives sit at beta0 + epsilon u for random unit directions u,
    the hardest points of the separated region: interior alternatives are
    farther from the acceptance ball. The estimate approximates the sup
    over the region from a finite direction sample. By linearity the
    estimate discrepancy beta_hat - beta0 equals epsilon u plus the pure
    noise fit, so one fit per trial serves every direction.
    """
    if directions < 1:
        raise ValueError(f"directions must be a positive integer, got {directions}")
    if trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((directions, config.p))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    threshold = epsilon / 2.0
    fixed = config.design_kind if isinstance(config.design_kind, FixedMatrix) else None
    sd = math.sqrt(config.sigma2)
    accepts = np.zeros(directions, dtype=np.int64)
    for _ in range(trials):
        X = (
            fixed.matrix
            if fixed is not None
            else rng.standard_normal((config.n, config.p))
        )
        noise = sd * rng.standard_normal(config.n)
        eta = ols_estimate(X, noise)
        distances = np.linalg.norm(epsilon * u + eta, axis=1)
        accepts += distances <= threshold
    return float(accepts.max()) / trials


def write_test_rows(path, rows: Iterable[Mapping]) -> None:
    """Write error-rate rows as CSV with a fixed column order.

    Floats render with repr so a read-modify-write cycle is byte-identical;
    skipped cells (bound outside its validity region) carry nan rates.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TEST_COLUMNS)
        for row in rows:
            extra = set(row) - set(TEST_COLUMNS)
            if extra:
                raise ValueError(f"unexpected columns: {sorted(extra)}")
            writer.writerow([_csv_cell(row.get(col)) for col in TEST_COLUMNS])
