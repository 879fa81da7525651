"""Sparse linear-model instances and design diagnostics.

Generates y = X beta0 + eps with known noise variance and a sparse truth,
computes OLS estimates and singular-value summaries of the design, and
evaluates the growth/regularity conditions linking (n, p, q, rho) as
checkable predicates over a grid of problem sizes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

A1_THRESHOLD_DEFAULT = 0.5
A4_THRESHOLD_DEFAULT = 0.5
A5_THRESHOLD_DEFAULT = 0.5
A2_FLOOR_DEFAULT = 0.1
A2_CEILING_DEFAULT = 10.0

# full-precision float rendering so CSV round-trips are exact
CSV_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class IIDGaussian:
    """Design with i.i.d. standard normal entries."""

    kind: str = field(default="iid_gaussian", init=False)


@dataclass(frozen=True, eq=False)
class FixedMatrix:
    """User-supplied n x p design matrix."""

    matrix: np.ndarray
    kind: str = field(default="fixed_matrix", init=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError(f"fixed design must be a 2-d matrix, got ndim={m.ndim}")
        if not np.all(np.isfinite(m)):
            raise ValueError("fixed design must have finite entries")
        object.__setattr__(self, "matrix", m)


DesignKind = Union[IIDGaussian, FixedMatrix]


@dataclass(frozen=True)
class ModelConfig:
    """One problem instance: sizes, noise level, truth values, design, seed.

    The active set is the first q coordinates unless active_indices names an
    explicit sorted index list of length q.
    """

    n: int
    p: int
    q: int
    sigma2: float
    beta_nonzero: tuple[float, ...]
    design_kind: DesignKind
    seed: int
    active_indices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise ValueError(f"n and p must be positive, got n={self.n}, p={self.p}")
        if not 0 <= self.q <= self.p:
            raise ValueError(f"q must satisfy 0 <= q <= p, got q={self.q}, p={self.p}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2}")
        beta = tuple(float(b) for b in self.beta_nonzero)
        if len(beta) != self.q:
            raise ValueError(
                f"beta_nonzero must have length q={self.q}, got {len(beta)}"
            )
        if any(not math.isfinite(b) or b == 0.0 for b in beta):
            raise ValueError("beta_nonzero entries must be finite and nonzero")
        object.__setattr__(self, "beta_nonzero", beta)
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if isinstance(self.design_kind, FixedMatrix):
            if self.design_kind.matrix.shape != (self.n, self.p):
                raise ValueError(
                    f"fixed design shape {self.design_kind.matrix.shape} "
                    f"!= (n, p) = ({self.n}, {self.p})"
                )
        elif not isinstance(self.design_kind, IIDGaussian):
            raise ValueError(f"unknown design kind: {self.design_kind!r}")
        if self.active_indices is not None:
            idx = tuple(int(i) for i in self.active_indices)
            if len(idx) != self.q:
                raise ValueError(
                    f"active_indices must have length q={self.q}, got {len(idx)}"
                )
            if len(set(idx)) != len(idx) or list(idx) != sorted(idx):
                raise ValueError("active_indices must be sorted and unique")
            if idx and (idx[0] < 0 or idx[-1] >= self.p):
                raise ValueError(f"active_indices out of range [0, {self.p})")
            object.__setattr__(self, "active_indices", idx)


@dataclass(eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    beta0: np.ndarray
    active_set: tuple[int, ...]

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.beta0 = np.asarray(self.beta0, dtype=float)
        n, p = self.X.shape
        if self.y.shape != (n,):
            raise ValueError(f"y has shape {self.y.shape}, expected ({n},)")
        if self.beta0.shape != (p,):
            raise ValueError(f"beta0 has shape {self.beta0.shape}, expected ({p},)")
        self.active_set = tuple(int(i) for i in self.active_set)
        nonzero = tuple(int(i) for i in np.flatnonzero(self.beta0))
        if nonzero != self.active_set:
            raise ValueError(
                f"beta0 nonzero pattern {nonzero} does not match active_set {self.active_set}"
            )


@dataclass(frozen=True)
class DesignSummary:
    lambda_min: float
    lambda_max: float
    lambda_min_scaled: float
    lambda_max_scaled: float


@dataclass(frozen=True)
class AssumptionRow:
    n: int
    p: int
    q: int
    a1_ratio: float
    a4_ratio: float
    a5_ratio: float
    a3_sup: float
    a2_window: tuple[float, float]


@dataclass(frozen=True)
class AssumptionReport:
    rho: float
    rows: tuple[AssumptionRow, ...]
    verdicts: dict[str, bool]
    thresholds: dict[str, float]


def generate_dataset(config: ModelConfig) -> Dataset:
    """Realize one dataset from the config; deterministic given the seed.

    Draw order is fixed: the design first (when random), then the noise.
    """
    rng = np.random.default_rng(config.seed)
    if isinstance(config.design_kind, IIDGaussian):
        X = rng.standard_normal((config.n, config.p))
    else:
        X = config.design_kind.matrix.copy()
    beta0 = np.zeros(config.p)
    active = (
        config.active_indices
        if config.active_indices is not None
        else tuple(range(config.q))
    )
    beta0[list(active)] = config.beta_nonzero
    eps = rng.normal(0.0, math.sqrt(config.sigma2), size=config.n)
    y = X @ beta0 + eps
    return Dataset(X=X, y=y, beta0=beta0, active_set=active)


def ols_estimate(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares solution; rank deficiency is a hard error."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if p > n:
        raise np.linalg.LinAlgError(
            f"design with p={p} > n={n} cannot have full column rank"
        )
    beta_hat, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < p:
        raise np.linalg.LinAlgError(
            f"design is rank-deficient (rank {rank} < p = {p})"
        )
    return beta_hat


def design_summary(X: np.ndarray) -> DesignSummary:
    """Extreme singular values of X, raw and divided by sqrt(n)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    svals = np.linalg.svd(X, compute_uv=False)
    lam_max = float(svals[0])
    lam_min = float(svals[-1])
    root_n = math.sqrt(n)
    return DesignSummary(
        lambda_min=lam_min,
        lambda_max=lam_max,
        lambda_min_scaled=lam_min / root_n,
        lambda_max_scaled=lam_max / root_n,
    )


def _strictly_decreasing(values: list[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def check_assumptions(
    grid: list[ModelConfig],
    rho: float,
    *,
    a1_threshold: float = A1_THRESHOLD_DEFAULT,
    a4_threshold: float = A4_THRESHOLD_DEFAULT,
    a5_threshold: float = A5_THRESHOLD_DEFAULT,
    a2_floor: float = A2_FLOOR_DEFAULT,
    a2_ceiling: float = A2_CEILING_DEFAULT,
    a3_bound: float = math.inf,
) -> AssumptionReport:
    """Evaluate the growth/regularity conditions over a grid of configs.

    The asymptotic conditions are operationalized as: ratios strictly
    decreasing (over the whole grid for the dimension ratio p/n, over the
    last half of the grid for the sparsity ratios) with the final value
    under the threshold; the design window uses realized singular values
    against a floor and ceiling.
    """
    if len(grid) < 2:
        raise ValueError(f"grid must have at least 2 entries, got {len(grid)}")
    ns = [c.n for c in grid]
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise ValueError("grid must be sorted by strictly increasing n")
    if not 0.0 < rho < 2.0:
        raise ValueError(f"rho must lie in (0, 2), got {rho}")

    rows = []
    for config in grid:
        n, p, q = config.n, config.p, config.q
        log_n = math.log(n)
        summary = design_summary(generate_dataset(config).X)
        rows.append(
            AssumptionRow(
                n=n,
                p=p,
                q=q,
                a1_ratio=p / n,
                a4_ratio=q * math.sqrt(p) * log_n / n ** (1.0 - rho / 2.0),
                a5_ratio=q * log_n / n,
                a3_sup=max((abs(b) for b in config.beta_nonzero), default=0.0),
                a2_window=(summary.lambda_min_scaled, summary.lambda_max_scaled),
            )
        )

    tail = rows[len(rows) // 2 :]
    a1_vals = [r.a1_ratio for r in rows]
    a4_tail = [r.a4_ratio for r in tail]
    a5_tail = [r.a5_ratio for r in tail]
    verdicts = {
        "a1": _strictly_decreasing(a1_vals) and all(v < a1_threshold for v in a1_vals),
        "a2": all(
            r.a2_window[0] >= a2_floor and r.a2_window[1] <= a2_ceiling for r in rows
        ),
        "a3": all(math.isfinite(r.a3_sup) and r.a3_sup <= a3_bound for r in rows),
        "a4": _strictly_decreasing(a4_tail) and a4_tail[-1] < a4_threshold,
        "a5": _strictly_decreasing(a5_tail) and a5_tail[-1] < a5_threshold,
    }
    thresholds = {
        "a1_threshold": a1_threshold,
        "a4_threshold": a4_threshold,
        "a5_threshold": a5_threshold,
        "a2_floor": a2_floor,
        "a2_ceiling": a2_ceiling,
        "a3_bound": a3_bound,
    }
    return AssumptionReport(
        rho=rho, rows=tuple(rows), verdicts=verdicts, thresholds=thresholds
    )


def save_dataset(dataset: Dataset, directory: str | Path, config: ModelConfig) -> None:
    """Write X.csv / y.csv / beta0.csv at full precision plus meta.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    np.savetxt(directory / "X.csv", dataset.X, fmt=CSV_FLOAT_FMT, delimiter=",")
    np.savetxt(directory / "y.csv", dataset.y, fmt=CSV_FLOAT_FMT, delimiter=",")
    np.savetxt(directory / "beta0.csv", dataset.beta0, fmt=CSV_FLOAT_FMT, delimiter=",")
    meta = {
        "n": config.n,
        "p": config.p,
        "q": config.q,
        "sigma2": config.sigma2,
        "beta_nonzero": list(config.beta_nonzero),
        "design_kind": config.design_kind.kind,
        "seed": config.seed,
        "active_indices": (
            list(config.active_indices) if config.active_indices is not None else None
        ),
    }
    (directory / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_dataset(directory: str | Path) -> tuple[Dataset, dict]:
    """Read a dataset directory back; returns the data and the meta echo."""
    directory = Path(directory)
    X = np.loadtxt(directory / "X.csv", delimiter=",", ndmin=2)
    y = np.loadtxt(directory / "y.csv", delimiter=",", ndmin=1)
    beta0 = np.loadtxt(directory / "beta0.csv", delimiter=",", ndmin=1)
    meta = json.loads((directory / "meta.json").read_text())
    active = tuple(int(i) for i in np.flatnonzero(beta0))
    return Dataset(X=X, y=y, beta0=beta0, active_set=active), meta
