"""Shrinkage prior families.

Five zero-centered families as immutable value types: Laplace, scaled
Student-t, generalized double Pareto (GDP), a horseshoe-like hierarchy whose
marginal involves the confluent hypergeometric U function, and a Gaussian
oracle. Each family gets exact log-density, CDF, interval probability,
closed-form second moment, prior sampling, and the scale schedules that tie
the hyperparameter to the problem size (n, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .specfun import Z_SWITCH_DEFAULT, confluent_u, log_beta, log_gamma, reg_inc_beta

CDF_QUAD_EPSABS = 1e-8

# default shape parameters used when a schedule builds a full prior
DEFAULT_SHAPES = {"d0": 3.0, "alpha": 3.0, "a0": 1.0, "b0": 2.0}


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite real, got {value}")


@dataclass(frozen=True)
class Laplace:
    """Double-exponential prior with density exp(-|beta|/s) / (2s)."""

    s: float
    family: ClassVar[str] = "laplace"

    def __post_init__(self) -> None:
        _require_positive("s", self.s)


@dataclass(frozen=True)
class StudentT:
    """Student-t with d0 degrees of freedom scaled by s.

    Density (1/(s sqrt(d0) B(1/2, d0/2))) (1 + beta^2/(d0 s^2))^{-(d0+1)/2}.
    """

    s: float
    d0: float
    family: ClassVar[str] = "student_t"

    def __post_init__(self) -> None:
        _require_positive("s", self.s)
        _require_positive("d0", self.d0)


@dataclass(frozen=True)
class GDP:
    """Generalized double Pareto, density (alpha/(2 eta)) (1 + |beta|/eta)^{-(alpha+1)}."""

    alpha: float
    eta: float
    family: ClassVar[str] = "gdp"

    def __post_init__(self) -> None:
        _require_positive("alpha", self.alpha)
        _require_positive("eta", self.eta)


@dataclass(frozen=True)
class HorseshoeLike:
    """Gamma-Gamma scale-mixture of normals.

    Hierarchy: beta ~ N(0, tau), tau ~ Gamma(a0, rate lambda),
    lambda ~ Gamma(b0, rate xi). The marginal density is

        Gamma(b0+1/2) Gamma(a0+b0) U(b0+1/2, 3/2-a0, beta^2/(2 xi))
        -----------------------------------------------------------
                 sqrt(2 pi xi) Gamma(a0) Gamma(b0)

    with U the confluent hypergeometric function of the second kind. The
    second moment is finite only for b0 > 1, which excludes a0 = b0 = 1/2;
    that region is still valid for density evaluation and sampling. At
    beta = 0 the density is finite only for a0 > 1/2.
    """

    a0: float
    b0: float
    xi: float
    family: ClassVar[str] = "horseshoe_like"

    def __post_init__(self) -> None:
        _require_positive("a0", self.a0)
        _require_positive("b0", self.b0)
        _require_positive("xi", self.xi)

    def log_normalizer(self) -> float:
        """log of the constant multiplying U in the marginal density."""
        return (
            log_gamma(self.b0 + 0.5)
            + log_gamma(self.a0 + self.b0)
            - 0.5 * math.log(2.0 * math.pi * self.xi)
            - log_gamma(self.a0)
            - log_gamma(self.b0)
        )


@dataclass(frozen=True)
class GaussianOracle:
    """Zero-mean Gaussian with known variance v, the non-shrinkage reference."""

    v: float
    family: ClassVar[str] = "gaussian_oracle"

    def __post_init__(self) -> None:
        _require_positive("v", self.v)


PriorSpec = Union[Laplace, StudentT, GDP, HorseshoeLike, GaussianOracle]

_FAMILIES: dict[str, type] = {
    cls.family: cls for cls in (Laplace, StudentT, GDP, HorseshoeLike, GaussianOracle)
}


@dataclass(frozen=True)
class ScheduleSpec:
    """A prior family tag plus the (C, rho) pair that sets its scale from (n, p)."""

    family: str
    C: float
    rho: float

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown prior family {self.family!r}")
        _require_positive("C", self.C)
        _require_positive("rho", self.rho)


def log_density(prior: PriorSpec, beta: float) -> float:
    """Exact log prior density at a point."""
    beta = float(beta)
    if isinstance(prior, Laplace):
        return -abs(beta) / prior.s - math.log(2.0 * prior.s)
    if isinstance(prior, StudentT):
        t2 = (beta / prior.s) ** 2
        return (
            -math.log(prior.s)
            - 0.5 * math.log(prior.d0)
            - log_beta(0.5, prior.d0 / 2.0)
            - 0.5 * (prior.d0 + 1.0) * math.log1p(t2 / prior.d0)
        )
    if isinstance(prior, GDP):
        return (
            math.log(prior.alpha)
            - math.log(2.0 * prior.eta)
            - (prior.alpha + 1.0) * math.log1p(abs(beta) / prior.eta)
        )
    if isinstance(prior, HorseshoeLike):
        z = beta * beta / (2.0 * prior.xi)
        u = confluent_u(prior.b0 + 0.5, 1.5 - prior.a0, z)
        return prior.log_normalizer() + math.log(u.value)
    if isinstance(prior, GaussianOracle):
        return -0.5 * math.log(2.0 * math.pi * prior.v) - beta * beta / (2.0 * prior.v)
    raise TypeError(f"not a prior spec: {prior!r}")


def _horseshoe_upper_tail(prior: HorseshoeLike, x: float) -> float:
    # integral of the marginal density over [x, inf), x >= 0
    def f(t: float) -> float:
        return math.exp(log_density(prior, t))

    val, _ = quad(f, x, np.inf, epsabs=CDF_QUAD_EPSABS, limit=200)
    return min(max(val, 0.0), 1.0)


def cdf(prior: PriorSpec, x: float) -> float:
    """Prior CDF; all families are symmetric about zero."""
    x = float(x)
    if isinstance(prior, Laplace):
        if x < 0:
            return 0.5 * math.exp(x / prior.s)
        return 1.0 - 0.5 * math.exp(-x / prior.s)
    if isinstance(prior, StudentT):
        if x == 0.0:
            return 0.5
        t2 = (x / prior.s) ** 2
        w = prior.d0 / (prior.d0 + t2)
        half_tail = 0.5 * reg_inc_beta(prior.d0 / 2.0, 0.5, w)
        return half_tail if x < 0 else 1.0 - half_tail
    if isinstance(prior, GDP):
        if x < 0:
            return 0.5 * (1.0 - x / prior.eta) ** (-prior.alpha)
        return 1.0 - 0.5 * (1.0 + x / prior.eta) ** (-prior.alpha)
    if isinstance(prior, HorseshoeLike):
        if x == 0.0:
            return 0.5
        tail = _horseshoe_upper_tail(prior, abs(x))
        return tail if x < 0 else 1.0 - tail
    if isinstance(prior, GaussianOracle):
        return float(ndtr(x / math.sqrt(prior.v)))
    raise TypeError(f"not a prior spec: {prior!r}")


def interval_probability(prior: PriorSpec, center: float, radius: float) -> float:
    """Prior mass of [center - radius, center + radius]."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    lo = cdf(prior, center - radius)
    hi = cdf(prior, center + radius)
    return max(hi - lo, 0.0)


def second_moment(prior: PriorSpec) -> float:
    """Closed-form E(beta^2); raises where the moment is infinite."""
    if isinstance(prior, Laplace):
        return 2.0 * prior.s * prior.s
    if isinstance(prior, StudentT):
        if prior.d0 <= 2.0:
            raise ValueError(f"StudentT second moment requires d0 > 2, got d0={prior.d0}")
        return prior.d0 * prior.s * prior.s / (prior.d0 - 2.0)
    if isinstance(prior, GDP):
        if prior.alpha <= 2.0:
            raise ValueError(f"GDP second moment requires alpha > 2, got alpha={prior.alpha}")
        return 2.0 * prior.eta * prior.eta / ((prior.alpha - 1.0) * (prior.alpha - 2.0))
    if isinstance(prior, HorseshoeLike):
        if prior.b0 <= 1.0:
            raise ValueError(
                f"HorseshoeLike second moment requires b0 > 1, got b0={prior.b0}"
            )
        # xi * Gamma(a0+1) Gamma(b0-1) / (Gamma(a0) Gamma(b0)), in log form to
        # stay stable for large shapes
        log_ratio = (
            log_gamma(prior.a0 + 1.0)
            + log_gamma(prior.b0 - 1.0)
            - log_gamma(prior.a0)
            - log_gamma(prior.b0)
        )
        return prior.xi * math.exp(log_ratio)
    if isinstance(prior, GaussianOracle):
        return prior.v
    raise TypeError(f"not a prior spec: {prior!r}")


def sample_prior(prior: PriorSpec, m: int, seed) -> np.ndarray:
    """m i.i.d. draws from the prior, deterministic given seed."""
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    rng = np.random.default_rng(seed)
    if isinstance(prior, Laplace):
        u = rng.uniform(size=m) - 0.5
        return -prior.s * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    if isinstance(prior, StudentT):
        return prior.s * rng.standard_t(prior.d0, size=m)
    if isinstance(prior, GDP):
        lam = rng.gamma(prior.alpha, 1.0, size=m)
        u = rng.uniform(size=m) - 0.5
        return -(prior.eta / lam) * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    if isinstance(prior, HorseshoeLike):
        lam = rng.gamma(prior.b0, 1.0 / prior.xi, size=m)
        tau = rng.gamma(prior.a0, 1.0 / lam)
        return rng.normal(0.0, np.sqrt(tau))
    if isinstance(prior, GaussianOracle):
        return rng.normal(0.0, math.sqrt(prior.v), size=m)
    raise TypeError(f"not a prior spec: {prior!r}")


def schedule_hyper(spec: ScheduleSpec, n: int, p: int) -> float:
    """Scale hyperparameter prescribed by the family's schedule at (n, p).

    Laplace, StudentT, GDP share C / (sqrt(p) n^{rho/2} log n); HorseshoeLike
    uses C / (p n^rho log n); GaussianOracle uses the squared common scale so
    its standard deviation matches the other families' scale.
    """
    if n < 2:
        raise ValueError(f"schedule requires n >= 2, got n={n}")
    if p < 1:
        raise ValueError(f"schedule requires p >= 1, got p={p}")
    common = spec.C / (math.sqrt(p) * n ** (spec.rho / 2.0) * math.log(n))
    if spec.family == "horseshoe_like":
        return spec.C / (p * n**spec.rho * math.log(n))
    if spec.family == "gaussian_oracle":
        return common * common
    return common


def build_prior(family: str, scale: float, shapes: dict | None = None) -> PriorSpec:
    """Prior from a family tag, a scale value, and optional shape overrides.

    The scale lands in the family's own scale slot (s, eta, xi, or v);
    shapes fill the remaining parameters on top of DEFAULT_SHAPES.
    """
    merged = dict(DEFAULT_SHAPES)
    if shapes:
        merged.update(shapes)
    if family == "laplace":
        return Laplace(s=scale)
    if family == "student_t":
        return StudentT(s=scale, d0=float(merged["d0"]))
    if family == "gdp":
        return GDP(alpha=float(merged["alpha"]), eta=scale)
    if family == "horseshoe_like":
        return HorseshoeLike(a0=float(merged["a0"]), b0=float(merged["b0"]), xi=scale)
    if family == "gaussian_oracle":
        return GaussianOracle(v=scale)
    raise ValueError(f"unknown prior family {family!r}")


def scheduled_prior(
    spec: ScheduleSpec, n: int, p: int, shapes: dict | None = None
) -> PriorSpec:
    """Build the full prior at (n, p) from a schedule plus shape parameters.

    Shape defaults (d0=3, alpha=3, a0=1, b0=2) all give finite second
    moments; overriding with an infinite-moment shape is rejected here
    because every scheduled prior feeds moment-based bounds downstream.
    """
    prior = build_prior(spec.family, schedule_hyper(spec, n, p), shapes)
    second_moment(prior)  # reject infinite-moment shapes immediately
    return prior


def prior_to_json(prior: PriorSpec) -> dict:
    """JSON-ready dict: family tag plus the family's own parameters."""
    if isinstance(prior, Laplace):
        return {"family": prior.family, "s": prior.s}
    if isinstance(prior, StudentT):
        return {"family": prior.family, "s": prior.s, "d0": prior.d0}
    if isinstance(prior, GDP):
        return {"family": prior.family, "alpha": prior.alpha, "eta": prior.eta}
    if isinstance(prior, HorseshoeLike):
        return {"family": prior.family, "a0": prior.a0, "b0": prior.b0, "xi": prior.xi}
    if isinstance(prior, GaussianOracle):
        return {"family": prior.family, "v": prior.v}
    raise TypeError(f"not a prior spec: {prior!r}")


def prior_from_json(obj: dict) -> PriorSpec:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError("prior JSON must be an object with a 'family' key")
    family = obj["family"]
    if family not in _FAMILIES:
        raise ValueError(f"unknown prior family {family!r}")
    params = {k: float(v) for k, v in obj.items() if k != "family"}
    try:
        return _FAMILIES[family](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for family {family!r}: {exc}") from exc


def schedule_to_json(spec: ScheduleSpec) -> dict:
    return {"family": spec.family, "C": spec.C, "rho": spec.rho}


def schedule_from_json(obj: dict) -> ScheduleSpec:
    if not isinstance(obj, dict):
        raise ValueError("schedule JSON must be an object")
    try:
        return ScheduleSpec(
            family=str(obj["family"]), C=float(obj["C"]), rho=float(obj["rho"])
        )
    except KeyError as exc:
        raise ValueError(f"schedule JSON missing key {exc}") from exc
