"""Grid sweeps tying the pieces together, with CSV/JSON artifacts.

Three sweep kinds share one row schema: consistency sweeps run the posterior
sampler over an (n, family) grid and record ball-exclusion medians,
concentration sweeps evaluate the closed-form mass bounds on large-n grids
where sampling would be pointless, and error-vs-bound sweeps Monte Carlo the
OLS-ball test. Every cell is reproducible bit-for-bit from the spec plus
base_seed: cell data seeds are base_seed XOR a lexicographic flat index over
(n, family, replicate), and sampler seeds are the data seed XOR a fixed
64-bit constant so the two streams never collide.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import logging
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .concentration import (
    ConcentrationQuery,
    _csv_cell,
    admissible_ranges,
    bound_row,
    family_lower_bound,
    neg_log_decomposition,
    write_bound_rows,
)
from .model_core import IIDGaussian, ModelConfig, design_summary, generate_dataset
from .posterior import SamplerConfig, ball_exclusion_probability, sample_posterior
from .priors import (
    _FAMILIES,
    PriorSpec,
    ScheduleSpec,
    build_prior,
    schedule_hyper,
    scheduled_prior,
    second_moment,
)
from .testfn import type1_error_mc, type2_error_mc, write_test_rows

log = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "n",
    "p",
    "q",
    "family",
    "hyper_value",
    "ball_exclusion_median",
    "ball_exclusion_iqr",
    "neg_log_bound",
    "bound_satisfied",
    "lemma1_type1",
    "lemma1_bound",
    "seeds_used",
)

SWEEP_KINDS = ("consistency", "concentration", "lemma1")

# Splits the sampler stream away from the data stream for the same cell.
SAMPLER_SEED_XOR = 0x9E3779B97F4A7C15

# Directions probed per trial in the boundary type-II Monte Carlo.
LEMMA1_DIRECTIONS = 20

_GRID_RULE_KINDS = ("power", "fixed")


@dataclass(frozen=True)
class GridRule:
    """Dimension rule over the n grid: p = floor(n**value) or a constant."""

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in _GRID_RULE_KINDS:
            raise ValueError(f"rule kind must be one of {_GRID_RULE_KINDS}, got {self.kind!r}")
        if self.kind == "power":
            if not 0.0 < self.value < 1.0:
                raise ValueError(f"power exponent must lie in (0, 1), got {self.value}")
        else:
            if self.value < 0 or self.value != int(self.value):
                raise ValueError(f"fixed rule needs a nonnegative integer, got {self.value}")

    def value_at(self, n: int) -> int:
        if self.kind == "power":
            return int(math.floor(n**self.value))
        return int(self.value)


@dataclass(frozen=True)
class SweepSpec:
    """Grid, schedule, and sampler settings for one sweep.

    schedule_mode "scheduled" derives each cell's hyperparameter from
    (C, rho); "fixed" pins it at fixed_hyper for every cell, which is the
    contrast case whose bounds should fail to decay.
    """

    n_grid: tuple[int, ...]
    p_rule: GridRule
    q_rule: GridRule
    epsilon: float
    rho: float
    C: float
    families: tuple[str, ...]
    replicates: int
    sampler: SamplerConfig
    base_seed: int
    sigma2: float = 1.0
    beta_nonzero: tuple[float, ...] = (1.0, -1.0, 0.5)
    schedule_mode: str = "scheduled"
    fixed_hyper: Optional[float] = None
    shapes: Optional[dict] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "families", tuple(str(f) for f in self.families))
        object.__setattr__(self, "beta_nonzero", tuple(float(b) for b in self.beta_nonzero))
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(n < 2 for n in self.n_grid):
            raise ValueError(f"n_grid entries must be >= 2, got {self.n_grid}")
        if any(a >= b for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid must be strictly ascending, got {self.n_grid}")
        if not self.families:
            raise ValueError("families must be nonempty")
        unknown = [f for f in self.families if f not in _FAMILIES]
        if unknown:
            raise ValueError(f"unknown prior families {unknown!r}; known: {_FAMILIES}")
        for name in ("epsilon", "rho", "C", "sigma2"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError(f"base_seed must fit in 64 bits, got {self.base_seed}")
        if self.schedule_mode not in ("scheduled", "fixed"):
            raise ValueError(
                f"schedule_mode must be 'scheduled' or 'fixed', got {self.schedule_mode!r}"
            )
        if self.schedule_mode == "fixed":
            if self.fixed_hyper is None or not self.fixed_hyper > 0:
                raise ValueError("schedule_mode 'fixed' requires a positive fixed_hyper")
        for n in self.n_grid:
            p = self.p_rule.value_at(n)
            q = self.q_rule.value_at(n)
            if not 1 <= p < n:
                raise ValueError(f"p rule must give 1 <= p < n, got p={p} at n={n}")
            if not 0 <= q <= p:
                raise ValueError(f"q rule must give 0 <= q <= p, got q={q}, p={p} at n={n}")
        if any(not math.isfinite(b) or b == 0.0 for b in self.beta_nonzero):
            raise ValueError(f"beta_nonzero values must be finite and nonzero, got {self.beta_nonzero}")


@dataclass(frozen=True)
class SweepRow:
    """One grid cell; columns unused by a sweep kind stay None."""

    n: int
    p: int
    q: int
    family: str
    hyper_value: Optional[float]
    ball_exclusion_median: Optional[float]
    ball_exclusion_iqr: Optional[float]
    neg_log_bound: Optional[float]
    bound_satisfied: Optional[bool]
    lemma1_type1: Optional[float]
    lemma1_bound: Optional[float]
    seeds_used: str

    def __post_init__(self) -> None:
        if not 0 <= self.q <= self.p < self.n:
            raise ValueError(f"need 0 <= q <= p < n, got n={self.n}, p={self.p}, q={self.q}")
        for name in ("ball_exclusion_median", "ball_exclusion_iqr", "lemma1_type1", "lemma1_bound"):
            val = getattr(self, name)
            if val is not None and math.isfinite(val) and not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


def _data_seed(base_seed: int, flat_index: int) -> int:
    return (base_seed ^ flat_index) & (2**64 - 1)


def _sampler_seed(data_seed: int) -> int:
    return (data_seed ^ SAMPLER_SEED_XOR) & (2**64 - 1)


def _flat_index(spec: SweepSpec, ni: int, fi: int, rep: int) -> int:
    return (ni * len(spec.families) + fi) * spec.replicates + rep


def _cycle_values(values: tuple[float, ...], q: int) -> tuple[float, ...]:
    return tuple(itertools.islice(itertools.cycle(values), q))


def _cell_prior(spec: SweepSpec, family: str, n: int, p: int) -> tuple[PriorSpec, float]:
    if spec.schedule_mode == "fixed":
        prior = build_prior(family, spec.fixed_hyper, spec.shapes)
        second_moment(prior)  # same finite-moment gate as the scheduled path
        return prior, spec.fixed_hyper
    schedule = ScheduleSpec(family=family, C=spec.C, rho=spec.rho)
    prior = scheduled_prior(schedule, n, p, spec.shapes)
    return prior, schedule_hyper(schedule, n, p)


def _cell_query(
    spec: SweepSpec, n: int, p: int, q: int, prior: PriorSpec, Delta: float, d: float
) -> ConcentrationQuery:
    sup = max((abs(b) for b in _cycle_values(spec.beta_nonzero, q)), default=0.0)
    return ConcentrationQuery(
        n=n, p=p, q=q, rho=spec.rho, Delta=Delta, sup_beta0=sup, prior=prior, d=d
    )


def _consistency_cell(spec: SweepSpec, ni: int, fi: int) -> SweepRow:
    n = spec.n_grid[ni]
    p = spec.p_rule.value_at(n)
    q = spec.q_rule.value_at(n)
    family = spec.families[fi]
    prior, hyper = _cell_prior(spec, family, n, p)
    exclusions: list[float] = []
    seeds: list[int] = []
    first_summary = None
    for rep in range(spec.replicates):
        data_seed = _data_seed(spec.base_seed, _flat_index(spec, ni, fi, rep))
        seeds.append(data_seed)
        try:
            config = ModelConfig(
                n=n,
                p=p,
                q=q,
                sigma2=spec.sigma2,
                beta_nonzero=_cycle_values(spec.beta_nonzero, q),
                design_kind=IIDGaussian(),
                seed=data_seed,
            )
            dataset = generate_dataset(config)
            if first_summary is None:
                first_summary = design_summary(dataset.X)
            sampler = dataclasses.replace(spec.sampler, seed=_sampler_seed(data_seed))
            samples = sample_posterior(dataset, spec.sigma2, prior, sampler)
            exclusions.append(ball_exclusion_probability(samples, dataset.beta0, spec.epsilon))
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            log.warning("cell n=%d family=%s rep=%d failed: %s", n, family, rep, exc)
            exclusions.append(math.nan)
    median = float(np.median(exclusions))
    iqr = float(np.percentile(exclusions, 75) - np.percentile(exclusions, 25))
    neg_log, satisfied = _realized_bound(spec, n, p, q, prior, first_summary)
    return SweepRow(
        n=n,
        p=p,
        q=q,
        family=family,
        hyper_value=hyper,
        ball_exclusion_median=median,
        ball_exclusion_iqr=iqr,
        neg_log_bound=neg_log,
        bound_satisfied=satisfied,
        lemma1_type1=None,
        lemma1_bound=None,
        seeds_used=";".join(str(s) for s in seeds),
    )


def _realized_bound(
    spec: SweepSpec, n: int, p: int, q: int, prior: PriorSpec, summary
) -> tuple[float, Optional[bool]]:
    """Mass bound at the cell's realized design, or NaN when inapplicable.

    Delta and d sit at half their admissible ceilings so both constraints
    hold strictly; d_max(Delta_max/2) = eps^2 lambda_min^2 / (64 sigma^2) > 0,
    so the halved pair never degenerates.
    """
    if summary is None:
        return math.nan, None
    try:
        ranges = admissible_ranges(
            spec.epsilon, summary.lambda_min_scaled, summary.lambda_max_scaled, spec.sigma2
        )
        Delta = 0.5 * ranges.Delta_max
        d = 0.5 * ranges.d_max(Delta)
        report = family_lower_bound(_cell_query(spec, n, p, q, prior, Delta, d))
    except (ValueError, ArithmeticError) as exc:
        log.warning("bound columns unavailable at n=%d: %s", n, exc)
        return math.nan, None
    return report.neg_log_bound, report.satisfied


def run_consistency_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Sampler sweep: ball-exclusion median/IQR per (n, family) cell.

    Bound columns come from the first replicate's realized design summary;
    sampler failures leave NaN cells and the sweep continues.
    """
    cells = [
        (ni, fi) for ni in range(len(spec.n_grid)) for fi in range(len(spec.families))
    ]
    return _map_cells(_consistency_cell, spec, cells, jobs)


def _concentration_cell(
    spec: SweepSpec, ni: int, fi: int, Delta: float, d: float
) -> tuple[SweepRow, dict]:
    n = spec.n_grid[ni]
    p = spec.p_rule.value_at(n)
    q = spec.q_rule.value_at(n)
    family = spec.families[fi]
    prior, hyper = _cell_prior(spec, family, n, p)
    query = _cell_query(spec, n, p, q, prior, Delta, d)
    report = family_lower_bound(query)
    dominating = ""
    if spec.schedule_mode == "scheduled" and family != "gaussian_oracle":
        schedule = ScheduleSpec(family=family, C=spec.C, rho=spec.rho)
        try:
            terms = neg_log_decomposition(query, schedule)
            dominating = next(t.name for t in terms if t.dominating)
        except ValueError as exc:  # outside the expansion's regime
            log.warning("no decomposition at n=%d family=%s: %s", n, family, exc)
    row = SweepRow(
        n=n,
        p=p,
        q=q,
        family=family,
        hyper_value=hyper,
        ball_exclusion_median=None,
        ball_exclusion_iqr=None,
        neg_log_bound=report.neg_log_bound,
        bound_satisfied=report.satisfied,
        lemma1_type1=None,
        lemma1_bound=None,
        seeds_used="",
    )
    C = spec.C if spec.schedule_mode == "scheduled" else None
    return row, bound_row(query, report, C=C, dominating_term=dominating)


def run_concentration_sweep(
    spec: SweepSpec, Delta: float, d: float, jobs: int = 1
) -> list[SweepRow]:
    """Bound-only sweep over (n, family); no data, no sampler, cheap at any n."""
    return [row for row, _ in _concentration_cells(spec, Delta, d, jobs)]


def concentration_bound_table(
    spec: SweepSpec, Delta: float, d: float, jobs: int = 1
) -> list[dict]:
    """Same cells as run_concentration_sweep in the richer bound-report
    schema, including each cell's dominating decomposition term."""
    return [table_row for _, table_row in _concentration_cells(spec, Delta, d, jobs)]


def _concentration_cells(
    spec: SweepSpec, Delta: float, d: float, jobs: int
) -> list[tuple[SweepRow, dict]]:
    if not (math.isfinite(Delta) and Delta > 0):
        raise ValueError(f"Delta must be positive and finite, got {Delta}")
    if not (math.isfinite(d) and d > 0):
        raise ValueError(f"d must be positive and finite, got {d}")
    cells = [
        (ni, fi, Delta, d)
        for ni in range(len(spec.n_grid))
        for fi in range(len(spec.families))
    ]
    return _map_cells(_concentration_cell, spec, cells, jobs)


def _lemma1_cell(spec: SweepSpec, ni: int) -> tuple[SweepRow, dict]:
    n = spec.n_grid[ni]
    p = spec.p_rule.value_at(n)
    q = spec.q_rule.value_at(n)
    data_seed = _data_seed(spec.base_seed, ni * spec.replicates)
    trials = spec.replicates
    type1 = math.nan
    type2 = math.nan
    bound = math.nan
    seeds = ""
    if n >= 8 * p:
        config = ModelConfig(
            n=n,
            p=p,
            q=q,
            sigma2=spec.sigma2,
            beta_nonzero=_cycle_values(spec.beta_nonzero, q),
            design_kind=IIDGaussian(),
            seed=data_seed,
        )
        result = type1_error_mc(config, spec.epsilon, trials, seed=data_seed)
        type1 = result.rate
        type2 = type2_error_mc(
            config, spec.epsilon, LEMMA1_DIRECTIONS, trials, seed=_sampler_seed(data_seed)
        )
        if result.chi2_valid:
            bound = result.bound
        else:
            log.warning("bound outside chi-square validity at n=%d, p=%d; flagged", n, p)
        seeds = str(data_seed)
    else:
        log.warning("cell n=%d, p=%d skipped: needs n >= 8p", n, p)
    row = SweepRow(
        n=n,
        p=p,
        q=q,
        family="none",
        hyper_value=None,
        ball_exclusion_median=None,
        ball_exclusion_iqr=None,
        neg_log_bound=None,
        bound_satisfied=None,
        lemma1_type1=type1,
        lemma1_bound=bound,
        seeds_used=seeds,
    )
    table_row = {
        "n": n,
        "p": p,
        "epsilon": spec.epsilon,
        "type1_rate": type1,
        "type2_max_rate": type2,
        "bound": bound,
        "n_trials": trials,
        "seed": data_seed,
    }
    return row, table_row


def run_lemma1_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Test error-vs-bound sweep; replicates plays the Monte Carlo trial count.

    Cells with n < 8p are skipped but still emitted, flagged by NaN columns;
    cells outside the chi-square tail bound's validity keep their MC rate but
    flag the bound column.
    """
    return [row for row, _ in _lemma1_cells(spec, jobs)]


def lemma1_test_table(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """Same cells as run_lemma1_sweep in the test-error CSV schema,
    including the boundary type-II rates."""
    return [table_row for _, table_row in _lemma1_cells(spec, jobs)]


def _lemma1_cells(spec: SweepSpec, jobs: int) -> list[tuple[SweepRow, dict]]:
    cells = [(ni,) for ni in range(len(spec.n_grid))]
    return _map_cells(_lemma1_cell, spec, cells, jobs)


def _map_cells(fn, spec: SweepSpec, cells: list[tuple], jobs: int) -> list:
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    if jobs == 1 or len(cells) <= 1:
        return [fn(spec, *args) for args in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so row order stays (n, family)
        return list(pool.map(fn, *zip(*[(spec, *args) for args in cells])))


def sweep_spec_to_json(spec: SweepSpec) -> dict:
    initial = spec.sampler.initial
    if isinstance(initial, np.ndarray):
        initial = [float(x) for x in initial]
    return {
        "n_grid": list(spec.n_grid),
        "p_rule": {"kind": spec.p_rule.kind, "value": spec.p_rule.value},
        "q_rule": {"kind": spec.q_rule.kind, "value": spec.q_rule.value},
        "epsilon": spec.epsilon,
        "rho": spec.rho,
        "C": spec.C,
        "families": list(spec.families),
        "replicates": spec.replicates,
        "sampler": {
            "iterations": spec.sampler.iterations,
            "burn_in": spec.sampler.burn_in,
            "initial": initial,
            "proposal_scale_init": spec.sampler.proposal_scale_init,
            "adapt": spec.sampler.adapt,
            "seed": spec.sampler.seed,
        },
        "base_seed": spec.base_seed,
        "sigma2": spec.sigma2,
        "beta_nonzero": list(spec.beta_nonzero),
        "schedule_mode": spec.schedule_mode,
        "fixed_hyper": spec.fixed_hyper,
        "shapes": dict(spec.shapes) if spec.shapes else None,
    }


_SPEC_REQUIRED = (
    "n_grid",
    "p_rule",
    "q_rule",
    "epsilon",
    "rho",
    "C",
    "families",
    "replicates",
    "sampler",
    "base_seed",
)
_SPEC_OPTIONAL = ("sigma2", "beta_nonzero", "schedule_mode", "fixed_hyper", "shapes")


def sweep_spec_from_json(obj: dict) -> SweepSpec:
    """Parse and validate a sweep spec; errors name the offending field."""
    if not isinstance(obj, dict):
        raise ValueError(f"sweep spec must be a JSON object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - set(_SPEC_REQUIRED) - set(_SPEC_OPTIONAL))
    if unknown:
        raise ValueError(f"unknown sweep spec field(s): {', '.join(unknown)}")
    missing = [key for key in _SPEC_REQUIRED if key not in obj]
    if missing:
        raise ValueError(f"sweep spec missing required field(s): {', '.join(missing)}")
    extras = {key: obj[key] for key in _SPEC_OPTIONAL if key in obj and obj[key] is not None}
    return SweepSpec(
        n_grid=tuple(obj["n_grid"]),
        p_rule=_rule_from_json("p_rule", obj["p_rule"]),
        q_rule=_rule_from_json("q_rule", obj["q_rule"]),
        epsilon=float(obj["epsilon"]),
        rho=float(obj["rho"]),
        C=float(obj["C"]),
        families=tuple(obj["families"]),
        replicates=int(obj["replicates"]),
        sampler=_sampler_from_json(obj["sampler"]),
        base_seed=int(obj["base_seed"]),
        **extras,
    )


def _rule_from_json(field: str, obj) -> GridRule:
    if not isinstance(obj, dict) or set(obj) != {"kind", "value"}:
        raise ValueError(f"{field} must be an object with fields 'kind' and 'value'")
    return GridRule(kind=obj["kind"], value=float(obj["value"]))


def _sampler_from_json(obj) -> SamplerConfig:
    if not isinstance(obj, dict):
        raise ValueError("sampler must be a JSON object")
    known = {"iterations", "burn_in", "initial", "proposal_scale_init", "adapt", "seed"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ValueError(f"unknown sampler field(s): {', '.join(unknown)}")
    for key in ("iterations", "burn_in"):
        if key not in obj:
            raise ValueError(f"sampler missing required field {key!r}")
    kwargs = dict(obj)
    initial = kwargs.get("initial")
    if isinstance(initial, list):
        kwargs["initial"] = np.asarray(initial, dtype=float)
    return SamplerConfig(**kwargs)


def write_sweep_rows(path: str | Path, rows: list[SweepRow]) -> None:
    """Fixed column order, floats via repr so read-write round-trips are
    byte-identical, None as the empty cell."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_csv_cell(getattr(row, col)) for col in SWEEP_COLUMNS])


def read_sweep_rows(path: str | Path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SWEEP_COLUMNS:
            raise ValueError(f"unexpected sweep CSV header {header!r}")
        rows = []
        for record in reader:
            cells = dict(zip(SWEEP_COLUMNS, record))
            rows.append(
                SweepRow(
                    n=int(cells["n"]),
                    p=int(cells["p"]),
                    q=int(cells["q"]),
                    family=cells["family"],
                    hyper_value=_parse_optional_float(cells["hyper_value"]),
                    ball_exclusion_median=_parse_optional_float(cells["ball_exclusion_median"]),
                    ball_exclusion_iqr=_parse_optional_float(cells["ball_exclusion_iqr"]),
                    neg_log_bound=_parse_optional_float(cells["neg_log_bound"]),
                    bound_satisfied=_parse_optional_bool(cells["bound_satisfied"]),
                    lemma1_type1=_parse_optional_float(cells["lemma1_type1"]),
                    lemma1_bound=_parse_optional_float(cells["lemma1_bound"]),
                    seeds_used=cells["seeds_used"],
                )
            )
    return rows


def _parse_optional_float(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def _parse_optional_bool(cell: str) -> Optional[bool]:
    if cell == "":
        return None
    if cell not in ("true", "false"):
        raise ValueError(f"expected 'true', 'false', or empty, got {cell!r}")
    return cell == "true"


def code_version() -> str:
    """Semver plus short git commit when the source tree is a checkout."""
    try:
        probe = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        commit = probe.stdout.strip() if probe.returncode == 0 else ""
    except OSError:
        commit = ""
    return f"{__version__}+g{commit}" if commit else __version__


def run_sweep_to_dir(
    kind: str,
    spec: SweepSpec,
    out_dir: str | Path,
    Delta: Optional[float] = None,
    d: Optional[float] = None,
    jobs: int = 1,
) -> dict:
    """Run one sweep and write rows.csv plus manifest.json into out_dir.

    Concentration sweeps also write bounds.csv (the bound-report schema with
    dominating-term labels); error-vs-bound sweeps also write rates.csv (the
    test-error schema with type-II rates). Returns the manifest.
    """
    if kind not in SWEEP_KINDS:
        raise ValueError(f"sweep kind must be one of {SWEEP_KINDS}, got {kind!r}")
    if kind != "concentration" and (Delta is not None or d is not None):
        raise ValueError("Delta and d apply only to concentration sweeps")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    if kind == "consistency":
        rows = run_consistency_sweep(spec, jobs=jobs)
    elif kind == "concentration":
        if Delta is None or d is None:
            raise ValueError("concentration sweeps require both Delta and d")
        pairs = _concentration_cells(spec, Delta, d, jobs)
        rows = [row for row, _ in pairs]
        write_bound_rows(out / "bounds.csv", [table_row for _, table_row in pairs])
    else:
        pairs = _lemma1_cells(spec, jobs)
        rows = [row for row, _ in pairs]
        write_test_rows(out / "rates.csv", [table_row for _, table_row in pairs])
    write_sweep_rows(out / "rows.csv", rows)
    manifest = {
        "kind": kind,
        "spec": sweep_spec_to_json(spec),
        "Delta": Delta,
        "d": d,
        "rows": len(rows),
        "version": code_version(),
        "wall_time_seconds": round(time.perf_counter() - started, 3),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
