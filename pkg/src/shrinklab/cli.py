"""Command-line entry point: data generation, checks, bounds, sampling, sweeps.

stdout carries data (JSON), stderr carries logs and one-line error JSON.
Exit codes: 0 success, 1 validation error (bad JSON, bad paths, bad flags),
2 numerical failure. Every command is a pure function of its inputs and the
--seed flag; nothing reads ambient entropy, so repeated invocations are
byte-identical.

Arguments documented as JSON accept either an inline object (first
non-space character '{') or a path to a JSON file. Concentration sweep
specs carry their ball parameters as top-level "Delta" and "d" keys next
to the sweep spec fields; non-finite floats in printed reports appear as
the strings "inf", "-inf", or "nan" to keep the output strict JSON.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .concentration import ConcentrationQuery, family_lower_bound
from .experiments import (
    SWEEP_KINDS,
    _sampler_from_json,
    code_version,
    run_sweep_to_dir,
    sweep_spec_from_json,
)
from .model_core import (
    FixedMatrix,
    IIDGaussian,
    ModelConfig,
    check_assumptions,
    design_summary,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .posterior import sample_posterior, save_draws_csv, save_summary_json, summary_json
from .priors import log_density, prior_from_json

_THRESHOLD_KEYS = ("a1_threshold", "a4_threshold", "a5_threshold", "a2_floor", "a2_ceiling", "a3_bound")
_CONFIG_KEYS = ("n", "p", "q", "sigma2", "beta_nonzero", "design_kind", "seed", "active_indices")
_QUERY_KEYS = ("n", "p", "q", "rho", "Delta", "sup_beta0", "prior", "d")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here is usage text + 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "validation", "message": message}), file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="shrinklab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"shrinklab {code_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-data", help="generate one dataset directory")
    gen.add_argument("--config", required=True, help="model config (JSON object or path)")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed", type=int, default=0, help="seed used when the config omits one")
    gen.set_defaults(func=_cmd_gen_data)

    chk = sub.add_parser(
        "check-assumptions", help="evaluate growth conditions over a config grid"
    )
    chk.add_argument("--spec", required=True, help="assumption spec (JSON object or path)")
    chk.set_defaults(func=_cmd_check_assumptions)

    pev = sub.add_parser("prior-eval", help="evaluate a prior density")
    pev.add_argument("--prior", required=True, help="prior (JSON object or path)")
    where = pev.add_mutually_exclusive_group(required=True)
    where.add_argument("--beta", type=float, help="single evaluation point")
    where.add_argument("--grid", help="lo:hi:count evaluation grid")
    pev.set_defaults(func=_cmd_prior_eval)

    bnd = sub.add_parser("bound", help="prior mass lower bound for a query")
    bnd.add_argument("--query", required=True, help="concentration query (JSON object or path)")
    bnd.set_defaults(func=_cmd_bound)

    smp = sub.add_parser("sample", help="run the posterior sampler")
    smp.add_argument("--data", required=True, help="dataset directory from gen-data")
    smp.add_argument("--prior", required=True, help="prior (JSON object or path)")
    smp.add_argument("--sampler", required=True, help="sampler config (JSON object or path)")
    smp.add_argument("--out", required=True, help="output directory")
    smp.add_argument("--seed", type=int, default=0, help="seed used when the sampler omits one")
    smp.set_defaults(func=_cmd_sample)

    swp = sub.add_parser("sweep", help="run a grid sweep into a directory")
    swp.add_argument("kind", choices=SWEEP_KINDS)
    swp.add_argument("--spec", required=True, help="sweep spec (JSON object or path)")
    swp.add_argument("--out", required=True, help="output directory")
    swp.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel cells")
    swp.add_argument("--seed", type=int, default=0, help="base_seed used when the spec omits one")
    swp.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:  # --version/-h exit 0, usage errors exit 1
        return int(stop.code or 0)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    try:
        args.func(args)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        # before ValueError: numpy derives LinAlgError from it
        print(json.dumps({"error": "numerical", "message": str(exc)}), file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": "validation", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


def _json_arg(value: str, what: str) -> dict:
    """Inline JSON object or a path to one; errors point at the field."""
    text = value
    if not value.lstrip().startswith("{"):
        path = Path(value)
        if not path.exists():
            raise ValueError(f"{what}: no such file {value!r}")
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"{what}: expected a JSON object, got {type(obj).__name__}")
    return obj


def _require(obj: dict, keys: tuple, known: tuple, what: str) -> None:
    unknown = sorted(set(obj) - set(known))
    if unknown:
        raise ValueError(f"{what}: unknown field(s): {', '.join(unknown)}")
    missing = [key for key in keys if key not in obj]
    if missing:
        raise ValueError(f"{what}: missing required field(s): {', '.join(missing)}")


def _jsonable(value):
    """Map non-finite floats to strings so the output stays strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {key: _jsonable(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(val) for val in value]
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(_jsonable(payload), indent=2, sort_keys=True))


def _model_config_from_json(obj: dict, default_seed: int) -> ModelConfig:
    _require(obj, ("n", "p", "q", "sigma2", "beta_nonzero"), _CONFIG_KEYS, "config")
    kind = obj.get("design_kind", "iid_gaussian")
    if kind == "iid_gaussian":
        design = IIDGaussian()
    elif isinstance(kind, dict) and kind.get("kind") == "fixed_matrix":
        if "matrix" not in kind:
            raise ValueError("config: fixed_matrix design needs a 'matrix' field")
        design = FixedMatrix(matrix=np.asarray(kind["matrix"], dtype=float))
    else:
        raise ValueError(
            "config: design_kind must be 'iid_gaussian' or "
            f"{{'kind': 'fixed_matrix', 'matrix': ...}}, got {kind!r}"
        )
    active = obj.get("active_indices")
    return ModelConfig(
        n=int(obj["n"]),
        p=int(obj["p"]),
        q=int(obj["q"]),
        sigma2=float(obj["sigma2"]),
        beta_nonzero=tuple(float(b) for b in obj["beta_nonzero"]),
        design_kind=design,
        seed=int(obj.get("seed", default_seed)),
        active_indices=tuple(int(i) for i in active) if active is not None else None,
    )


def _query_from_json(obj: dict) -> ConcentrationQuery:
    _require(obj, ("n", "p", "q", "rho", "Delta", "sup_beta0", "prior"), _QUERY_KEYS, "query")
    return ConcentrationQuery(
        n=int(obj["n"]),
        p=int(obj["p"]),
        q=int(obj["q"]),
        rho=float(obj["rho"]),
        Delta=float(obj["Delta"]),
        sup_beta0=float(obj["sup_beta0"]),
        prior=prior_from_json(obj["prior"]),
        d=float(obj["d"]) if obj.get("d") is not None else None,
    )


def _cmd_gen_data(args) -> None:
    config = _model_config_from_json(_json_arg(args.config, "config"), args.seed)
    dataset = generate_dataset(config)
    save_dataset(dataset, args.out, config)
    summary = design_summary(dataset.X)
    _emit(
        {
            "out": args.out,
            "n": config.n,
            "p": config.p,
            "q": config.q,
            "seed": config.seed,
            "lambda_min_scaled": summary.lambda_min_scaled,
            "lambda_max_scaled": summary.lambda_max_scaled,
        }
    )


def _cmd_check_assumptions(args) -> None:
    obj = _json_arg(args.spec, "assumption spec")
    _require(obj, ("rho", "grid"), ("rho", "grid") + _THRESHOLD_KEYS, "assumption spec")
    if not isinstance(obj["grid"], list) or not obj["grid"]:
        raise ValueError("assumption spec: grid must be a nonempty list of configs")
    grid = [_model_config_from_json(entry, default_seed=i) for i, entry in enumerate(obj["grid"])]
    thresholds = {key: float(obj[key]) for key in _THRESHOLD_KEYS if key in obj}
    report = check_assumptions(grid, float(obj["rho"]), **thresholds)
    _emit(
        {
            "rho": report.rho,
            "verdicts": report.verdicts,
            "thresholds": report.thresholds,
            "rows": [dataclasses.asdict(row) for row in report.rows],
        }
    )


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like lo:hi:count, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2 or not lo < hi:
        raise ValueError(f"grid needs lo < hi and count >= 2, got {text!r}")
    return [float(x) for x in np.linspace(lo, hi, count)]


def _cmd_prior_eval(args) -> None:
    prior = prior_from_json(_json_arg(args.prior, "prior"))
    if args.beta is not None:
        logd = log_density(prior, args.beta)
        _emit(
            {
                "family": prior.family,
                "beta": args.beta,
                "log_density": logd,
                "density": math.exp(logd),
            }
        )
        return
    betas = _parse_grid(args.grid)
    logds = [log_density(prior, b) for b in betas]
    _emit(
        {
            "family": prior.family,
            "beta": betas,
            "log_density": logds,
            "density": [math.exp(v) for v in logds],
        }
    )


def _cmd_bound(args) -> None:
    query = _query_from_json(_json_arg(args.query, "query"))
    report = family_lower_bound(query)
    _emit(dataclasses.asdict(report))


def _cmd_sample(args) -> None:
    dataset, meta = load_dataset(args.data)
    if "sigma2" not in meta:
        raise ValueError(f"dataset meta at {args.data} lacks sigma2")
    prior = prior_from_json(_json_arg(args.prior, "prior"))
    sampler_obj = _json_arg(args.sampler, "sampler")
    sampler_obj.setdefault("seed", args.seed)
    cfg = _sampler_from_json(sampler_obj)
    samples = sample_posterior(dataset, float(meta["sigma2"]), prior, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_draws_csv(samples, out / "draws.csv")
    save_summary_json(samples, out / "summary.json", seed=cfg.seed)
    _emit(summary_json(samples, seed=cfg.seed))


def _cmd_sweep(args) -> None:
    obj = _json_arg(args.spec, "sweep spec")
    Delta = obj.pop("Delta", None)
    d = obj.pop("d", None)
    obj.setdefault("base_seed", args.seed)
    spec = sweep_spec_from_json(obj)
    manifest = run_sweep_to_dir(
        args.kind,
        spec,
        args.out,
        Delta=float(Delta) if Delta is not None else None,
        d=float(d) if d is not None else None,
        jobs=args.jobs,
    )
    _emit(manifest)


if __name__ == "__main__":
    sys.exit(main())
