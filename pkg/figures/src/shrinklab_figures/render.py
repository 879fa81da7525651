"""Figure rendering from sweep rows.

Three kinds, one renderer: `consistency` plots median ball exclusion vs n
per family, `bound-decay` plots -log(bound)/n vs n per family, `lemma1`
plots the Monte Carlo test error against its exponential bound. Bound
curves are dashed, Monte Carlo curves solid; the legend picks up the
schedule parameters from the manifest sitting next to the input CSV.

Rendering is deterministic: Agg backend, pinned rc parameters, fixed SVG
hash salt, no timestamps in the output. Identical CSV + spec gives
identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .schema import SweepRow, read_manifest, read_sweep_csv

FIGURE_KINDS = ("consistency", "bound-decay", "lemma1")

_OUTPUT_SUFFIXES = (".svg", ".png")

# pinned style: every run of every machine draws the same bytes
_RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "shrinklab-figures",
    "svg.fonttype": "none",
}

_TITLES = {
    "consistency": ("Posterior ball exclusion", "median ball exclusion"),
    "bound-decay": ("Prior concentration bound decay", "-log(bound) / n"),
    "lemma1": ("Ball test error vs exponential bound", "error rate"),
}


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV, figure kind, output image, style knobs.

    log_x / log_y of None mean the kind's default (consistency: log y;
    bound-decay: log x; lemma1: log both). families of None means all
    families present in the CSV.
    """

    input: str
    kind: str
    output: str
    log_x: bool | None = None
    log_y: bool | None = None
    families: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"kind must be one of {', '.join(FIGURE_KINDS)}, got {self.kind!r}")
        if Path(self.output).suffix.lower() not in _OUTPUT_SUFFIXES:
            raise ValueError(f"output must end in .svg or .png, got {self.output!r}")
        if self.families is not None:
            families = tuple(self.families)
            if not families:
                raise ValueError("families subset must not be empty")
            if len(set(families)) != len(families):
                raise ValueError("families subset has duplicates")
            object.__setattr__(self, "families", families)


_SPEC_REQUIRED = ("input", "kind", "output")
_SPEC_OPTIONAL = ("log_x", "log_y", "families")


def figure_spec_from_json(obj: dict) -> FigureSpec:
    if not isinstance(obj, dict):
        raise ValueError("figure spec must be a JSON object")
    known = set(_SPEC_REQUIRED) | set(_SPEC_OPTIONAL)
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ValueError(f"unknown figure spec field(s): {', '.join(unknown)}")
    missing = sorted(k for k in _SPEC_REQUIRED if k not in obj)
    if missing:
        raise ValueError(f"missing required figure spec field(s): {', '.join(missing)}")
    for flag in ("log_x", "log_y"):
        if obj.get(flag) is not None and not isinstance(obj[flag], bool):
            raise ValueError(f"{flag} must be true or false")
    families = obj.get("families")
    if families is not None:
        if not isinstance(families, list) or not all(isinstance(f, str) for f in families):
            raise ValueError("families must be a list of strings")
        families = tuple(families)
    return FigureSpec(
        input=str(obj["input"]),
        kind=str(obj["kind"]),
        output=str(obj["output"]),
        log_x=obj.get("log_x"),
        log_y=obj.get("log_y"),
        families=families,
    )


def _axis_defaults(kind: str) -> tuple[bool, bool]:
    if kind == "consistency":
        return False, True
    if kind == "bound-decay":
        return True, False
    return True, True


def _families_in_order(rows: list[SweepRow]) -> list[str]:
    seen: list[str] = []
    for row in rows:
        if row.family not in seen:
            seen.append(row.family)
    return seen


def _points(rows: list[SweepRow], value) -> tuple[list[int], list[float]]:
    pairs = sorted(
        (row.n, value(row))
        for row in rows
        if value(row) is not None and math.isfinite(value(row))
    )
    return [n for n, _ in pairs], [v for _, v in pairs]


def _lines(spec: FigureSpec, rows: list[SweepRow]) -> list[tuple[str, list[int], list[float], str]]:
    """Assemble (label, xs, ys, linestyle) per curve; drop non-finite points."""
    if spec.families is not None:
        present = set(_families_in_order(rows))
        unknown = sorted(set(spec.families) - present)
        if unknown:
            raise ValueError(
                f"families not in CSV: {', '.join(unknown)} (present: {', '.join(sorted(present))})"
            )
        rows = [row for row in rows if row.family in spec.families]

    lines = []
    if spec.kind == "consistency":
        for family in _families_in_order(rows):
            mine = [row for row in rows if row.family == family]
            xs, ys = _points(mine, lambda r: r.ball_exclusion_median)
            if xs:
                lines.append((family, xs, ys, "-"))
        if not lines:
            raise ValueError("no finite ball_exclusion_median values to plot")
    elif spec.kind == "bound-decay":
        for family in _families_in_order(rows):
            mine = [row for row in rows if row.family == family]
            xs, ys = _points(
                mine,
                lambda r: r.neg_log_bound / r.n
                if r.neg_log_bound is not None and math.isfinite(r.neg_log_bound)
                else None,
            )
            if xs:
                lines.append((family, xs, ys, "--"))
        if not lines:
            raise ValueError("no finite neg_log_bound values to plot")
    else:
        xs, ys = _points(rows, lambda r: r.lemma1_type1)
        if xs:
            lines.append(("type I MC rate", xs, ys, "-"))
        xs, ys = _points(rows, lambda r: r.lemma1_bound)
        if xs:
            lines.append(("exponential bound", xs, ys, "--"))
        if len(lines) < 2:
            raise ValueError("no finite lemma1_type1 / lemma1_bound pairs to plot")
    return lines


def _legend_title(manifest: dict | None) -> str | None:
    if manifest is None:
        return None
    spec = manifest.get("spec")
    if not isinstance(spec, dict):
        return None
    if spec.get("schedule_mode") == "fixed" and spec.get("fixed_hyper") is not None:
        return f"fixed hyper = {spec['fixed_hyper']:g}"
    if spec.get("C") is not None and spec.get("rho") is not None:
        return f"C = {spec['C']:g}, ρ = {spec['rho']:g}"
    return None


def _log_floor(values: list[float], axis: str) -> float:
    positives = [v for v in values if v > 0.0]
    if not positives:
        raise ValueError(f"log {axis} axis requested but no positive values")
    return min(positives) / 10.0


def render(spec: FigureSpec) -> str:
    """Draw the figure and return the output path.

    All reading and validation happens before the first drawing call, so
    a schema mismatch or empty CSV never leaves a partial file behind.
    """
    rows = read_sweep_csv(spec.input)
    manifest = read_manifest(spec.input)
    lines = _lines(spec, rows)

    default_x, default_y = _axis_defaults(spec.kind)
    log_x = default_x if spec.log_x is None else spec.log_x
    log_y = default_y if spec.log_y is None else spec.log_y

    if log_y:
        # log scale cannot show zero rates; pin them one decade below the
        # smallest positive value so the curve stays visible at the floor
        floor = _log_floor([y for _, _, ys, _ in lines for y in ys], "y")
        lines = [(label, xs, [max(y, floor) for y in ys], style) for label, xs, ys, style in lines]

    title, ylabel = _TITLES[spec.kind]
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, xs, ys, style in lines:
            ax.plot(xs, ys, style, marker="o", markersize=4, label=label)
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(title=_legend_title(manifest))
        fig.tight_layout()
        if out.suffix.lower() == ".svg":
            fig.savefig(out, format="svg", metadata={"Date": None})
        else:
            fig.savefig(out, format="png", metadata={"Software": "shrinklab-figures"})
        plt.close(fig)
    return str(out)
