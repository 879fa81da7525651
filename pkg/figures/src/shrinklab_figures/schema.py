"""Reader for the sweep row CSV contract.

Independent copy of the producer's column contract: the columns below, in
this exact order, floats serialized via repr (so "inf" and "nan" are legal
cells), booleans as "true"/"false", absent values as empty cells. This
package never imports the producer; the fixture tests pin the two sides
against each other.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

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

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SweepRow:
    n: int
    p: int
    q: int
    family: str
    hyper_value: float | None
    ball_exclusion_median: float | None
    ball_exclusion_iqr: float | None
    neg_log_bound: float | None
    bound_satisfied: bool | None
    lemma1_type1: float | None
    lemma1_bound: float | None
    seeds_used: str


def _column_diff(got: list[str]) -> str:
    expected = set(SWEEP_COLUMNS)
    seen = set(got)
    parts = []
    missing = sorted(expected - seen)
    unexpected = sorted(seen - expected)
    if missing:
        parts.append(f"missing: {', '.join(missing)}")
    if unexpected:
        parts.append(f"unexpected: {', '.join(unexpected)}")
    if not parts:
        parts.append(f"column order differs: got {', '.join(got)}")
    return "; ".join(parts)


def _opt_float(cell: str, column: str, line: int) -> float | None:
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"line {line}, column {column}: not a number: {cell!r}") from None


def _opt_bool(cell: str, column: str, line: int) -> bool | None:
    if cell == "":
        return None
    if cell == "true":
        return True
    if cell == "false":
        return False
    raise ValueError(f"line {line}, column {column}: not a boolean: {cell!r}")


def read_sweep_csv(path: str | Path) -> list[SweepRow]:
    """Parse a sweep CSV, enforcing the exact header. Raises ValueError on
    any schema or cell problem, naming the offending columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected header {', '.join(SWEEP_COLUMNS)}")
        if tuple(header) != SWEEP_COLUMNS:
            raise ValueError(f"{path}: header mismatch ({_column_diff(header)})")
        rows = []
        for line, cells in enumerate(reader, start=2):
            if len(cells) != len(SWEEP_COLUMNS):
                raise ValueError(f"{path}: line {line}: {len(cells)} cells, expected {len(SWEEP_COLUMNS)}")
            rows.append(
                SweepRow(
                    n=int(cells[0]),
                    p=int(cells[1]),
                    q=int(cells[2]),
                    family=cells[3],
                    hyper_value=_opt_float(cells[4], "hyper_value", line),
                    ball_exclusion_median=_opt_float(cells[5], "ball_exclusion_median", line),
                    ball_exclusion_iqr=_opt_float(cells[6], "ball_exclusion_iqr", line),
                    neg_log_bound=_opt_float(cells[7], "neg_log_bound", line),
                    bound_satisfied=_opt_bool(cells[8], "bound_satisfied", line),
                    lemma1_type1=_opt_float(cells[9], "lemma1_type1", line),
                    lemma1_bound=_opt_float(cells[10], "lemma1_bound", line),
                    seeds_used=cells[11],
                )
            )
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def read_manifest(csv_path: str | Path) -> dict | None:
    """Load the manifest.json sitting next to a sweep CSV, if there is one.

    The manifest carries the schedule parameters (C, rho, schedule mode)
    that the row schema itself does not; figures use it for legend text.
    Returns None when absent; a present but unparseable manifest is an error.
    """
    candidate = Path(csv_path).parent / MANIFEST_NAME
    if not candidate.is_file():
        return None
    with open(candidate) as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{candidate}: invalid manifest JSON: {exc}") from None
    if not isinstance(manifest, dict):
        raise ValueError(f"{candidate}: manifest must be a JSON object")
    return manifest
