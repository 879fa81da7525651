"""The `figures` entry point.

One subcommand: `figures render --spec fig.json`. The spec argument takes
inline JSON (first non-space character `{`) or a path to a JSON file.
Exit 0 on success with the output path on stdout; any validation or I/O
problem prints a message to stderr and exits 1.
"""

from __future__ import annotations

import argparse
import json
import sys

from .render import figure_spec_from_json, render


def _spec_arg(value: str) -> dict:
    text = value
    if not value.lstrip().startswith("{"):
        with open(value) as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--spec: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ValueError("--spec: figure spec must be a JSON object")
    return obj


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figures", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="draw one figure from a sweep CSV")
    p_render.add_argument("--spec", required=True, help="figure spec: inline JSON or a path")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        print(render(figure_spec_from_json(_spec_arg(args.spec))))
    except (ValueError, OSError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
