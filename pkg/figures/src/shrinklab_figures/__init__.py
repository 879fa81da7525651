"""Publication figures from sweep CSV artifacts.

Consumes the sweep row CSV contract (and the sibling manifest.json when
present) purely as files; the producer package is never imported, so this
package installs and runs on any machine that has the artifacts.
"""

from .render import FIGURE_KINDS, FigureSpec, figure_spec_from_json, render
from .schema import SWEEP_COLUMNS, SweepRow, read_manifest, read_sweep_csv

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "SWEEP_COLUMNS",
    "SweepRow",
    "figure_spec_from_json",
    "read_manifest",
    "read_sweep_csv",
    "render",
    "__version__",
]
