"""Chain kernel backend selection.

Prefers the compiled kernel when the extension was built, falling back to
the NumPy implementation otherwise. Set SHRINKLAB_BACKEND=cython or
SHRINKLAB_BACKEND=python to force a choice; forcing cython without the
compiled extension is a hard error rather than a silent fallback.

Chains are bitwise deterministic per backend; across backends agreement is
statistical, not bitwise, because floating-point evaluation order differs.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SHRINKLAB_BACKEND", "").strip().lower()

if _requested == "python":
    from . import chain_py as _impl

    BACKEND = "python"
elif _requested == "cython":
    from . import _chain as _impl  # noqa: F401  (ImportError is intentional)

    BACKEND = "cython"
elif _requested == "":
    try:
        from . import _chain as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import chain_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"
else:
    raise ValueError(
        f"SHRINKLAB_BACKEND must be 'cython' or 'python', got {_requested!r}"
    )

run_chain = _impl.run_chain

__all__ = ["BACKEND", "run_chain"]
