"""Force-evaluation kernel backends.

The compiled extension and the pure-Python fallback implement the same
``evaluate`` entry point over flat arrays.  The compiled backend is
preferred when present; set ``SCENEOPT_PURE_PYTHON=1`` to force the
fallback (useful for benchmarking and debugging).
"""

import os

__all__ = ["evaluate", "BACKEND", "available_backends"]

if os.environ.get("SCENEOPT_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import pyfallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import pyfallback as _impl  # type: ignore[no-redef]

        BACKEND = "python"

evaluate = _impl.evaluate


def available_backends() -> dict[str, object]:
    """Map of backend name to its evaluate callable (compiled if built)."""
    from . import pyfallback

    out = {"python": pyfallback.evaluate}
    try:
        from . import _core

        out["compiled"] = _core.evaluate
    except ImportError:
        pass
    return out
