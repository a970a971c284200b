"""Kernel backend selection: compiled extension when built, pure Python
otherwise. ROVERGYM_PURE=1 forces the pure backend. Both backends are
bit-identical; see benchmarks/bench_kernels.py for the speed comparison.
"""

import os

if os.environ.get("ROVERGYM_PURE") == "1":
    from . import pure as impl
    BACKEND = "pure"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import pure as impl
        BACKEND = "pure"


def get_impl(name: str):
    """Fetch a specific backend by name ("pure" or "compiled")."""
    if name == "pure":
        from . import pure
        return pure
    if name == "compiled":
        from . import _core  # raises ImportError when not built
        return _core
    raise ValueError(f"unknown kernel backend {name!r}")
