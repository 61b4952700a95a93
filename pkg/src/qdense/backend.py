"""Training-kernel selection.

The compiled extension is preferred when importable; otherwise the
pure-Python kernel takes over with identical semantics. The environment
variable QDENSE_KERNEL ("c" or "python") forces a choice, which the tests
and the kernel benchmark use to pin each side.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:
    _kernel = None

_BY_NAME = {"python": _kernel_py}
if _kernel is not None:
    _BY_NAME["c"] = _kernel


def available_backends() -> list[str]:
    return sorted(_BY_NAME)


def get_kernel(name: str | None = None):
    """Return the kernel module for ``name``, the env override, or the default."""
    if name is None:
        name = os.environ.get("QDENSE_KERNEL", "").strip().lower() or None
    if name is None:
        return _kernel if _kernel is not None else _kernel_py
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; available: {available_backends()}"
        ) from None


def default_backend() -> str:
    return get_kernel().BACKEND
