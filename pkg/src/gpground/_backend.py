"""Import-time choice between the compiled and the pure-Python kernel.

Set ``GPGROUND_KERNEL=python`` to force the fallback, ``=compiled`` to
require the extension (ImportError if it is missing).
"""

import contextlib
import os

from . import _kernel_py

_choice = os.environ.get("GPGROUND_KERNEL", "auto").lower()

if _choice == "python":
    integrate = _kernel_py.integrate
    NAME = "python"
else:
    try:
        from ._kernel import integrate  # type: ignore[attr-defined]
        NAME = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        integrate = _kernel_py.integrate
        NAME = "python"

END = _kernel_py.END
OVERSHOOT = _kernel_py.OVERSHOOT
UNDERSHOOT = _kernel_py.UNDERSHOOT
UNDERFLOW = _kernel_py.UNDERFLOW
MAXSTEPS = _kernel_py.MAXSTEPS


def available() -> dict:
    """Kernels that can be imported in this environment, by name."""
    out = {"python": _kernel_py.integrate}
    try:
        from ._kernel import integrate as compiled
        out["compiled"] = compiled
    except ImportError:
        pass
    return out


@contextlib.contextmanager
def using(name: str):
    """Temporarily route every solve through kernel ``name`` (not thread-safe)."""
    global integrate, NAME
    kernels = available()
    if name not in kernels:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(kernels)}")
    saved = integrate, NAME
    integrate, NAME = kernels[name], name
    try:
        yield
    finally:
        integrate, NAME = saved
