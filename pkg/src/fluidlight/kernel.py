"""Kernel backend selection.

The event-driven integrator exists twice: a compiled Cython extension
(_kernel_cy) and a pure-Python reference (_kernel_py).  The compiled one is
used when it imported cleanly; set FLUIDLIGHT_PURE_KERNEL=1 to force the
pure-Python backend.  Both produce bit-identical results.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernel_py

try:
    from . import _kernel_cy
except ImportError:  # extension not built
    _kernel_cy = None

if os.environ.get("FLUIDLIGHT_PURE_KERNEL") == "1" or _kernel_cy is None:
    _impl = _kernel_py
    BACKEND = "python"
else:
    _impl = _kernel_cy
    BACKEND = "cython"

EPS = _kernel_py.EPS

RED_START = _kernel_py.RED_START
GREEN_START = _kernel_py.GREEN_START
BUFFER_EMPTY = _kernel_py.BUFFER_EMPTY
BUFFER_NONEMPTY = _kernel_py.BUFFER_NONEMPTY
RAMP_SATURATION = _kernel_py.RAMP_SATURATION
ARRIVAL_CHANGE = _kernel_py.ARRIVAL_CHANGE
HORIZON = _kernel_py.HORIZON


def available_backends() -> dict:
    """Backend name -> kernel module, for tests and benchmarks."""
    out = {"python": _kernel_py}
    if _kernel_cy is not None:
        out["cython"] = _kernel_cy
    return out


def integrate(theta, C, N, x0, beta_max, ramp_rate, bounds, rates, impl=None):
    """Run the integrator on the selected (or explicitly given) backend."""
    mod = _impl if impl is None else impl
    if mod is _kernel_py:
        b = [float(v) for v in bounds]
        r = [float(v) for v in rates]
    else:
        b = np.ascontiguousarray(bounds, dtype=np.float64)
        r = np.ascontiguousarray(rates, dtype=np.float64)
    return mod.integrate(
        float(theta), float(C), int(N), float(x0), float(beta_max),
        float(ramp_rate), b, r,
    )
