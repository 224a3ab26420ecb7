"""Backend selection for the network stepper.

The compiled Cython kernel is used when the extension built; otherwise the
pure-Python twin takes over. Both consume the same precomputed constants
and noise array and produce bit-identical results. Set VO2ONN_BACKEND to
``cython`` or ``python`` to force one (``cython`` raises if the extension
is missing).
"""
from __future__ import annotations

import os

import numpy as np

from . import _simcore_py

try:
    from . import _simcore_cy
except ImportError:
    _simcore_cy = None

_forced = os.environ.get("VO2ONN_BACKEND", "").lower()
if _forced == "python":
    BACKEND = "python"
elif _forced == "cython":
    if _simcore_cy is None:
        raise ImportError(
            "VO2ONN_BACKEND=cython but the compiled extension is not built; "
            "reinstall with a C compiler available"
        )
    BACKEND = "cython"
elif _forced:
    raise ValueError(f"unknown VO2ONN_BACKEND {_forced!r}; use 'cython' or 'python'")
else:
    BACKEND = "cython" if _simcore_cy is not None else "python"


def run_network(
    u_c: np.ndarray,
    on: np.ndarray,
    u_eff: np.ndarray,
    base_off: np.ndarray,
    base_on: np.ndarray,
    decay_off: float,
    decay_on: float,
    s: np.ndarray,
    noise: np.ndarray,
    u_h: float,
    u_cf: float,
    r_off: float,
    r_on: float,
    currents: np.ndarray | None = None,
    backend: str | None = None,
):
    """Run the stepper on the selected backend; mutates u_c/on/u_eff in place.

    ``noise`` has shape (n_osc, n_steps), one row per oscillator substream.
    Returns one list of OFF->ON timestep indices per oscillator.
    """
    which = backend or BACKEND
    if which == "cython":
        return _simcore_cy.run_network(
            u_c, on, u_eff, base_off, base_on, decay_off, decay_on,
            s, noise, u_h, u_cf, r_off, r_on, currents,
        )
    n_osc, n_steps = noise.shape
    uc_l = u_c.tolist()
    on_l = [int(v) for v in on]
    ueff_l = u_eff.tolist()
    edges = _simcore_py.run_network(
        uc_l, on_l, ueff_l, base_off.tolist(), base_on.tolist(),
        decay_off, decay_on, s.tolist(), noise.ravel().tolist(),
        n_steps, n_osc, u_h, u_cf, r_off, r_on, currents,
    )
    u_c[:] = uc_l
    on[:] = on_l
    u_eff[:] = ueff_l
    return edges
