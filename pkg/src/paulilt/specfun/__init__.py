"""Modified Bessel primitives with a compiled core and a NumPy fallback.

The Cython extension ``_corex`` is preferred when it built; otherwise the
pure twin ``_core`` serves identical semantics.  Set ``PAULILT_PURE=1`` to
force the fallback (the benchmark and the twin-consistency tests do).

Exports
-------
bessel_i(nu, z, scaled=False)       I_nu, optionally e^{-z}-scaled
bessel_k(nu, z, scaled=False)       K_nu, optionally e^{+z}-scaled
bessel_k_diff(nu, z, scaled=False)  K_nu - K_0 without large-z cancellation
bessel_i_diff(nu, z, scaled=False)  I_0 - I_nu without large-z cancellation
log_gamma(x)                        log |Gamma(x)| (libm lgamma)
wronskian_residual(nu, z)           |z (I_nu K_nu' ... ) + 1| consistency probe
BACKEND                             "compiled" or "pure"
"""

from __future__ import annotations

import math
import os

import numpy as np

if os.environ.get("PAULILT_PURE"):
    from . import _core as _impl

    BACKEND = "pure"
else:
    try:
        from . import _corex as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _core as _impl

        BACKEND = "pure"

bessel_i = _impl.bessel_i
bessel_k = _impl.bessel_k
bessel_i_diff = _impl.bessel_i_diff
bessel_k_diff = _impl.bessel_k_diff

__all__ = [
    "bessel_i",
    "bessel_k",
    "bessel_i_diff",
    "bessel_k_diff",
    "log_gamma",
    "wronskian_residual",
    "BACKEND",
]


def log_gamma(x):
    """log Gamma(x) for x > 0 (libm lgamma; relative error well under 1e-12)."""
    if np.ndim(x) == 0:
        if x <= 0:
            raise ValueError("log_gamma requires x > 0")
        return math.lgamma(x)
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("log_gamma requires x > 0")
    out = np.empty_like(arr)
    flat_in, flat_out = arr.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = math.lgamma(v)
    return out


def wronskian_residual(nu: float, z):
    """|z (I_nu(z) K_{nu+1}(z) + I_{nu+1}(z) K_nu(z)) - 1|.

    The Wronskian identity z (I_nu K_{nu+1} + I_{nu+1} K_nu) = 1 couples all
    four branch maps; the residual is evaluated from the scaled variants so
    both overflow and underflow cancel exactly.
    """
    prod = (bessel_i(nu, z, scaled=True) * bessel_k(nu + 1.0, z, scaled=True)
            + bessel_i(nu + 1.0, z, scaled=True) * bessel_k(nu, z, scaled=True))
    return np.abs(np.asarray(z, dtype=float) * prod - 1.0) if np.ndim(z) else abs(z * prod - 1.0)
