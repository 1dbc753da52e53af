"""Selects the compiled kernels when available.

Set HGCALC_BACKEND=python to force the pure-numpy fallback even if the
extension was built (used by the benchmark and the parity tests).
"""

import os

if os.environ.get("HGCALC_BACKEND", "").lower() == "python":
    from hgcalc import _kernels_py as _impl
else:
    try:
        from hgcalc import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from hgcalc import _kernels_py as _impl

USING_COMPILED = bool(getattr(_impl, "COMPILED", False))

hermite_table = _impl.hermite_table
laguerre_table = _impl.laguerre_table
twisted_convolve = _impl.twisted_convolve


def fallback():
    """The pure-numpy module, always importable (for cross-checks)."""
    from hgcalc import _kernels_py
    return _kernels_py
