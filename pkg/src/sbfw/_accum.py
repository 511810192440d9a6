"""Compensated (Neumaier) cumulative summation.

Walks carry up to ~1e7 jump masses whose prefix sums feed sqrt(n)-scale
fluctuation statistics; plain running sums would shed digits there.  The
kernel is jitted on first use and cached, so the import stays cheap.
"""

from __future__ import annotations

import numpy as np

_kernel = None


def _build_kernel():
    from numba import njit

    @njit(cache=True)
    def neumaier_cumsum(values):  # pragma: no cover - exercised via wrapper
        out = np.empty_like(values)
        total = 0.0
        comp = 0.0
        for i in range(values.shape[0]):
            v = values[i]
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
            out[i] = total + comp
        return out

    return neumaier_cumsum


def compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Cumulative sum of a 1-d float64 array with Neumaier compensation."""
    global _kernel
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.size == 0:
        return values.copy()
    if _kernel is None:
        _kernel = _build_kernel()
    return _kernel(values)
