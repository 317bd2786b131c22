"""Independently coded classical discretizations used as cross-checks.

These deliberately share no machinery with the product-integration
operators: Grünwald-Letnikov uses binomial convolution weights on a uniform
grid, the L1 scheme uses the standard piecewise-linear Caputo kernel sums,
and the Hilfer reference composes the two. They are first/low order and
exist purely so the staged-operator reductions can be verified against a
different discretization family.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .errors import GridError


def _check_uniform(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=float)
    h = np.diff(t)
    if t[0] != 0.0 or np.any(h <= 0):
        raise GridError("need a strictly increasing grid from 0")
    if not np.allclose(h, h[0], rtol=1e-12, atol=0):
        raise GridError("Grünwald-Letnikov and L1 references need uniform grids")
    return float(h[0])


def gl_weights(order: float, n: int) -> np.ndarray:
    """Binomial weights (-1)**k C(order, k), by the stable recurrence."""
    w = np.empty(n)
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[k - 1] * (k - 1.0 - order) / k
    return w


def grunwald_letnikov(values: np.ndarray, t: np.ndarray, order: float) -> np.ndarray:
    """Grünwald-Letnikov approximation of D^order (order > 0) or J^{-order}.

    First-order accurate; returns samples on the same grid.
    """
    h = _check_uniform(t)
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    w = gl_weights(order, n)
    out = fftconvolve(w, values)[:n]
    return out * h ** (-order)


def caputo_l1(values: np.ndarray, t: np.ndarray, zeta: float) -> np.ndarray:
    """Classic L1 scheme for the Caputo derivative of order zeta in (0, 1)."""
    if not 0.0 < zeta < 1.0:
        raise ValueError(f"L1 scheme needs order in (0, 1), got {zeta}")
    h = _check_uniform(t)
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    from scipy.special import gamma

    j = np.arange(n)
    b = (j + 1.0) ** (1.0 - zeta) - j ** (1.0 - zeta)
    dv = np.diff(values, axis=0)
    out = np.zeros_like(values)
    conv = fftconvolve(b[: n - 1], dv)[: n - 1]
    out[1:] = conv * h**-zeta / gamma(2.0 - zeta)
    return out


def hilfer_reference(
    values: np.ndarray, t: np.ndarray, order: float, kind: float
) -> np.ndarray:
    """Hilfer derivative of order in (0,1) and type in [0,1], by composition.

    Uses the identity: first a Riemann-Liouville derivative of order
    order + kind*(1 - order), then a fractional integral of order
    kind*(1 - order); both pieces are Grünwald-Letnikov.
    """
    if not 0.0 < order < 1.0:
        raise ValueError(f"need order in (0, 1), got {order}")
    if not 0.0 <= kind <= 1.0:
        raise ValueError(f"need type in [0, 1], got {kind}")
    inner_order = order + kind * (1.0 - order)
    mid = grunwald_letnikov(values, t, inner_order)
    if kind == 0.0:
        return mid
    return grunwald_letnikov(mid, t, -kind * (1.0 - order))
