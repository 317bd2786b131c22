"""Grid containers and helpers for time and space discretizations.

Time grids start at 0 and may be graded (clustered near 0) to resolve the
algebraic initial layer of fractional-order evolution. Space grids are
uniform on [0, pi] so that the reflection x -> pi - x maps nodes to nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError


def graded_time_grid(T: float, n: int, gamma: float = 2.0) -> np.ndarray:
    """Nodes t_i = T * (i/n)**gamma for i = 0..n.

    gamma = 1 gives a uniform grid; gamma > 1 clusters nodes near t = 0.
    """
    if T <= 0:
        raise GridError(f"final time must be positive, got {T}")
    if n < 2:
        raise GridError(f"need at least 2 intervals, got {n}")
    if gamma < 1:
        raise GridError(f"grading exponent must be >= 1, got {gamma}")
    i = np.arange(n + 1, dtype=float)
    return T * (i / n) ** gamma


def uniform_space_grid(n: int) -> np.ndarray:
    """n+1 equally spaced nodes on [0, pi], reflection-closed."""
    if n < 2:
        raise GridError(f"need at least 2 intervals, got {n}")
    return np.linspace(0.0, np.pi, n + 1)


def check_time_grid(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise GridError("time grid must be 1-D with at least 3 nodes")
    if t[0] != 0.0:
        raise GridError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise GridError("time grid must be strictly increasing")
    return t


@dataclass
class TimeGridFn:
    """Samples of a function of time on a strictly increasing grid from 0.

    ``values`` may be 1-D (one function) or 2-D with shape (n_nodes, n_cols)
    so that several functions sharing a grid are processed in one pass.
    ``weight_exponent`` w means the stored samples are t**w * g(t); a
    nonzero w tames data that are singular at t = 0.
    """

    t_grid: np.ndarray
    values: np.ndarray
    weight_exponent: float = 0.0

    def __post_init__(self):
        self.t_grid = check_time_grid(self.t_grid)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape[0] != self.t_grid.size:
            raise GridError(
                f"values length {self.values.shape[0]} does not match "
                f"grid length {self.t_grid.size}"
            )

    @property
    def n_nodes(self) -> int:
        return self.t_grid.size

    def unweighted(self) -> "TimeGridFn":
        """Plain samples of g; requires the t=0 sample to stay finite."""
        if self.weight_exponent == 0.0:
            return self
        vals = self.values.copy()
        t = self.t_grid
        scale = np.empty_like(t)
        scale[1:] = t[1:] ** (-self.weight_exponent)
        scale[0] = 0.0
        vals = vals * (scale if vals.ndim == 1 else scale[:, None])
        # the stored sample at 0 is t**w g -> 0 for w > 0; recover the limit
        # of g (if it exists) by extrapolation from the leading nodes
        vals[0] = _extrapolate_to_zero(t[1:4], vals[1:4])
        return TimeGridFn(self.t_grid, vals, 0.0)


def _extrapolate_to_zero(t, v):
    """Quadratic extrapolation of samples at three positive nodes to t = 0."""
    coeffs = np.polynomial.polynomial.polyfit(t, v, 2)
    return coeffs[0] if np.ndim(v) == 1 else coeffs[0, :]


@dataclass
class SpaceGridFn:
    """Samples of a function of x on a uniform grid over [0, pi]."""

    x_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        n = self.x_grid.size - 1
        if n < 2:
            raise GridError("space grid needs at least 3 nodes")
        expected = uniform_space_grid(n)
        if not np.allclose(self.x_grid, expected, rtol=0, atol=1e-12):
            raise GridError("space grid must be uniform on [0, pi]")
        if self.values.shape != self.x_grid.shape:
            raise GridError("values shape must match grid shape")

    @property
    def spacing(self) -> float:
        return self.x_grid[1] - self.x_grid[0]

    def boundary_magnitude(self) -> float:
        return max(abs(self.values[0]), abs(self.values[-1]))


def fd_weights(x: np.ndarray, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights for d^order/dx^order at x0 from nodes x.

    Fornberg's recursion; exact for polynomials up to degree len(x)-1 on
    arbitrary (e.g. graded) node spacing.
    """
    n = len(x)
    if order >= n:
        raise ValueError("need more nodes than the derivative order")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@dataclass
class DifferentiationMatrix:
    """Banded first-derivative operator on a fixed (possibly nonuniform) grid."""

    starts: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, t: np.ndarray, stencil: int = 5) -> "DifferentiationMatrix":
        t = np.asarray(t, dtype=float)
        n = t.size
        stencil = min(stencil, n)
        starts = np.empty(n, dtype=int)
        weights = np.empty((n, stencil))
        half = stencil // 2
        for i in range(n):
            lo = min(max(i - half, 0), n - stencil)
            starts[i] = lo
            weights[i] = fd_weights(t[lo : lo + stencil], t[i], 1)
        return cls(starts, weights)

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        out = np.zeros_like(values)
        s = self.weights.shape[1]
        for i in range(self.weights.shape[0]):
            lo = self.starts[i]
            seg = values[lo : lo + s]
            if values.ndim == 1:
                out[i] = self.weights[i] @ seg
            else:
                out[i] = self.weights[i] @ seg
        return out
