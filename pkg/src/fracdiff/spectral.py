"""Eigenpairs and sine-family transforms for the involution spectral problem.

The second-derivative operator with a mirrored-argument coupling,
X''(x) - eps * X''(pi - x) + lam * X(x) = 0 on (0, pi) with Dirichlet ends,
keeps the classical sine eigenfunctions but splits their eigenvalues into
three families according to the reflection symmetry of sin(n x):

    first:        n = 1,      lam = (1 - eps)
    odd (k >= 1): n = 2k + 1, lam = (1 - eps) (2k+1)^2   (symmetric modes)
    even (k >= 1): n = 2k,    lam = (1 + eps) 4 k^2      (antisymmetric modes)

Together the three families enumerate every sine mode, so they form an
orthonormal basis of L2(0, pi) and all the usual transform machinery
applies; only the eigenvalue bookkeeping is family-dependent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, DomainError, PreconditionError
from .grids import SpaceGridFn

_NORM = math.sqrt(2.0 / math.pi)
_EPS_GUARD = 1.0 - 1e-8


@dataclass(frozen=True)
class SpectralBasis:
    """Involution coupling strength and mode truncation of one basis."""

    epsilon: float
    k_max: int = 64

    def __post_init__(self):
        if not abs(self.epsilon) < _EPS_GUARD:
            raise DomainError(
                f"|epsilon| must stay below 1 (got {self.epsilon}); the spectrum "
                "loses positivity otherwise"
            )
        if self.k_max < 1:
            raise DomainError(f"k_max must be >= 1, got {self.k_max}")

    @property
    def n_modes(self) -> int:
        return 1 + 2 * self.k_max

    def wavenumbers(self) -> np.ndarray:
        """Sine wavenumbers in series order: first, odd k=1..K, even k=1..K."""
        k = np.arange(1, self.k_max + 1)
        return np.concatenate(([1], 2 * k + 1, 2 * k))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues aligned with :meth:`wavenumbers`."""
        k = np.arange(1, self.k_max + 1)
        lam_odd = (1.0 - self.epsilon) * (2 * k + 1) ** 2
        lam_even = (1.0 + self.epsilon) * (2 * k) ** 2
        return np.concatenate(([1.0 - self.epsilon], lam_odd, lam_even))


def eigenvalue(basis: SpectralBasis, family: str, k: int = 0) -> float:
    """Eigenvalue of one mode: family 'first', 'odd' or 'even' (k >= 1)."""
    if family == "first":
        return 1.0 - basis.epsilon
    if k < 1:
        raise IndexError(f"family {family!r} needs k >= 1, got {k}")
    if family == "odd":
        return (1.0 - basis.epsilon) * (2 * k + 1) ** 2
    if family == "even":
        return (1.0 + basis.epsilon) * (2 * k) ** 2
    raise DomainError(f"unknown family {family!r}")


def mode_wavenumber(family: str, k: int = 0) -> int:
    if family == "first":
        return 1
    if k < 1:
        raise IndexError(f"family {family!r} needs k >= 1, got {k}")
    return 2 * k + 1 if family == "odd" else 2 * k


def eigenfunction_values(family: str, k: int, x: np.ndarray) -> np.ndarray:
    n = mode_wavenumber(family, k)
    return _NORM * np.sin(n * np.asarray(x, dtype=float))


def eigenfunction_residual(
    basis: SpectralBasis, family: str, k: int, x_grid: np.ndarray
) -> float:
    """Max interior defect of the eigen-equation, using analytic derivatives."""
    x = np.asarray(x_grid, dtype=float)[1:-1]
    n = mode_wavenumber(family, k)
    lam = eigenvalue(basis, family, k)
    xpp = -(n**2) * _NORM * np.sin(n * x)
    xpp_reflected = -(n**2) * _NORM * np.sin(n * (math.pi - x))
    xval = _NORM * np.sin(n * x)
    res = xpp - basis.epsilon * xpp_reflected + lam * xval
    return float(np.max(np.abs(res)))


@dataclass
class SineSeries:
    """Coefficients in series order: X_1, then odd family, then even family."""

    c1: float
    odd: np.ndarray
    even: np.ndarray

    def __post_init__(self):
        self.odd = np.asarray(self.odd, dtype=float)
        self.even = np.asarray(self.even, dtype=float)
        if self.odd.shape != self.even.shape or self.odd.ndim != 1:
            raise DomainError("odd and even coefficient blocks must be 1-D, equal length")
        if not (
            np.isfinite(self.c1)
            and np.all(np.isfinite(self.odd))
            and np.all(np.isfinite(self.even))
        ):
            raise DomainError("series coefficients must be finite")

    @property
    def k_max(self) -> int:
        return self.odd.size

    def to_array(self) -> np.ndarray:
        return np.concatenate(([self.c1], self.odd, self.even))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "SineSeries":
        values = np.asarray(values, dtype=float)
        k = (values.size - 1) // 2
        return cls(float(values[0]), values[1 : k + 1], values[k + 1 :])

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.to_array() ** 2)))


def _gauss_panels(n_panels: int, pts_per_panel: int = 8):
    nodes, weights = np.polynomial.legendre.leggauss(pts_per_panel)
    edges = np.linspace(0.0, math.pi, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def inner_products_callable(g, basis: SpectralBasis) -> np.ndarray:
    """<g, X_n> for every retained mode by composite Gauss-Legendre.

    Panel count scales with the truncation so the highest retained mode is
    integrated far past quadrature exactness.
    """
    x, w = _gauss_panels(max(4 * basis.k_max, 16))
    gx = np.asarray(g(x), dtype=float)
    ns = basis.wavenumbers()
    return _NORM * (np.sin(np.outer(ns, x)) @ (w * gx))


def project(g, basis: SpectralBasis, boundary_tol: float = 1e-10) -> SineSeries:
    """Expand g over the basis.

    Sampled data (SpaceGridFn) use the trapezoid rule, which is exactly
    orthogonal for sine modes below the grid Nyquist index, so round trips
    through :func:`synthesize` are exact to rounding. Callables use
    composite Gauss-Legendre panels.
    """
    if isinstance(g, SpaceGridFn):
        if g.boundary_magnitude() > boundary_tol:
            raise BoundaryError(
                f"boundary samples reach {g.boundary_magnitude():.3e}, above "
                f"{boundary_tol:.1e}; the basis needs homogeneous Dirichlet data"
            )
        m = g.x_grid.size - 1
        if 2 * basis.k_max + 1 > m - 1:
            raise DomainError(
                f"grid with {m} intervals cannot resolve mode {2 * basis.k_max + 1}"
            )
        h = g.spacing
        ns = basis.wavenumbers()
        coefs = _NORM * h * (np.sin(np.outer(ns, g.x_grid)) @ g.values)
    else:
        coefs = inner_products_callable(g, basis)
    k = basis.k_max
    return SineSeries(float(coefs[0]), coefs[1 : k + 1], coefs[k + 1 :])


def synthesize(series: SineSeries, basis: SpectralBasis, x_grid: np.ndarray) -> SpaceGridFn:
    """Pointwise sum of the truncated series on the given grid."""
    if series.k_max != basis.k_max:
        raise DomainError(
            f"series truncation {series.k_max} does not match basis {basis.k_max}"
        )
    x = np.asarray(x_grid, dtype=float)
    values = _NORM * (series.to_array() @ np.sin(np.outer(basis.wavenumbers(), x)))
    return SpaceGridFn(x, values)


def gram_matrix(basis: SpectralBasis) -> np.ndarray:
    """Quadrature Gram matrix of the retained modes; identity if healthy."""
    x, w = _gauss_panels(max(4 * basis.k_max, 16))
    vals = _NORM * np.sin(np.outer(basis.wavenumbers(), x))
    return (vals * w[None, :]) @ vals.T


@dataclass(frozen=True)
class DecayReport:
    """Worst coefficient-decay ratios |g_k| k^order / ||g^(order)|| per family."""

    first: float
    odd_worst: float
    even_worst: float

    @property
    def worst(self) -> float:
        return max(self.first, self.odd_worst, self.even_worst)


def decay_check(
    g,
    second_derivative,
    basis: SpectralBasis,
    order: int = 2,
    fourth_derivative=None,
    boundary_tol: float = 1e-9,
) -> DecayReport:
    """Measure the k**-order coefficient decay against the derivative norm.

    ``g`` and its supplied derivatives are callables. Hypotheses checked:
    g vanishes at both ends; for order 4 the second derivative does too.
    """
    if order not in (2, 4):
        raise DomainError(f"order must be 2 or 4, got {order}")
    for xb in (0.0, math.pi):
        if abs(g(np.array([xb]))[0]) > boundary_tol:
            raise PreconditionError(f"g({xb}) must vanish")
    if order == 4:
        if fourth_derivative is None:
            raise PreconditionError("order-4 check needs the fourth derivative")
        for xb in (0.0, math.pi):
            if abs(second_derivative(np.array([xb]))[0]) > boundary_tol:
                raise PreconditionError(f"g''({xb}) must vanish for the order-4 bound")
    deriv = second_derivative if order == 2 else fourth_derivative
    x, w = _gauss_panels(max(4 * basis.k_max, 16))
    norm = math.sqrt(float(np.sum(w * np.asarray(deriv(x)) ** 2)))
    series = project(g, basis)
    k = np.arange(1, basis.k_max + 1, dtype=float)
    first = abs(series.c1) * 1.0 / norm
    odd_worst = float(np.max(np.abs(series.odd) * k**order)) / norm
    even_worst = float(np.max(np.abs(series.even) * k**order)) / norm
    return DecayReport(first=first, odd_worst=odd_worst, even_worst=even_worst)
