"""Input-validation helpers shared by the solvers and estimators."""

from __future__ import annotations

import numpy as np

from .errors import BoundaryError, DomainError, PreconditionError
from .grids import SpaceGridFn

BOUNDARY_TOL = 1e-10
CURVATURE_TOL = 1e-6


def check_epsilon(epsilon: float) -> float:
    if not abs(epsilon) < 1.0:
        raise DomainError(f"|epsilon| must be < 1, got {epsilon}")
    return float(epsilon)


def check_dirichlet(g: SpaceGridFn, tol: float = BOUNDARY_TOL) -> SpaceGridFn:
    if g.boundary_magnitude() > tol:
        raise BoundaryError(
            f"boundary samples reach {g.boundary_magnitude():.3e}, above {tol:.1e}"
        )
    return g


def boundary_curvature(g: SpaceGridFn) -> float:
    """One-sided 4th-order second differences of the samples at both ends.

    High order keeps the check's own truncation error well below the
    admissibility tolerance on resolved data.
    """
    from .grids import fd_weights

    v = g.values
    x = g.x_grid
    wl = fd_weights(x[:6], x[0], 2)
    wr = fd_weights(x[-6:], x[-1], 2)
    return max(abs(wl @ v[:6]), abs(wr @ v[-6:]))


def check_final_data(psi: SpaceGridFn) -> SpaceGridFn:
    """Snapshot admissibility: flat and curvature-free at both ends.

    The vanishing second derivatives are what give snapshot coefficients
    their k**-4 decay, which the series reconstruction relies on. The
    curvature estimate is stencil-limited, so a value above tolerance is
    accepted when halving the resolution shrinks it the way a pure
    truncation artifact must; a genuine violation is resolution-stable.
    """
    check_dirichlet(psi)
    scale = max(1.0, float(np.max(np.abs(psi.values))))
    curv = boundary_curvature(psi)
    if curv <= CURVATURE_TOL * scale:
        return psi
    m = psi.x_grid.size - 1
    if m % 2 == 0 and m >= 12:
        coarse = SpaceGridFn(psi.x_grid[::2], psi.values[::2])
        curv_coarse = boundary_curvature(coarse)
        if curv <= 0.35 * curv_coarse:
            return psi
    raise PreconditionError(
        f"snapshot curvature at the boundary is {curv:.3e}; the recovery "
        "needs psi'' to vanish at both ends"
    )
