"""Series solution of the time-fractional diffusion equation with involution.

The equation on (0, pi) x (0, T],

    (staged fractional operator in t) u - u_xx(x, t) + eps * u_xx(pi - x, t)
        = F(x, t),

with homogeneous Dirichlet ends and initial data prescribed through the
partial-order operators at t = 0, splits over the involution eigenbasis
into independent modal relaxation equations. Each mode solves

    u_k(t) = sum_n phi_kn e[rho_m, rho_n + 1](t; lam_k)
             + f_k e[rho_m, rho_m + 1](t; lam_k)            (static source)
    u_k(t) = ... + (e[rho_m, rho_m](. ; lam_k) * a f_k)(t)  (separable source)

and the solution is re-assembled by sine synthesis. Modal storage carries
the t**rho_m weight from the regular-solution class so the samples stay
finite across the initial layer; the weight is removed only at output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import DomainError, GridError, PreconditionError, TruncationWarning
from ._parallel import parallel_map
from .frac_calculus import FractionalSchedule, dn_apply
from .grids import SpaceGridFn, TimeGridFn, check_time_grid
from .mittag_leffler import conv_operator, ml_e_values
from .spectral import SineSeries, SpectralBasis, project, synthesize


@dataclass(frozen=True)
class SpaceOnlySource:
    """Static source F(x, t) = f(x)."""

    profile: object  # SpaceGridFn or callable


@dataclass(frozen=True)
class SeparableSource:
    """Source F(x, t) = a(t) f(x, t) with the amplitude sampled on the t grid.

    ``profile`` is a callable f(x) (time-independent shape), or a callable
    f(x, t) evaluated per time node when ``time_dependent`` is set.
    """

    amplitude: np.ndarray
    profile: object
    time_dependent: bool = False


@dataclass
class ProblemSpec:
    """Full data of one forward problem; source may be absent for inversion."""

    epsilon: float
    sched: FractionalSchedule
    final_time: float
    phis: Sequence[object] = ()
    source: SpaceOnlySource | SeparableSource | None = None

    def __post_init__(self):
        if not abs(self.epsilon) < 1.0:
            raise DomainError(f"|epsilon| must be < 1, got {self.epsilon}")
        if not 0.0 < self.sched.total_order < 1.0:
            raise DomainError(
                f"total operator order {self.sched.total_order} outside (0, 1)"
            )
        if self.final_time <= 0:
            raise DomainError(f"final time must be positive, got {self.final_time}")
        if len(self.phis) > self.sched.m:
            raise DomainError(
                f"got {len(self.phis)} initial functions for m={self.sched.m}"
            )


@dataclass
class ModalSolution:
    """One mode's trajectory, stored with the t**rho_m weight."""

    family: str
    k: int
    eigenvalue: float
    t_grid: np.ndarray
    weighted_values: np.ndarray

    def unweighted(self, rho_m: float) -> np.ndarray:
        t = self.t_grid
        out = np.empty_like(self.weighted_values)
        out[1:] = self.weighted_values[1:] / t[1:] ** rho_m
        out[0] = np.nan if not np.isfinite(self.weighted_values[0]) else self.weighted_values[0]
        return out


def _project_maybe(g, basis: SpectralBasis) -> SineSeries:
    if isinstance(g, SineSeries):
        if g.k_max != basis.k_max:
            raise DomainError("series truncation does not match the basis")
        return g
    return project(g, basis)


def _phi_coefficient_matrix(spec: ProblemSpec, basis: SpectralBasis) -> np.ndarray:
    """(m, n_modes) initial-data coefficients; rows n = 0..m-1."""
    rows = []
    for phi in spec.phis:
        rows.append(_project_maybe(phi, basis).to_array())
    while len(rows) < spec.sched.m:
        rows.append(np.zeros(basis.n_modes))
    return np.array(rows) if rows else np.zeros((0, basis.n_modes))


def _snap_small(coefs: np.ndarray) -> np.ndarray:
    """Round quadrature dust to exact zero so inactive modes stay inactive."""
    scale = np.max(np.abs(coefs))
    if scale > 0:
        coefs = np.where(np.abs(coefs) < 1e-14 * scale, 0.0, coefs)
    return coefs


def _source_coefficients(spec, basis, t_grid):
    """Static mode coefficients, or per-time-node coefficients for separable F."""
    src = spec.source
    if src is None:
        return np.zeros(basis.n_modes), None
    if isinstance(src, SpaceOnlySource):
        return _snap_small(_project_maybe(src.profile, basis).to_array()), None
    amp = np.asarray(src.amplitude, dtype=float)
    if amp.shape[0] != t_grid.size:
        raise GridError("separable amplitude must be sampled on the time grid")
    if src.time_dependent:
        coefs = np.stack(
            [
                project(lambda x, tj=tj: src.profile(x, tj), basis).to_array()
                for tj in t_grid
            ]
        )
    else:
        coefs = np.tile(_project_maybe(src.profile, basis).to_array(), (t_grid.size, 1))
    return None, _snap_small(coefs) * amp[:, None]


def _check_truncation(label: str, coefs: np.ndarray, k_max: int):
    flat = np.abs(coefs.reshape(-1, coefs.shape[-1]))
    if flat.size == 0:
        return
    largest = flat.max()
    if largest == 0:
        return
    last = max(flat[:, k_max].max(), flat[:, -1].max())
    if last > 1e-8 * largest:
        warnings.warn(
            f"{label}: last retained mode carries {last / largest:.2e} of the "
            "largest coefficient; raise k_max",
            TruncationWarning,
            stacklevel=3,
        )


def solve_modal_ode(
    lam: float,
    phi_coeffs: Sequence[float],
    f_coeff,
    sched: FractionalSchedule,
    t_grid: np.ndarray,
    conv_op: np.ndarray | None = None,
    family: str = "",
    k: int = 0,
) -> ModalSolution:
    """One modal relaxation problem, solved through its kernel formulas.

    Returns the trajectory in the weighted representation t**rho_m u_k(t).

    ``f_coeff`` is a scalar for a static source or an array of per-node
    samples a(t) f_k(t) for the convolution branch (pass ``conv_op`` to
    reuse a precomputed convolution operator).
    """
    if lam <= 0:
        raise DomainError(f"modal eigenvalue must be positive, got {lam}")
    t = check_time_grid(np.asarray(t_grid, dtype=float))
    rho_m = sched.total_order
    out = np.zeros_like(t)
    for n, phi_n in enumerate(phi_coeffs):
        if phi_n == 0.0:
            continue
        rho_n = sched.partial_order(n)
        out += phi_n * ml_e_values(rho_m, rho_n + 1.0, t, lam, extra_power=rho_m)
    if np.ndim(f_coeff) == 0:
        if f_coeff != 0.0:
            out += float(f_coeff) * ml_e_values(
                rho_m, rho_m + 1.0, t, lam, extra_power=rho_m
            )
    else:
        forcing = np.asarray(f_coeff, dtype=float)
        if forcing.shape != t.shape:
            raise GridError("time-dependent forcing must live on the time grid")
        if conv_op is None:
            conv_op = conv_operator(rho_m, t, lam)
        out += t**rho_m * (conv_op @ forcing)
    return ModalSolution(
        family=family, k=k, eigenvalue=lam, t_grid=t, weighted_values=out
    )


@dataclass
class DirectSolution:
    """Assembled space-time solution plus its modal pieces."""

    u: np.ndarray  # (n_t, n_x), weight removed on t > 0 rows
    weighted_modal: np.ndarray  # (n_t, n_modes)
    t_grid: np.ndarray
    x_grid: np.ndarray
    basis: SpectralBasis

    def modal_unweighted(self, rho_m: float) -> np.ndarray:
        out = np.empty_like(self.weighted_modal)
        t = self.t_grid
        out[1:] = self.weighted_modal[1:] / t[1:, None] ** rho_m
        out[0] = self.weighted_modal[0]
        return out

    def final_snapshot(self) -> SpaceGridFn:
        return SpaceGridFn(self.x_grid, self.u[-1].copy())


def solve_direct(
    spec: ProblemSpec,
    basis: SpectralBasis,
    t_grid: np.ndarray,
    x_grid: np.ndarray,
) -> DirectSolution:
    """Project the data, solve every mode, synthesize the solution surface.

    The t = 0 row of the output holds the limiting values of u itself:
    finite whenever the zero-order initial datum is classical, NaN where
    the mode genuinely diverges at t = 0.
    """
    t = check_time_grid(np.asarray(t_grid, dtype=float))
    x = np.asarray(x_grid, dtype=float)
    rho_m = spec.sched.total_order
    phi_mat = _phi_coefficient_matrix(spec, basis)
    static_f, conv_forcing = _source_coefficients(spec, basis, t)
    if phi_mat.size:
        _check_truncation("initial data", phi_mat, basis.k_max)
    if static_f is not None:
        _check_truncation("source", static_f[None, :], basis.k_max)
    elif conv_forcing is not None:
        _check_truncation("source", conv_forcing, basis.k_max)

    lams = basis.eigenvalues()
    n_modes = basis.n_modes
    weighted = np.zeros((t.size, n_modes))
    unweighted = np.zeros((t.size, n_modes))
    tw = t[1:] ** rho_m

    def _one_mode(j):
        lam = lams[j]
        phi_col = phi_mat[:, j] if phi_mat.size else ()
        active_conv = conv_forcing is not None and np.any(conv_forcing[:, j] != 0.0)
        uw = np.zeros_like(t)
        w0 = 0.0  # weighted limit at t = 0
        for n, phi_n in enumerate(phi_col):
            if phi_n == 0.0:
                continue
            rho_n = spec.sched.partial_order(n)
            uw += phi_n * ml_e_values(rho_m, rho_n + 1.0, t, lam)
            if rho_m + rho_n == 0.0:
                w0 += phi_n / gamma_fn(rho_n + 1.0)
            elif rho_m + rho_n < 0.0:
                w0 = np.inf
        fj = 0.0 if static_f is None else static_f[j]
        if fj != 0.0:
            uw += fj * ml_e_values(rho_m, rho_m + 1.0, t, lam)
        if active_conv:
            uw += conv_operator(rho_m, t, lam) @ conv_forcing[:, j]
        return j, uw, w0

    for j, uw, w0 in parallel_map(_one_mode, range(n_modes)):
        unweighted[:, j] = uw
        weighted[1:, j] = tw * uw[1:]
        weighted[0, j] = w0

    from .spectral import _NORM

    with np.errstate(invalid="ignore"):
        # an infinite t = 0 row (genuinely singular start) yields NaN there
        u = _NORM * (unweighted @ np.sin(np.outer(basis.wavenumbers(), x))).reshape(
            t.size, x.size
        )
    return DirectSolution(u=u, weighted_modal=weighted, t_grid=t, x_grid=x, basis=basis)


def _fourth_order_uxx(u: np.ndarray, h: float) -> np.ndarray:
    """4th-order second x-derivative on interior columns 2..m-2."""
    return (
        -u[:, :-4] + 16 * u[:, 1:-3] - 30 * u[:, 2:-2] + 16 * u[:, 3:-1] - u[:, 4:]
    ) / (12.0 * h * h)


def pde_residual(
    sol: DirectSolution,
    spec: ProblemSpec,
    t_skip_fraction: float = 0.05,
) -> float:
    """Max interior defect of the diffusion equation on the solution samples.

    Space derivatives use 4th-order central differences; the mirrored term
    is read off by index reflection (the uniform grid is reflection-closed);
    the fractional time operator is applied numerically to every interior
    column. Nodes with t below ``t_skip_fraction`` of the horizon are
    excluded: the initial layer is where the time discretization of a
    singular-derivative solution is legitimately least accurate.
    """
    u, t, x = sol.u, sol.t_grid, sol.x_grid
    m = x.size - 1
    expected = np.linspace(0.0, np.pi, m + 1)
    if not np.allclose(x, expected, atol=1e-12, rtol=0):
        raise GridError("residual evaluation needs the uniform reflection-closed grid")
    h = x[1] - x[0]
    if np.any(~np.isfinite(u[0])):
        raise PreconditionError(
            "solution diverges at t = 0; this diagnostic needs classical "
            "zero-order initial data (use the weighted modal residual instead)"
        )
    uxx = _fourth_order_uxx(u, h)
    uxx_reflected = uxx[:, ::-1]
    dn_u = dn_apply(TimeGridFn(t, u[:, 2:-2]), spec.sched).values

    src = spec.source
    if src is None:
        f_vals = np.zeros((t.size, m + 1))
    elif isinstance(src, SpaceOnlySource):
        prof = src.profile
        fx = prof.values if isinstance(prof, SpaceGridFn) else np.asarray(prof(x))
        f_vals = np.tile(fx, (t.size, 1))
    else:
        amp = np.asarray(src.amplitude, dtype=float)
        if src.time_dependent:
            fx = np.stack([np.asarray(src.profile(x, tj)) for tj in t])
        else:
            fx = np.tile(np.asarray(src.profile(x)), (t.size, 1))
        f_vals = amp[:, None] * fx

    res = dn_u - uxx + spec.epsilon * uxx_reflected - f_vals[:, 2:-2]
    lo = np.searchsorted(t, t_skip_fraction * t[-1])
    return float(np.max(np.abs(res[lo:, :])))
