import math

import numpy as np
import pytest

from fracdiff.direct import (
    ProblemSpec,
    SeparableSource,
    SpaceOnlySource,
    pde_residual,
    solve_direct,
    solve_modal_ode,
)
from fracdiff.errors import PreconditionError, TruncationWarning
from fracdiff.frac_calculus import FractionalSchedule, dn_apply, dn_initial_values
from fracdiff.grids import TimeGridFn, graded_time_grid, uniform_space_grid
from fracdiff.mittag_leffler import ml_e_values
from fracdiff.spectral import SpectralBasis, eigenfunction_values, project


def _caputo_spec(eps=0.5, zeta=0.6, T=1.0, phis=(), source=None):
    return ProblemSpec(eps, FractionalSchedule([1.0, zeta]), T, phis=list(phis), source=source)


class TestModalSolve:
    def test_zero_data_is_zero(self):
        t = graded_time_grid(1.0, 256, 2.0)
        sol = solve_modal_ode(3.0, [0.0], 0.0, FractionalSchedule([1.0, 0.6]), t)
        assert np.all(sol.weighted_values == 0.0)

    def test_caputo_relaxation(self):
        # unit initial state, no source: u(t) = E[zeta,1](-lam t**zeta)
        zeta, lam = 0.6, 4.0
        t = graded_time_grid(1.0, 256, 2.0)
        sol = solve_modal_ode(lam, [1.0], 0.0, FractionalSchedule([1.0, zeta]), t)
        u = np.empty_like(t)
        u[1:] = sol.weighted_values[1:] / t[1:] ** zeta
        expect = ml_e_values(zeta, 1.0, t[1:], lam)
        assert np.abs(u[1:] - expect).max() <= 1e-9

    def test_forced_mode_satisfies_equation(self):
        lam, phi0, f = 6.0, 1.0, 2.0
        sched = FractionalSchedule([0.9, 0.8])
        rho, rho0 = sched.total_order, sched.partial_order(0)
        t = graded_time_grid(1.0, 2048, 2.0)
        modal = solve_modal_ode(lam, [phi0], f, sched, t)
        w = modal.weighted_values
        # residual check through the weighted-pipeline operator
        wexp = -rho0
        samples = phi0 * ml_e_values(rho, rho0 + 1.0, t, lam, extra_power=wexp) + f * ml_e_values(
            rho, rho + 1.0, t, lam, extra_power=wexp
        )
        dnu = dn_apply(TimeGridFn(t, samples, weight_exponent=wexp), sched).values
        u = np.empty_like(t)
        u[1:] = w[1:] / t[1:] ** rho
        u[0] = 0.0
        mask = t >= 0.1
        assert np.abs(dnu[mask] + lam * u[mask] - f).max() <= 1e-3


class TestSolveDirect:
    def setup_method(self):
        self.t = graded_time_grid(1.0, 512, 2.0)
        self.x = uniform_space_grid(64)

    def test_zero_everything(self):
        sol = solve_direct(_caputo_spec(), SpectralBasis(0.5, 8), self.t, self.x)
        assert np.all(sol.u == 0.0)

    def test_single_mode_closed_form(self):
        phi = lambda xx: eigenfunction_values("even", 1, xx)
        spec = _caputo_spec(eps=0.5, zeta=0.6, phis=[phi])
        sol = solve_direct(spec, SpectralBasis(0.5, 8), self.t, self.x)
        lam = 6.0  # (1 + eps) * 4 at k = 1
        expect = ml_e_values(0.6, 1.0, self.t, lam)[:, None] * phi(self.x)[None, :]
        assert np.abs(sol.u - expect).max() <= 1e-7

    def test_boundary_vanishes(self):
        phi = lambda xx: xx * (math.pi - xx)
        sol = solve_direct(
            _caputo_spec(phis=[phi], source=SpaceOnlySource(lambda xx: np.sin(xx))),
            SpectralBasis(0.5, 8),
            self.t,
            self.x,
        )
        assert np.abs(sol.u[:, [0, -1]]).max() <= 1e-10

    def test_superposition(self):
        basis = SpectralBasis(0.3, 8)
        phiA = lambda xx: np.sin(xx)
        phiB = lambda xx: np.sin(2 * xx)
        mix = lambda xx: 2.0 * phiA(xx) - 0.5 * phiB(xx)
        uA = solve_direct(_caputo_spec(eps=0.3, phis=[phiA]), basis, self.t, self.x).u
        uB = solve_direct(_caputo_spec(eps=0.3, phis=[phiB]), basis, self.t, self.x).u
        uged = solve_direct(_caputo_spec(eps=0.3, phis=[mix]), basis, self.t, self.x).u
        assert np.abs(uged - 2.0 * uA + 0.5 * uB).max() <= 1e-12

    def test_initial_condition_recovery(self):
        phi = lambda xx: np.sin(xx) + 0.3 * np.sin(2 * xx)
        basis = SpectralBasis(0.4, 8)
        t = graded_time_grid(1.0, 2048, 2.0)
        spec = _caputo_spec(eps=0.4, zeta=0.7, phis=[phi])
        sol = solve_direct(spec, basis, t, self.x)
        # zero-order initial datum: extrapolated operator values match phi
        recovered = np.array(
            [
                dn_initial_values(TimeGridFn(t, sol.u[:, j]), spec.sched)[0]
                for j in range(self.x.size)
            ]
        )
        proj_rec = project(
            __import__("fracdiff.grids", fromlist=["SpaceGridFn"]).SpaceGridFn(self.x, recovered),
            basis,
        ).to_array()
        proj_true = project(phi, basis).to_array()
        assert np.abs(proj_rec - proj_true).max() <= 1e-3

    def test_weighted_modal_refines_under_grid_doubling(self):
        phi = lambda xx: np.sin(xx)
        basis = SpectralBasis(0.2, 4)
        spec = _caputo_spec(eps=0.2, zeta=0.5, phis=[phi])
        coarse = solve_direct(spec, basis, graded_time_grid(1.0, 256, 2.0), self.x)
        fine = solve_direct(spec, basis, graded_time_grid(1.0, 512, 2.0), self.x)
        wc = coarse.weighted_modal[:, 0]
        wf = fine.weighted_modal[::2, 0]
        assert np.all(np.isfinite(wc))
        assert np.abs(wc - wf).max() <= 1e-8

    def test_truncation_warning_fires(self):
        slow_decay = lambda xx: sum(
            math.sqrt(2 / math.pi) / (2 * k + 1) * np.sin((2 * k + 1) * xx) for k in range(1, 12)
        )
        with pytest.warns(TruncationWarning):
            solve_direct(
                _caputo_spec(phis=[slow_decay]),
                SpectralBasis(0.5, 4),
                self.t,
                uniform_space_grid(128),
            )


class TestPdeResidual:
    def setup_method(self):
        self.t = graded_time_grid(1.0, 1024, 2.0)
        self.x = uniform_space_grid(64)
        self.basis = SpectralBasis(0.3, 8)
        phi = lambda xx: 0.7 * eigenfunction_values("even", 1, xx) + 0.4 * eigenfunction_values("odd", 2, xx)
        f = lambda xx: 0.5 * np.sin(xx)
        self.spec = _caputo_spec(eps=0.3, zeta=0.7, phis=[phi], source=SpaceOnlySource(f))
        self.sol = solve_direct(self.spec, self.basis, self.t, self.x)

    def test_solution_residual_small(self):
        assert pde_residual(self.sol, self.spec) <= 1e-2

    def test_zero_solution_zero_source(self):
        sol0 = solve_direct(_caputo_spec(eps=0.3, zeta=0.7), self.basis, self.t, self.x)
        assert pde_residual(sol0, _caputo_spec(eps=0.3, zeta=0.7)) == 0.0

    def test_perturbation_is_detected(self):
        import copy

        bumped = copy.deepcopy(self.sol)
        bumped.u[len(self.t) // 2, len(self.x) // 2] += 1.0
        base = pde_residual(self.sol, self.spec)
        assert pde_residual(bumped, self.spec) >= base + 1.0

    def test_guard_on_singular_start(self):
        # zero-order datum with a genuinely singular trajectory at t = 0
        spec = ProblemSpec(
            0.3, FractionalSchedule([0.7, 0.9]), 1.0,
            phis=[lambda xx: np.sin(xx)], source=None,
        )
        sol = solve_direct(spec, self.basis, self.t, self.x)
        with pytest.raises(PreconditionError):
            pde_residual(sol, spec)


class TestSeparableSource:
    def test_duhamel_single_mode(self):
        # amplitude a(t) = 1 makes the separable source match the static one
        t = graded_time_grid(0.5, 512, 2.0)
        x = uniform_space_grid(64)
        basis = SpectralBasis(0.3, 8)
        f = lambda xx: np.sin(xx)
        static = solve_direct(
            _caputo_spec(eps=0.3, zeta=0.7, T=0.5, source=SpaceOnlySource(f)),
            basis, t, x,
        )
        separable = solve_direct(
            _caputo_spec(
                eps=0.3, zeta=0.7, T=0.5,
                source=SeparableSource(np.ones_like(t), f),
            ),
            basis, t, x,
        )
        assert np.abs(static.u[1:] - separable.u[1:]).max() <= 1e-7


class TestParallelism:
    def test_thread_cap_preserves_results(self, monkeypatch):
        t = graded_time_grid(0.5, 128, 2.0)
        x = uniform_space_grid(32)
        basis = SpectralBasis(0.3, 6)
        phi = lambda xx: np.sin(xx) + 0.2 * np.sin(2 * xx)
        spec = _caputo_spec(eps=0.3, zeta=0.7, T=0.5, phis=[phi])
        monkeypatch.setenv("FRACDIFF_NUM_THREADS", "1")
        seq = solve_direct(spec, basis, t, x).u
        monkeypatch.setenv("FRACDIFF_NUM_THREADS", "4")
        par = solve_direct(spec, basis, t, x).u
        assert np.array_equal(seq, par)
