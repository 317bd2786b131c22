import math

import numpy as np
import pytest

from fracdiff.errors import BoundaryError, DomainError, PreconditionError
from fracdiff.grids import SpaceGridFn, uniform_space_grid
from fracdiff.spectral import (
    SineSeries,
    SpectralBasis,
    decay_check,
    eigenfunction_residual,
    eigenfunction_values,
    eigenvalue,
    gram_matrix,
    project,
    synthesize,
)
from oracles import sine_coefficient_reference


class TestEigenpairs:
    def test_even_family(self):
        assert eigenvalue(SpectralBasis(0.5, 4), "even", 1) == pytest.approx(6.0)

    def test_classical_limit(self):
        assert eigenvalue(SpectralBasis(0.0, 4), "odd", 1) == pytest.approx(9.0)

    def test_first_mode(self):
        assert eigenvalue(SpectralBasis(0.5, 4), "first") == pytest.approx(0.5)

    def test_index_guard(self):
        with pytest.raises(IndexError):
            eigenvalue(SpectralBasis(0.5, 4), "odd", 0)

    def test_epsilon_guard(self):
        with pytest.raises(DomainError):
            SpectralBasis(1.0, 4)

    def test_wavenumbers_complete(self):
        b = SpectralBasis(0.2, 5)
        assert sorted(b.wavenumbers().tolist()) == list(range(1, 12))

    @pytest.mark.parametrize(
        "eps,family,k,tol",
        [(0.7, "odd", 2, 1e-10), (-0.3, "even", 3, 1e-10), (0.99, "even", 3, 1e-9)],
    )
    def test_residuals(self, eps, family, k, tol):
        x = uniform_space_grid(512)
        assert eigenfunction_residual(SpectralBasis(eps, 8), family, k, x) <= tol

    def test_reflection_symmetry(self):
        x = uniform_space_grid(128)
        odd = eigenfunction_values("odd", 2, math.pi - x) - eigenfunction_values("odd", 2, x)
        even = eigenfunction_values("even", 2, math.pi - x) + eigenfunction_values("even", 2, x)
        assert np.abs(odd).max() <= 1e-12
        assert np.abs(even).max() <= 1e-12


class TestTransforms:
    def setup_method(self):
        self.basis = SpectralBasis(0.4, 16)
        self.x = uniform_space_grid(512)

    def test_orthonormality_of_sampled_mode(self):
        g = SpaceGridFn(self.x, eigenfunction_values("even", 1, self.x))
        series = project(g, self.basis)
        assert series.even[0] == pytest.approx(1.0, abs=1e-10)
        rest = np.abs(series.to_array())
        rest[1 + self.basis.k_max] = 0.0
        assert rest.max() <= 1e-10

    def test_single_mode_function(self):
        series = project(lambda x: np.sin(x), self.basis)
        assert series.c1 == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-12)
        assert np.abs(series.odd).max() <= 1e-10
        assert np.abs(series.even).max() <= 1e-10

    def test_parabola_against_quadrature_oracle(self):
        g = lambda x: x * (math.pi - x)
        series = project(g, self.basis)
        for k in (1, 2, 5):
            ref = sine_coefficient_reference(g, 2 * k + 1)
            assert series.odd[k - 1] == pytest.approx(ref, rel=1e-10)
            # analytic closed form of the same coefficients
            assert ref == pytest.approx(math.sqrt(2 / math.pi) * 4.0 / (2 * k + 1) ** 3, rel=1e-9)
        assert np.abs(series.even).max() <= 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        series = SineSeries(rng.normal(), rng.normal(size=16), rng.normal(size=16))
        back = project(synthesize(series, self.basis, self.x), self.basis)
        assert np.abs(back.to_array() - series.to_array()).max() <= 1e-10

    def test_parseval(self):
        rng = np.random.default_rng(8)
        series = SineSeries(rng.normal(), rng.normal(size=16), rng.normal(size=16))
        f = synthesize(series, self.basis, uniform_space_grid(1024))
        grid_norm = math.sqrt(np.trapezoid(f.values**2, f.x_grid))
        assert grid_norm == pytest.approx(series.l2_norm(), abs=1e-8)

    def test_boundary_guard(self):
        bad = SpaceGridFn(self.x, self.x.copy())  # nonzero at x = pi
        with pytest.raises(BoundaryError):
            project(bad, self.basis)

    def test_gram_identity(self):
        g = gram_matrix(SpectralBasis(0.3, 32))
        assert np.abs(g - np.eye(g.shape[0])).max() <= 1e-9


class TestDecay:
    def setup_method(self):
        self.basis = SpectralBasis(0.4, 16)

    def test_single_mode_far_below_one(self):
        rep = decay_check(
            lambda x: np.sin(3 * x), lambda x: -9.0 * np.sin(3 * x), self.basis, order=2
        )
        assert rep.worst <= 1.0

    def test_parabola_order_two(self):
        rep = decay_check(
            lambda x: x * (math.pi - x),
            lambda x: -2.0 * np.ones_like(x),
            self.basis,
            order=2,
        )
        assert rep.worst <= 1.0
        assert rep.odd_worst > 0.0

    def test_cubic_bump_order_four(self):
        g = lambda x: x**3 * (math.pi - x) ** 3
        d2 = lambda x: 6 * math.pi**3 * x - 36 * math.pi**2 * x**2 + 60 * math.pi * x**3 - 30 * x**4
        d4 = lambda x: -72 * math.pi**2 + 360 * math.pi * x - 360 * x**2
        rep = decay_check(g, d2, self.basis, order=4, fourth_derivative=d4)
        assert rep.worst <= 1.0

    def test_hypothesis_violation_rejected(self):
        # x**2 (pi-x)**2 vanishes at the ends but its curvature does not
        g = lambda x: (x * (math.pi - x)) ** 2
        d2 = lambda x: 2 * math.pi**2 - 12 * math.pi * x + 12 * x**2
        d4 = lambda x: 24.0 * np.ones_like(x)
        with pytest.raises(PreconditionError):
            decay_check(g, d2, self.basis, order=4, fourth_derivative=d4)
