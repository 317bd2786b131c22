import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdiff.errors import DomainError, GridError, NonConvergentError, SingularAtZeroError
from fracdiff.grids import graded_time_grid
from fracdiff.mittag_leffler import (
    MLParams,
    MLTypeParams,
    check_ml_bound,
    conv_ml,
    conv_operator,
    ml_e_values,
    ml_eval,
    ml_neg_values,
    ml_type_eval,
)

# frozen with tests/oracles.py: ml_reference / conv_ml_reference
E_05_05_M3 = 0.027186130003586436
E_07_1_M10 = 0.03617326554230915
E_TYPE_05_05_T1_L2 = 0.0533982309267448
CONV_T_BETA05_LAM1 = {
    1.0: 0.4440372567488467,
    0.5: 0.17895885546705412,
    0.25: 0.07012007225948413,
}


class TestMlEval:
    def test_exp_point(self):
        rep = ml_eval(MLParams(1.0, 1.0, 1.0))
        assert rep.value == pytest.approx(math.e, abs=1e-10)
        assert rep.abs_error_estimate <= 1e-10

    def test_cos_point(self):
        rep = ml_eval(MLParams(2.0, 1.0, -4.0))
        assert rep.value == pytest.approx(math.cos(2.0), abs=1e-10)

    def test_frozen_oracle_point(self):
        rep = ml_eval(MLParams(0.5, 0.5, -3.0))
        assert rep.value == pytest.approx(E_05_05_M3, abs=1e-10)

    def test_deep_negative_frozen(self):
        rep = ml_eval(MLParams(0.7, 1.0, -10.0))
        assert rep.value == pytest.approx(E_07_1_M10, abs=1e-10)

    def test_value_at_zero_is_reciprocal_gamma(self):
        rep = ml_eval(MLParams(0.8, 0.5, 0.0))
        assert rep.value == pytest.approx(1.0 / math.gamma(0.5), rel=1e-14)

    def test_error_estimate_always_reported(self):
        for z in (-2000.0, -17.0, -0.1, 0.0, 3.0):
            rep = ml_eval(MLParams(0.6, 1.2, z))
            assert math.isfinite(rep.abs_error_estimate)
            assert rep.method in ("taylor", "asymptotic", "integral")

    def test_tol_domain(self):
        with pytest.raises(DomainError):
            ml_eval(MLParams(0.5, 1.0, 1.0), tol=1e-3)
        with pytest.raises(DomainError):
            ml_eval(MLParams(0.5, 1.0, 1.0), tol=1e-15)

    def test_nonconvergent_carries_best_estimate(self):
        # positive large argument: float64 summation cannot reach 1e-14
        with pytest.raises(NonConvergentError) as exc:
            ml_eval(MLParams(1.0, 1.0, 10.0), tol=1e-14)
        assert exc.value.value == pytest.approx(math.exp(10.0), rel=1e-10)
        assert exc.value.abs_error_estimate > 1e-14

    @given(z=st.floats(-10.0, 10.0))
    @settings(max_examples=60, deadline=None)
    def test_exp_reduction_property(self, z):
        rep = ml_eval(MLParams(1.0, 1.0, z), tol=1e-10)
        assert abs(rep.value - math.exp(z)) <= 1e-10


class TestMlTypeEval:
    def test_at_zero_zeta_one(self):
        rep = ml_type_eval(MLTypeParams(0.6, 1.0, 0.0, 7.0))
        assert rep.value == 1.0

    def test_at_zero_zeta_above_one(self):
        rep = ml_type_eval(MLTypeParams(0.6, 1.4, 0.0, 7.0))
        assert rep.value == 0.0

    def test_singular_at_zero(self):
        with pytest.raises(SingularAtZeroError):
            ml_type_eval(MLTypeParams(0.6, 0.6, 0.0, 7.0))

    def test_kernel_shift_identity_point(self):
        # e[b, b+1](t; lam) = (1 - e[b, 1](t; lam)) / lam
        beta, t, lam = 0.6, 2.0, 3.0
        lhs = ml_type_eval(MLTypeParams(beta, beta + 1.0, t, lam)).value
        e1 = ml_type_eval(MLTypeParams(beta, 1.0, t, lam)).value
        assert lhs == pytest.approx((1.0 - e1) / lam, abs=1e-9)

    def test_frozen_oracle_point(self):
        rep = ml_type_eval(MLTypeParams(0.5, 0.5, 1.0, 2.0))
        assert rep.value == pytest.approx(E_TYPE_05_05_T1_L2, abs=1e-10)

    @given(
        beta=st.floats(0.1, 0.95),
        t=st.floats(1e-3, 2.0),
        lam=st.floats(1e-2, 50.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_kernel_shift_identity_property(self, beta, t, lam):
        lhs = lam * ml_type_eval(MLTypeParams(beta, beta + 1.0, t, lam), tol=1e-10).value
        e1 = ml_type_eval(MLTypeParams(beta, 1.0, t, lam), tol=1e-10).value
        assert abs(lhs - (1.0 - e1)) <= 1e-9
        assert 0.0 < e1 < 1.0


class TestBoundCheck:
    def test_at_zero(self):
        lhs, shape = check_ml_bound(MLParams(0.7, 1.0, 0.0))
        assert lhs == pytest.approx(1.0, rel=1e-12)
        assert shape == 1.0

    def test_decays_on_negative_axis(self):
        lhs, _ = check_ml_bound(MLParams(0.7, 1.0, -10.0))
        assert lhs < 1.0

    def test_fitted_constant_stays_modest(self):
        zs = np.concatenate([[0.0], -np.geomspace(1e-2, 1e4, 25)])
        ratios = []
        for z in zs:
            lhs, shape = check_ml_bound(MLParams(0.5, 0.5, float(z)))
            ratios.append(lhs / shape)
        assert max(ratios) < 10.0

    def test_rejects_beta_out_of_range(self):
        with pytest.raises(DomainError):
            check_ml_bound(MLParams(2.0, 1.0, -1.0))
        with pytest.raises(DomainError):
            check_ml_bound(MLParams(0.5, 1.0, 1.0))


class TestArrayPath:
    def test_matches_scalar_across_axis(self):
        beta, zeta = 0.7, 1.7
        z = -np.concatenate([np.linspace(0.0, 4.0, 7), np.geomspace(5.0, 2e4, 9)])
        vals, errs = ml_neg_values(beta, zeta, z)
        for zi, vi in zip(z, vals):
            ref = ml_eval(MLParams(beta, zeta, float(zi)), tol=1e-10)
            assert abs(vi - ref.value) <= 1e-9

    def test_limits_at_zero(self):
        t = np.array([0.0, 0.5, 1.0])
        vals = ml_e_values(0.6, 1.0, t, 3.0)
        assert vals[0] == 1.0
        vals = ml_e_values(0.6, 1.6, t, 3.0)
        assert vals[0] == 0.0
        vals = ml_e_values(0.6, 1.6, t, 3.0, extra_power=-0.6)
        assert vals[0] == pytest.approx(1.0 / math.gamma(1.6), rel=1e-13)


class TestConvolution:
    def setup_method(self):
        self.t = graded_time_grid(1.0, 256, 2.0)

    def test_zero_function(self):
        out = conv_ml(np.zeros_like(self.t), 0.6, self.t, 4.0)
        assert np.all(out == 0.0)

    def test_constant_telescopes_to_shifted_kernel(self):
        # (1 * e[b,b](.;lam))(t) = e[b, b+1](t; lam), exactly by telescoping
        out = conv_ml(np.ones_like(self.t), 0.6, self.t, 4.0)
        expect = ml_e_values(0.6, 1.6, self.t, 4.0)
        assert np.abs(out - expect).max() <= 1e-13

    def test_linear_data_frozen_oracle(self):
        t = np.linspace(0.0, 1.0, 513)  # contains the frozen sample times
        out = conv_ml(t.copy(), 0.5, t, 1.0)
        for tv, expect in CONV_T_BETA05_LAM1.items():
            idx = int(np.argmin(np.abs(t - tv)))
            assert t[idx] == tv
            assert out[idx] == pytest.approx(expect, abs=1e-9)

    def test_linearity(self):
        op = conv_operator(0.6, self.t, 4.0)
        g1 = np.sin(2 * self.t)
        g2 = self.t**2
        lhs = conv_ml(1.5 * g1 - 2.0 * g2, 0.6, self.t, 4.0, operator=op)
        rhs = 1.5 * conv_ml(g1, 0.6, self.t, 4.0, operator=op) - 2.0 * conv_ml(
            g2, 0.6, self.t, 4.0, operator=op
        )
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_grid_must_start_at_zero(self):
        with pytest.raises(GridError):
            conv_ml(np.ones(5), 0.6, np.array([0.1, 0.2, 0.3, 0.4, 0.5]), 1.0)
