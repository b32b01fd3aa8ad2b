import math

import numpy as np
import pytest

from pairctx.metrics import record_from_state
from pairctx.optics import (
    Angle,
    FIRST_BASIS,
    MeasurementContext,
    UNBIASED_BASIS,
    context_probabilities,
)
from pairctx.qstate import pure_to_density, schmidt_coefficients
from pairctx.source import SourceConfig, calibrate_noise, ideal_state, noisy_state


class TestSourceConfig:
    def test_defaults(self):
        cfg = SourceConfig(Angle(20.0))
        assert cfg.white_noise_w == 0.0
        assert cfg.hv_dephasing_d == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"white_noise_w": -0.1},
        {"white_noise_w": 1.1},
        {"hv_dephasing_d": -0.01},
        {"hv_dephasing_d": float("nan")},
    ])
    def test_rejects_bad_weights(self, kwargs):
        with pytest.raises(ValueError):
            SourceConfig(Angle(0.0), **kwargs)

    def test_dict_round_trip(self):
        cfg = SourceConfig(Angle(22.5), white_noise_w=0.05, hv_dephasing_d=0.02)
        assert SourceConfig.from_dict(cfg.to_dict()) == cfg

    def test_with_phi_s(self):
        cfg = SourceConfig(Angle(0.0), white_noise_w=0.1)
        moved = cfg.with_phi_s(Angle(45.0))
        assert moved.phi_s.degrees == 45.0
        assert moved.white_noise_w == 0.1


class TestIdealState:
    def test_zero_angle_is_double_horizontal(self):
        np.testing.assert_allclose(ideal_state(Angle(0.0)).amplitudes, [1, 0, 0, 0])

    def test_amplitude_pattern(self):
        state = ideal_state(Angle(30.0))
        c, s = math.cos(math.radians(30)), math.sin(math.radians(30))
        np.testing.assert_allclose(state.amplitudes, [c, 0.0, 0.0, -s], atol=1e-15)

    def test_schmidt_spectrum(self):
        coeffs = schmidt_coefficients(ideal_state(Angle(22.5)))
        c2 = math.cos(math.radians(22.5)) ** 2
        np.testing.assert_allclose(coeffs, [c2, 1.0 - c2], atol=1e-14)


class TestNoisyState:
    def test_no_noise_matches_pure(self):
        cfg = SourceConfig(Angle(17.5))
        expected = pure_to_density(ideal_state(Angle(17.5))).matrix
        np.testing.assert_allclose(noisy_state(cfg).matrix, expected, atol=1e-15)

    def test_matrix_entries(self):
        w, d = 0.04, 0.1
        cfg = SourceConfig(Angle(25.0), white_noise_w=w, hv_dephasing_d=d)
        rho = noisy_state(cfg).matrix
        c, s = math.cos(math.radians(25)), math.sin(math.radians(25))
        assert rho[0, 0] == pytest.approx((1 - w) * c * c + w / 4)
        assert rho[1, 1] == pytest.approx(w / 4)
        assert rho[3, 3] == pytest.approx((1 - w) * s * s + w / 4)
        assert rho[0, 3] == pytest.approx(-(1 - w) * (1 - d) * c * s)
        assert rho[1, 2] == pytest.approx(0.0, abs=1e-15)


class TestClosedFormVisibilities:
    @pytest.mark.parametrize("phi_s", [0.0, 10.0, 22.5, 35.0, 45.0])
    def test_zero_angle_record(self, phi_s):
        w, d = 0.06, 0.03
        cfg = SourceConfig(Angle(phi_s), white_noise_w=w, hv_dephasing_d=d)
        record = record_from_state(noisy_state(cfg))
        two = math.radians(2 * phi_s)
        assert record.c_hv.value == pytest.approx(1 - w, abs=1e-12)
        assert record.c_pm.value == pytest.approx((1 - w) * (1 - d) * math.sin(two), abs=1e-12)
        assert record.v_hv.value == pytest.approx((1 - w) * math.cos(two), abs=1e-12)
        assert record.w_e.value == pytest.approx(
            record.c_hv.value + record.c_pm.value - 1.0, abs=1e-12
        )

    def test_noiseless_purity_length_is_one(self):
        for phi_s in (0.0, 20.905, 45.0):
            record = record_from_state(pure_to_density(ideal_state(Angle(phi_s))))
            assert record.purity_length.value == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("phi_s,phi_m", [
        (0.0, 10.0), (22.5, 10.0), (22.5, 31.0), (45.0, 22.5), (35.0, 50.0),
    ])
    def test_rotated_basis_visibilities(self, phi_s, phi_m):
        # Independent closed forms for the two bases at any analyzer angle.
        rho = pure_to_density(ideal_state(Angle(phi_s)))
        phi = Angle(phi_m)
        ff = context_probabilities(rho, MeasurementContext(FIRST_BASIS, FIRST_BASIS, phi))
        ww = context_probabilities(
            rho, MeasurementContext(UNBIASED_BASIS, UNBIASED_BASIS, phi)
        )
        vis_f = ff[("0", "0")] + ff[("1", "1")] - ff[("0", "1")] - ff[("1", "0")]
        vis_w = ww[("a", "a")] + ww[("b", "b")] - ww[("a", "b")] - ww[("b", "a")]
        s2 = math.sin(math.radians(2 * phi_s))
        assert vis_f == pytest.approx(
            1 - (1 + s2) * math.sin(math.radians(2 * phi_m)) ** 2, abs=1e-12
        )
        assert vis_w == pytest.approx(
            1 - (1 + s2) * math.cos(math.radians(2 * phi_m)) ** 2, abs=1e-12
        )


class TestCalibrateNoise:
    def test_reference_values(self):
        w, d = calibrate_noise(0.968, 0.935)
        assert w == pytest.approx(0.032)
        assert d == pytest.approx(1 - 0.935 / 0.968)

    def test_round_trip_through_model(self):
        w, d = calibrate_noise(0.968, 0.935)
        cfg = SourceConfig(Angle(45.0), white_noise_w=w, hv_dephasing_d=d)
        record = record_from_state(noisy_state(cfg))
        assert record.c_hv.value == pytest.approx(0.968, abs=1e-12)
        assert record.c_pm.value == pytest.approx(0.935, abs=1e-12)

    def test_rejects_unreachable_regime(self):
        with pytest.raises(ValueError):
            calibrate_noise(0.9, 0.95)

    @pytest.mark.parametrize("pair", [(0.0, 0.5), (1.2, 0.9), (0.9, 0.0), (0.9, -0.1)])
    def test_rejects_out_of_range(self, pair):
        with pytest.raises(ValueError):
            calibrate_noise(*pair)
