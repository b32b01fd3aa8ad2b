import math

import numpy as np
import pytest

from pairctx.metrics import (
    ContextCounts,
    Estimate,
    ProbabilityEstimate,
    contrast_k,
    error_floor,
    inequality_margin,
    local_visibility,
    probabilities_to_estimates,
    probability_estimate,
    purity_length,
    record_from_counts,
    record_from_state,
    visibility,
    witness,
)
from pairctx.optics import Angle, MeasurementContext, context_probabilities, standard_contexts
from pairctx.source import SourceConfig, noisy_state


class TestEstimate:
    def test_rejects_negative_stderr(self):
        with pytest.raises(ValueError):
            Estimate(1.0, -0.1)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Estimate(float("inf"), 0.0)

    def test_probability_range(self):
        ProbabilityEstimate(0.0, 0.0)
        ProbabilityEstimate(1.0, 0.5)
        with pytest.raises(ValueError):
            ProbabilityEstimate(1.2, 0.0)
        with pytest.raises(ValueError):
            ProbabilityEstimate(0.5, 0.7)


class TestContextCounts:
    def _context(self):
        return MeasurementContext("F", "W", Angle(10.0))

    def test_total_and_marginal(self):
        ctx = self._context()
        counts = ContextCounts(ctx, {
            ("0", "a"): 5, ("0", "b"): 7, ("1", "a"): 11, ("1", "b"): 13,
        })
        assert counts.total() == 36
        assert counts.marginal(1, "0") == 12
        assert counts.marginal(2, "a") == 16

    def test_rejects_wrong_keys(self):
        with pytest.raises(ValueError):
            ContextCounts(self._context(), {("0", "0"): 1})

    def test_rejects_negative_counts(self):
        ctx = self._context()
        n = {pair: 1 for pair in ctx.outcome_pairs()}
        n[("0", "a")] = -1
        with pytest.raises(ValueError):
            ContextCounts(ctx, n)


class TestVisibility:
    def test_perfect_correlation(self):
        est = visibility(100, 100, 0, 0)
        assert est.value == 1.0
        assert est.stderr == 0.0

    def test_known_case(self):
        est = visibility(75, 75, 25, 25)
        assert est.value == pytest.approx(0.5)
        assert est.stderr == pytest.approx(2 * math.sqrt(150 * 50 / 200**3))

    def test_sign_for_anticorrelated(self):
        assert visibility(10, 10, 90, 90).value == pytest.approx(-0.8)

    def test_zero_total_raises(self):
        with pytest.raises(ValueError):
            visibility(0, 0, 0, 0)

    def test_local_visibility(self):
        est = local_visibility(80, 20)
        assert est.value == pytest.approx(0.6)
        assert est.stderr == pytest.approx(2 * math.sqrt(80 * 20 / 100**3))


class TestScalarHelpers:
    def test_witness(self):
        assert witness(0.97, 0.93) == pytest.approx(0.90)

    def test_purity_length(self):
        assert purity_length(0.6, 0.8) == pytest.approx(1.0)

    def test_error_floor(self):
        assert error_floor(0.968) == pytest.approx(0.008)
        with pytest.raises(ValueError):
            error_floor(1.5)

    def test_inequality_margin(self):
        assert inequality_margin(0.08, 0.01, 0.02, 0.03) == pytest.approx(0.02)
        assert inequality_margin(0.01, 0.02, 0.0, 0.0) == pytest.approx(-0.01)


class TestProbabilityEstimateFromCounts:
    def test_values(self):
        ctx = MeasurementContext("W", "W", Angle(30.0))
        counts = ContextCounts(ctx, {
            ("a", "a"): 30, ("a", "b"): 70, ("b", "a"): 100, ("b", "b"): 100,
        })
        est = probability_estimate(counts, ("a", "a"))
        assert est.value == pytest.approx(0.1)
        assert est.stderr == pytest.approx(math.sqrt(0.1 * 0.9 / 300))

    def test_zero_total_raises(self):
        ctx = MeasurementContext("F", "F", Angle(0.0))
        counts = ContextCounts(ctx, {pair: 0 for pair in ctx.outcome_pairs()})
        with pytest.raises(ValueError):
            probability_estimate(counts, ("0", "0"))


class TestContrastK:
    def test_value_and_propagated_error(self):
        p_aa = ProbabilityEstimate(0.12, 0.01)
        p_0a = ProbabilityEstimate(0.02, 0.004)
        p_a0 = ProbabilityEstimate(0.03, 0.005)
        p_11 = ProbabilityEstimate(0.01, 0.002)
        est = contrast_k(p_aa, p_0a, p_a0, p_11)
        assert est.value == pytest.approx(1.0 / 3.0)
        assert est.stderr == pytest.approx(0.06197482, abs=1e-7)

    def test_extremes(self):
        one = ProbabilityEstimate(0.1, 0.0)
        zero = ProbabilityEstimate(0.0, 0.0)
        assert contrast_k(one, zero, zero, zero).value == pytest.approx(1.0)
        assert contrast_k(zero, one, zero, zero).value == pytest.approx(-1.0)

    def test_zero_denominator_raises(self):
        zero = ProbabilityEstimate(0.0, 0.0)
        with pytest.raises(ValueError):
            contrast_k(zero, zero, zero, zero)


class TestRecordFromCounts:
    def test_average_local_visibility_collapses_to_outer_difference(self):
        record = record_from_counts((50, 25, 25, 50), (40, 35, 35, 40))
        assert record.v_hv.value == pytest.approx(0.0)
        # With equal outer counts the variance reduces to (n_hh + n_vv)/N^2.
        assert record.v_hv.stderr == pytest.approx(math.sqrt(100) / 150)

    def test_witness_orientation_prefers_anticorrelated_pm(self):
        record = record_from_counts((500, 5, 5, 490), (10, 480, 490, 20))
        assert record.c_pm.value > 0.9
        assert record.w_e.value > 0.8

    def test_matches_exact_route_on_expected_counts(self):
        cfg = SourceConfig(Angle(25.0), white_noise_w=0.03, hv_dephasing_d=0.034)
        rho = noisy_state(cfg)
        zero = Angle(0.0)
        ff = context_probabilities(rho, MeasurementContext("F", "F", zero))
        ww = context_probabilities(rho, MeasurementContext("W", "W", zero))
        n = 10**9
        hv = tuple(round(n * ff[p]) for p in (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")))
        pm = tuple(round(n * ww[p]) for p in (("b", "b"), ("b", "a"), ("a", "b"), ("a", "a")))
        counted = record_from_counts(hv, pm)
        exact = record_from_state(rho)
        assert counted.c_hv.value == pytest.approx(exact.c_hv.value, abs=1e-8)
        assert counted.c_pm.value == pytest.approx(exact.c_pm.value, abs=1e-8)
        assert counted.v_hv.value == pytest.approx(exact.v_hv.value, abs=1e-8)
        assert counted.w_e.value == pytest.approx(exact.w_e.value, abs=1e-8)
        assert counted.purity_length.value == pytest.approx(
            exact.purity_length.value, abs=1e-8
        )


class TestProbabilitiesToEstimates:
    def test_wraps_exact_values(self):
        rho = noisy_state(SourceConfig(Angle(20.0)))
        ctx = standard_contexts(Angle(32.0))[0]
        probs = context_probabilities(rho, ctx)
        estimates = probabilities_to_estimates(probs)
        for pair in ctx.outcome_pairs():
            assert estimates[pair].value == probs[pair]
            assert estimates[pair].stderr == 0.0
