"""Count reduction: visibilities, entanglement witness, and contextuality contrast.

Every estimator propagates counting statistics to first order: raw
coincidence counts are treated as independent Poisson variables, and
per-context probabilities as multinomial fractions with
stderr = sqrt(p(1-p)/N).  Cross-covariances between quantities reduced from
the same acquisition are neglected; reported margins are therefore
first-order counting errors, not systematic uncertainties.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .optics import ContextProbabilities, DensityMatrix2Q, MeasurementContext
from .optics import Angle, FIRST_BASIS, UNBIASED_BASIS, context_probabilities


@dataclass(frozen=True)
class Estimate:
    """A signed value with a one-sigma counting error."""

    value: float
    stderr: float

    def __post_init__(self):
        if not math.isfinite(self.value) or not math.isfinite(self.stderr):
            raise ValueError("estimate must be finite")
        if self.stderr < 0:
            raise ValueError("stderr must be non-negative")


@dataclass(frozen=True)
class ProbabilityEstimate(Estimate):
    """An Estimate constrained to a probability: value in [0, 1], stderr <= 0.5."""

    def __post_init__(self):
        super().__post_init__()
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability {self.value!r} out of [0, 1]")
        if self.stderr > 0.5:
            raise ValueError(f"probability stderr {self.stderr!r} exceeds 0.5")


@dataclass(frozen=True)
class ContextCounts:
    """Coincidence counts for every outcome pair of one measurement context."""

    context: MeasurementContext
    n: dict
    duration_s: float = 10.0

    def __post_init__(self):
        pairs = self.context.outcome_pairs()
        if set(self.n) != set(pairs):
            raise ValueError("count keys do not match the context outcomes")
        for pair, count in self.n.items():
            if int(count) != count or count < 0:
                raise ValueError(f"count for {pair} must be a non-negative integer")
        if not (self.duration_s > 0):
            raise ValueError("duration must be positive")

    def total(self) -> int:
        return int(sum(self.n.values()))

    def marginal(self, photon: int, label: str) -> int:
        """Single-photon marginal count; ``photon`` is 1 or 2."""
        if photon not in (1, 2):
            raise ValueError("photon must be 1 or 2")
        idx = photon - 1
        return int(sum(count for pair, count in self.n.items() if pair[idx] == label))


@dataclass(frozen=True)
class VisibilityRecord:
    """One source setting's correlation summary.

    ``c_pm`` is oriented so that PM-basis anticorrelation (the signature of
    the entangled target family) counts positive; at a product setting it can
    legitimately come out slightly negative.
    """

    c_hv: Estimate
    c_pm: Estimate
    v_hv: Estimate
    w_e: Estimate
    purity_length: Estimate


def visibility(n_pp: int, n_mm: int, n_pm: int, n_mp: int) -> Estimate:
    """Signed two-photon visibility (same-pol minus opposite-pol fraction).

    Reporting layers take the magnitude; the sign distinguishes correlated
    from anticorrelated data and feeds the witness orientation.
    """
    same = n_pp + n_mm
    opposite = n_pm + n_mp
    total = same + opposite
    if total <= 0:
        raise ValueError("visibility is undefined for a zero total count")
    value = (same - opposite) / total
    stderr = 2.0 * math.sqrt(same * opposite / total**3)
    return Estimate(value, stderr)


def local_visibility(n_h: int, n_v: int) -> Estimate:
    """Single-photon visibility (n_h - n_v)/(n_h + n_v) from marginal counts."""
    total = n_h + n_v
    if total <= 0:
        raise ValueError("local visibility is undefined for a zero total count")
    value = (n_h - n_v) / total
    stderr = 2.0 * math.sqrt(n_h * n_v / total**3)
    return Estimate(value, stderr)


def witness(c_hv: float, c_pm: float) -> float:
    """Entanglement witness C_HV + C_PM - 1; positive only for entangled states."""
    return c_hv + c_pm - 1.0


def purity_length(v_hv: float, w_e: float) -> float:
    """Length of the (local visibility, witness) vector; 1 for pure states."""
    return math.hypot(v_hv, w_e)


def error_floor(c_hv: float) -> float:
    """Residual probability floor (1 - C_HV)/4 set by the white-noise level."""
    if not (0.0 <= c_hv <= 1.0):
        raise ValueError("C_HV must lie in [0, 1]")
    return (1.0 - c_hv) / 4.0


def probability_estimate(counts: ContextCounts, outcome: tuple[str, str]) -> ProbabilityEstimate:
    """Per-context normalized probability of one outcome with multinomial stderr."""
    if outcome not in counts.n:
        raise ValueError(f"outcome {outcome!r} is not part of context {counts.context.label}")
    total = counts.total()
    if total <= 0:
        raise ValueError("probability is undefined for a zero total count")
    p = counts.n[outcome] / total
    return ProbabilityEstimate(p, math.sqrt(p * (1.0 - p) / total))


def inequality_margin(p_aa: float, p_0a: float, p_a0: float, p_11: float) -> float:
    """Signed violation P(a,a) - P(0,a) - P(a,0) - P(1,1).

    Non-positive for every non-contextual (separable) model at any settings;
    a positive margin certifies contextuality.
    """
    return p_aa - p_0a - p_a0 - p_11


def contrast_k(
    p_aa: ProbabilityEstimate,
    p_0a: ProbabilityEstimate,
    p_a0: ProbabilityEstimate,
    p_11: ProbabilityEstimate,
) -> Estimate:
    """Normalized contrast: margin over the sum of the four probabilities.

    Ranges over [-1, 1]; the stderr is first-order propagation treating the
    four per-context probabilities as independent.
    """
    suppressed = p_0a.value + p_a0.value + p_11.value
    denom = p_aa.value + suppressed
    if denom <= 0:
        raise ValueError("contrast is undefined: probabilities sum to zero")
    value = (p_aa.value - suppressed) / denom
    d_aa = 2.0 * suppressed / denom**2
    d_other = 2.0 * p_aa.value / denom**2
    var = (d_aa * p_aa.stderr) ** 2 + sum(
        (d_other * q.stderr) ** 2 for q in (p_0a, p_a0, p_11)
    )
    return Estimate(value, math.sqrt(var))


def record_from_counts(
    hv_counts: tuple[int, int, int, int],
    pm_counts: tuple[int, int, int, int],
) -> VisibilityRecord:
    """Reduce one setting's (HH, HV, VH, VV) and (PP, PM, MP, MM) counts.

    The average local visibility of the two photons collapses to
    (n_hh - n_vv)/total, whose error is propagated over all four counts.
    """
    n_hh, n_hv, n_vh, n_vv = hv_counts
    n_pp, n_pm, n_mp, n_mm = pm_counts

    c_hv = visibility(n_hh, n_vv, n_hv, n_vh)
    pm_signed = visibility(n_pp, n_mm, n_pm, n_mp)
    c_pm = Estimate(-pm_signed.value, pm_signed.stderr)  # anticorrelation positive

    total = n_hh + n_hv + n_vh + n_vv
    if total <= 0:
        raise ValueError("local visibility is undefined for a zero total count")
    diff = n_hh - n_vv
    v_value = diff / total
    v_var = (
        n_hh * (total - diff) ** 2
        + n_vv * (total + diff) ** 2
        + (n_hv + n_vh) * diff**2
    ) / total**4
    v_hv = Estimate(v_value, math.sqrt(v_var))

    return _assemble_record(c_hv, c_pm, v_hv)


def record_from_state(state: DensityMatrix2Q) -> VisibilityRecord:
    """Exact-model visibility record from the HV- and PM-basis distributions.

    The PM basis coincides with the unbiased context at zero analyzer angle
    (a = M, b = P), so both reductions reuse the context machinery.
    """
    zero = Angle(0.0)
    ff = context_probabilities(state, MeasurementContext(FIRST_BASIS, FIRST_BASIS, zero))
    ww = context_probabilities(state, MeasurementContext(UNBIASED_BASIS, UNBIASED_BASIS, zero))

    c_hv = ff[("0", "0")] + ff[("1", "1")] - ff[("0", "1")] - ff[("1", "0")]
    c_pm = ww[("b", "a")] + ww[("a", "b")] - ww[("b", "b")] - ww[("a", "a")]
    v_hv = ff[("0", "0")] - ff[("1", "1")]
    return _assemble_record(
        Estimate(c_hv, 0.0), Estimate(c_pm, 0.0), Estimate(v_hv, 0.0)
    )


def _assemble_record(c_hv: Estimate, c_pm: Estimate, v_hv: Estimate) -> VisibilityRecord:
    w_value = witness(c_hv.value, c_pm.value)
    w_err = math.hypot(c_hv.stderr, c_pm.stderr)
    length = purity_length(v_hv.value, w_value)
    if length > 0:
        l_err = math.sqrt((v_hv.value * v_hv.stderr) ** 2 + (w_value * w_err) ** 2) / length
    else:
        l_err = math.hypot(v_hv.stderr, w_err)
    return VisibilityRecord(
        c_hv=c_hv,
        c_pm=c_pm,
        v_hv=v_hv,
        w_e=Estimate(w_value, w_err),
        purity_length=Estimate(length, l_err),
    )


def probabilities_to_estimates(probs: ContextProbabilities) -> dict:
    """Wrap an exact distribution as zero-error probability estimates."""
    return {pair: ProbabilityEstimate(value, 0.0) for pair, value in probs.p.items()}
