"""Adaptive selection of the analyzer rotation and the source sweep protocol.

The working point for each source setting is the analyzer angle at which the
first-basis coincidence probabilities balance, P(0,0) = P(0,1).  At that
angle the (0,a) and (a,0) coincidences of the model vanish, and at the ideal
entanglement degree (where the source matches the paradox target state) the
(1,1) coincidence vanishes as well, leaving P(a,a) = 1/12.

Two routes locate the balance point:

* ``balance_phi_m_exact`` solves the model directly with bracketed
  root-finding on P(0,0) - P(0,1), following the branch that is continuous
  with 45 deg at zero entanglement;
* ``balance_phi_m_probed`` mimics the laboratory procedure: acquire counts at
  three angles around a guess, fit one line per outcome, and return the
  abscissa where the fitted lines intersect.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.optimize import brentq

from . import dataio
from .counting import angle_key, derive_rng, sample_context
from .metrics import (
    ContextCounts,
    Estimate,
    ProbabilityEstimate,
    contrast_k,
    inequality_margin,
    probability_estimate,
    probabilities_to_estimates,
)
from .optics import (
    Angle,
    FIRST_BASIS,
    MeasurementContext,
    context_probabilities,
    joint_probability,
    standard_contexts,
)
from .qstate import DensityMatrix2Q, pure_to_density
from .source import SourceConfig, ideal_state, noisy_state

# The nine source settings used for the bundled dataset.
DEFAULT_GRID_DEG = (0.0, 10.0, 17.5, 20.0, 22.5, 25.0, 27.5, 35.0, 45.0)

MODES = ("exact", "counted")
CRITERIA = ("max-K", "min-P11")

_SCAN_STEP_DEG = 3.0
_GAP_TOL = 1e-12


class DegenerateStateError(RuntimeError):
    """The balance condition has no isolated solution for this state."""


class FitIntersectionError(RuntimeError):
    """The two fitted count lines are parallel; no intersection exists."""


class ExtrapolationWarning(UserWarning):
    """The fitted intersection lies well outside the probed angle range."""


@dataclass(frozen=True)
class ProbeResult:
    """Counts of the (0,0) and (0,1) coincidences at one probed angle."""

    phi_m: Angle
    n_00: int
    n_01: int

    def __post_init__(self):
        if self.n_00 < 0 or self.n_01 < 0:
            raise ValueError("probe counts must be non-negative")


def ideal_phi_s_star() -> Angle:
    """Entanglement degree whose Schmidt spectrum matches the paradox target,
    arccos(sqrt((3 + sqrt(5))/6)), about 20.905 deg."""
    return Angle(math.degrees(math.acos(math.sqrt((3.0 + math.sqrt(5.0)) / 6.0))))


def _balance_gap(state: DensityMatrix2Q, phi_m_deg: float) -> float:
    phi = Angle(phi_m_deg)
    return joint_probability(state, ("0", "0"), phi) - joint_probability(state, ("0", "1"), phi)


def balance_phi_m_for_state(state: DensityMatrix2Q) -> Angle:
    """Smallest angle in (0, 90) deg where P(0,0) = P(0,1) for this state.

    For the source family this is the branch continuous with 45 deg at
    phi_s = 0.  Raises DegenerateStateError when the gap never changes sign
    (e.g. for the maximally mixed state, which balances everywhere).
    """
    xs = np.arange(1e-6, 90.0, _SCAN_STEP_DEG)
    xs = np.append(xs, 90.0 - 1e-6)
    gaps = np.array([_balance_gap(state, x) for x in xs])
    if np.abs(gaps).max() < _GAP_TOL:
        raise DegenerateStateError("balance condition holds everywhere; no isolated angle")
    for i in range(len(xs) - 1):
        if gaps[i] == 0.0:
            return Angle(float(xs[i]))
        if gaps[i] * gaps[i + 1] < 0.0:
            root = brentq(
                lambda x: _balance_gap(state, x), xs[i], xs[i + 1],
                xtol=1e-12, rtol=8.9e-16,
            )
            if abs(_balance_gap(state, root)) > _GAP_TOL:
                raise DegenerateStateError("root refinement did not reach tolerance")
            return Angle(float(root))
    raise DegenerateStateError("no balanced angle in (0, 90) deg")


def balance_phi_m_exact(config: SourceConfig) -> Angle:
    """Balanced analyzer angle of the configured source model."""
    return balance_phi_m_for_state(noisy_state(config))


def balance_phi_m_probed(probe, phi_m_guess: Angle, step: Angle = Angle(3.0)) -> Angle:
    """Three-point probe around a guess: fit a line to each outcome's counts
    and return the intersection abscissa.

    Warns with ExtrapolationWarning when the intersection falls outside
    guess +- 3*step; raises FitIntersectionError when the fitted slopes
    differ by less than 1e-9 counts/degree.
    """
    if not (step.degrees > 0):
        raise ValueError("probe step must be positive")
    xs = np.array([
        phi_m_guess.degrees - step.degrees,
        phi_m_guess.degrees,
        phi_m_guess.degrees + step.degrees,
    ])
    results = [probe(Angle(x)) for x in xs]
    y00 = np.array([r.n_00 for r in results], dtype=float)
    y01 = np.array([r.n_01 for r in results], dtype=float)
    m0, a0 = np.polyfit(xs, y00, 1)
    m1, a1 = np.polyfit(xs, y01, 1)
    if abs(m0 - m1) < 1e-9:
        raise FitIntersectionError("fitted count lines are parallel within tolerance")
    crossing = (a1 - a0) / (m0 - m1)
    if abs(crossing - phi_m_guess.degrees) > 3.0 * step.degrees:
        warnings.warn(
            f"fitted intersection {crossing:.3f} deg extrapolates beyond the probed range",
            ExtrapolationWarning,
            stacklevel=2,
        )
    return Angle(float(crossing))


def expected_counts_probe(state: DensityMatrix2Q, budget: float):
    """Deterministic probe returning rounded expected counts (no noise)."""

    def probe(phi_m: Angle) -> ProbeResult:
        n00 = round(budget * joint_probability(state, ("0", "0"), phi_m))
        n01 = round(budget * joint_probability(state, ("0", "1"), phi_m))
        return ProbeResult(phi_m, int(n00), int(n01))

    return probe


def sampled_counts_probe(state: DensityMatrix2Q, budget: float, rng, duration_s: float = 10.0):
    """Probe that acquires a Poisson-fluctuating first-basis measurement."""

    def probe(phi_m: Angle) -> ProbeResult:
        context = MeasurementContext(FIRST_BASIS, FIRST_BASIS, phi_m)
        counts = sample_context(context_probabilities(state, context), budget, rng, duration_s)
        return ProbeResult(phi_m, counts.n[("0", "0")], counts.n[("0", "1")])

    return probe


@dataclass(frozen=True)
class SweepRow:
    """One source setting's working point and reduced probabilities."""

    phi_s: Angle
    phi_m_opt: Angle
    p_00: ProbabilityEstimate
    p_0a: ProbabilityEstimate
    p_a0: ProbabilityEstimate
    p_11: ProbabilityEstimate
    p_aa: ProbabilityEstimate
    k: Estimate

    COLUMNS = (
        "phi_s_deg", "phi_m_deg",
        "p_00", "p_00_err", "p_0a", "p_0a_err", "p_a0", "p_a0_err",
        "p_11", "p_11_err", "p_aa", "p_aa_err", "k", "k_err", "margin",
    )

    def margin(self) -> float:
        return inequality_margin(
            self.p_aa.value, self.p_0a.value, self.p_a0.value, self.p_11.value
        )

    def to_dict(self) -> dict:
        return {
            "phi_s_deg": self.phi_s.degrees,
            "phi_m_deg": self.phi_m_opt.degrees,
            "p_00": self.p_00.value, "p_00_err": self.p_00.stderr,
            "p_0a": self.p_0a.value, "p_0a_err": self.p_0a.stderr,
            "p_a0": self.p_a0.value, "p_a0_err": self.p_a0.stderr,
            "p_11": self.p_11.value, "p_11_err": self.p_11.stderr,
            "p_aa": self.p_aa.value, "p_aa_err": self.p_aa.stderr,
            "k": self.k.value, "k_err": self.k.stderr,
            "margin": self.margin(),
        }


@dataclass(frozen=True)
class ProtocolReport:
    """Sweep result: one row per source setting plus the selected optimum."""

    rows: tuple[SweepRow, ...]
    best_phi_s: Angle
    criterion: str
    meta: dict

    COLUMNS = SweepRow.COLUMNS

    def to_rows(self) -> list[dict]:
        return [row.to_dict() for row in self.rows]


def _counted_setting(config: SourceConfig, budget: float, seed: int,
                     probe_step: Angle, duration_s: float):
    """Probe the balanced angle, then acquire all four contexts there.

    Streams derive from (seed, phi_s); row order in a sweep is irrelevant.
    """
    rho = noisy_state(config)
    key = angle_key(config.phi_s.degrees)
    guess = balance_phi_m_for_state(pure_to_density(ideal_state(config.phi_s)))
    probe_rng = derive_rng(seed, key, 101)
    probe = sampled_counts_probe(rho, budget, probe_rng, duration_s)
    phi_m = balance_phi_m_probed(probe, guess, probe_step)
    counts = {}
    for index, context in enumerate(standard_contexts(phi_m)):
        rng = derive_rng(seed, key, index)
        counts[context.label] = sample_context(
            context_probabilities(rho, context), budget, rng, duration_s
        )
    return phi_m, counts


def _sweep_row(config: SourceConfig, mode: str, budget: float, seed: int,
               probe_step: Angle, duration_s: float) -> SweepRow:
    if mode == "exact":
        rho = noisy_state(config)
        phi_m = balance_phi_m_for_state(rho)
        est = {
            ctx.label: probabilities_to_estimates(context_probabilities(rho, ctx))
            for ctx in standard_contexts(phi_m)
        }
        p_00 = est["FF"][("0", "0")]
        p_11 = est["FF"][("1", "1")]
        p_0a = est["FW"][("0", "a")]
        p_a0 = est["WF"][("a", "0")]
        p_aa = est["WW"][("a", "a")]
    else:
        phi_m, counts = _counted_setting(config, budget, seed, probe_step, duration_s)
        p_00 = probability_estimate(counts["FF"], ("0", "0"))
        p_11 = probability_estimate(counts["FF"], ("1", "1"))
        p_0a = probability_estimate(counts["FW"], ("0", "a"))
        p_a0 = probability_estimate(counts["WF"], ("a", "0"))
        p_aa = probability_estimate(counts["WW"], ("a", "a"))
    k = contrast_k(p_aa, p_0a, p_a0, p_11)
    return SweepRow(config.phi_s, phi_m, p_00, p_0a, p_a0, p_11, p_aa, k)


def sweep_phi_s(
    grid,
    config: SourceConfig,
    mode: str = "exact",
    budget: float = 11400.0,
    seed: int = 0,
    criterion: str = "max-K",
    probe_step: Angle = Angle(3.0),
    duration_s: float = 10.0,
) -> ProtocolReport:
    """Run the full protocol over a grid of entanglement degrees.

    ``mode="exact"`` evaluates the model; ``mode="counted"`` simulates the
    probed optimization and Poisson acquisitions, with every row drawing from
    a stream derived from (seed, phi_s) so results do not depend on grid
    order and identical inputs reproduce identical reports byte for byte.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    angles = [phi if isinstance(phi, Angle) else Angle(float(phi)) for phi in grid]
    if not angles:
        raise ValueError("grid must contain at least one angle")
    rows = tuple(
        _sweep_row(config.with_phi_s(phi), mode, budget, seed, probe_step, duration_s)
        for phi in angles
    )
    if criterion == "max-K":
        best = max(range(len(rows)), key=lambda i: rows[i].k.value)
    else:
        best = min(range(len(rows)), key=lambda i: rows[i].p_11.value)
    meta = {
        "seed": seed,
        "config": {
            "grid_deg": [phi.degrees for phi in angles],
            "mode": mode,
            "budget": budget,
            "criterion": criterion,
            "probe_step_deg": probe_step.degrees,
            "duration_s": duration_s,
            "source": {
                "white_noise_w": config.white_noise_w,
                "hv_dephasing_d": config.hv_dephasing_d,
            },
        },
        "version": _version(),
    }
    return ProtocolReport(rows, rows[best].phi_s, criterion, meta)


def simulated_raw_counts(
    grid,
    config: SourceConfig,
    budget: float = 11400.0,
    seed: int = 0,
    probe_step: Angle = Angle(3.0),
    duration_s: float = 10.0,
):
    """Simulate the full acquisition as raw count tables in the fixture schemas.

    Returns (a1, a2): the zero-angle HV/PM-basis counts and the four-context
    counts at each setting's probed working point.  The context streams match
    ``sweep_phi_s(mode="counted")`` with the same seed, so analyzing the
    simulated tables reproduces the sweep's probabilities.
    """
    a1_rows, a2_rows = [], []
    zero = Angle(0.0)
    for phi in grid:
        phi = phi if isinstance(phi, Angle) else Angle(float(phi))
        cfg = config.with_phi_s(phi)
        rho = noisy_state(cfg)
        key = angle_key(phi.degrees)
        ff0 = sample_context(
            context_probabilities(rho, MeasurementContext("F", "F", zero)),
            budget, derive_rng(seed, key, 20), duration_s,
        )
        ww0 = sample_context(
            context_probabilities(rho, MeasurementContext("W", "W", zero)),
            budget, derive_rng(seed, key, 21), duration_s,
        )
        # At zero analyzer angle the unbiased outcomes are the diagonal
        # polarizations: a = M, b = P.
        a1_rows.append(dataio.RawCountsRow(phi.degrees, {
            "n_hh": ff0.n[("0", "0")], "n_hv": ff0.n[("0", "1")],
            "n_vh": ff0.n[("1", "0")], "n_vv": ff0.n[("1", "1")],
            "n_pp": ww0.n[("b", "b")], "n_pm": ww0.n[("b", "a")],
            "n_mp": ww0.n[("a", "b")], "n_mm": ww0.n[("a", "a")],
        }))
        _, counts = _counted_setting(cfg, budget, seed, probe_step, duration_s)
        a2_rows.append(dataio.RawCountsRow(phi.degrees, {
            "n_00": counts["FF"].n[("0", "0")], "n_01": counts["FF"].n[("0", "1")],
            "n_10": counts["FF"].n[("1", "0")], "n_11": counts["FF"].n[("1", "1")],
            "n_0a": counts["FW"].n[("0", "a")], "n_0b": counts["FW"].n[("0", "b")],
            "n_1a": counts["FW"].n[("1", "a")], "n_1b": counts["FW"].n[("1", "b")],
            "n_a0": counts["WF"].n[("a", "0")], "n_a1": counts["WF"].n[("a", "1")],
            "n_b0": counts["WF"].n[("b", "0")], "n_b1": counts["WF"].n[("b", "1")],
            "n_aa": counts["WW"].n[("a", "a")], "n_ab": counts["WW"].n[("a", "b")],
            "n_ba": counts["WW"].n[("b", "a")], "n_bb": counts["WW"].n[("b", "b")],
        }))
    return (
        dataio.RawCountsFile("A1", tuple(a1_rows)),
        dataio.RawCountsFile("A2", tuple(a2_rows)),
    )


def _version() -> str:
    from . import __version__

    return __version__
