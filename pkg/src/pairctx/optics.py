"""Polarization rotations, measurement contexts, and Born-rule probabilities.

Conventions used throughout the package:

* ``rotation(phi)`` is the counter-clockwise rotation [[c, -s], [s, c]].
* An analyzer set at angle ``phi_m`` detects the basis obtained by rotating
  the coordinate frame, so outcome states transform with the transpose:
  ``|0> = rotation(-phi_m)|H>`` and ``|1> = rotation(-phi_m)|V>``.  With this
  orientation the balanced rotation angle decreases from 45 deg (product
  source) toward 22.5 deg (maximally entangled source), matching the settings
  recorded with the bundled dataset.  The mirror orientation reproduces the
  same physics with phi_m negated and the a/b outcomes exchanged.
* The second measurement basis is the mutually unbiased pair
  ``|a> = (|0> - |1>)/sqrt(2)`` and ``|b> = (|0> + |1>)/sqrt(2)``.

A measurement context pairs one basis choice per photon: "F" for the first
basis (outcomes 0/1) and "W" for the unbiased one (outcomes a/b).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .qstate import (
    HV_FRAME,
    DensityMatrix2Q,
    PureState1Q,
    PureState2Q,
    Unitary1Q,
)

FIRST_BASIS = "F"
UNBIASED_BASIS = "W"

OUTCOMES = {FIRST_BASIS: ("0", "1"), UNBIASED_BASIS: ("a", "b")}

_SQRT2 = math.sqrt(2.0)

# Outcome coordinates in the measurement frame (before the analyzer rotation).
_BASE_VECTORS = {
    "0": np.array([1.0, 0.0]),
    "1": np.array([0.0, 1.0]),
    "a": np.array([1.0, -1.0]) / _SQRT2,
    "b": np.array([1.0, 1.0]) / _SQRT2,
}


@dataclass(frozen=True)
class Angle:
    """Plane angle stored in degrees, canonicalized to [-180, 180)."""

    degrees: float

    def __post_init__(self):
        deg = float(self.degrees)
        if not math.isfinite(deg):
            raise ValueError("angle must be finite")
        object.__setattr__(self, "degrees", (deg + 180.0) % 360.0 - 180.0)

    @classmethod
    def from_radians(cls, rad: float) -> "Angle":
        return cls(math.degrees(rad))

    @property
    def radians(self) -> float:
        return math.radians(self.degrees)

    def __neg__(self) -> "Angle":
        return Angle(-self.degrees)


@dataclass(frozen=True)
class MeasurementContext:
    """Basis choice per photon plus the shared analyzer rotation.

    ``phi_m is None`` marks ingested data whose analyzer setting was not
    recorded alongside the counts; model-driven paths always set it.
    """

    side1: str
    side2: str
    phi_m: Angle | None

    def __post_init__(self):
        for side in (self.side1, self.side2):
            if side not in OUTCOMES:
                raise ValueError(f"unknown basis {side!r}; expected 'F' or 'W'")

    @property
    def label(self) -> str:
        return self.side1 + self.side2

    def outcome_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple((x, y) for x in OUTCOMES[self.side1] for y in OUTCOMES[self.side2])


def standard_contexts(phi_m: Angle) -> tuple[MeasurementContext, ...]:
    """The four contexts FF, FW, WF, WW at one analyzer angle."""
    return tuple(
        MeasurementContext(s1, s2, phi_m)
        for s1 in (FIRST_BASIS, UNBIASED_BASIS)
        for s2 in (FIRST_BASIS, UNBIASED_BASIS)
    )


@dataclass(frozen=True)
class ContextProbabilities:
    """Exact outcome distribution of one context; values sum to 1."""

    context: MeasurementContext
    p: dict

    def __post_init__(self):
        pairs = self.context.outcome_pairs()
        if set(self.p) != set(pairs):
            raise ValueError("probability keys do not match the context outcomes")
        total = 0.0
        for pair in pairs:
            value = self.p[pair]
            if not (-1e-10 <= value <= 1 + 1e-10):
                raise ValueError(f"probability {value!r} for {pair} out of range")
            total += value
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def __getitem__(self, pair: tuple[str, str]) -> float:
        return self.p[pair]


def rotation(phi: Angle) -> Unitary1Q:
    """Counter-clockwise rotation by ``phi``: [[cos, -sin], [sin, cos]]."""
    c, s = math.cos(phi.radians), math.sin(phi.radians)
    return Unitary1Q(np.array([[c, -s], [s, c]]))


def outcome_state(label: str, phi_m: Angle) -> PureState1Q:
    """Detected single-photon state for one outcome label, in HV coordinates."""
    if label not in _BASE_VECTORS:
        raise ValueError(f"unknown outcome label {label!r}")
    vec = rotation(-phi_m).matrix @ _BASE_VECTORS[label]
    return PureState1Q(complex(vec[0]), complex(vec[1]), HV_FRAME)


def joint_probability(state: DensityMatrix2Q, outcomes: tuple[str, str], phi_m: Angle) -> float:
    """Born probability of one coincidence outcome (x, y) at analyzer angle phi_m."""
    if state.frame != HV_FRAME:
        raise ValueError("density matrix must be expressed in the HV frame")
    x = outcome_state(outcomes[0], phi_m).vector
    y = outcome_state(outcomes[1], phi_m).vector
    v = np.kron(x, y)
    p = float(np.real(np.vdot(v, state.matrix @ v)))
    # Clip the rounding fuzz only; genuine negativity is rejected upstream.
    return min(max(p, 0.0), 1.0)


def context_probabilities(state: DensityMatrix2Q, context: MeasurementContext) -> ContextProbabilities:
    """Exact outcome distribution of one measurement context."""
    if context.phi_m is None:
        raise ValueError("context has no recorded analyzer angle")
    probs = {
        pair: joint_probability(state, pair, context.phi_m)
        for pair in context.outcome_pairs()
    }
    return ContextProbabilities(context, probs)


def hardy_target_state(phi_m: Angle) -> PureState2Q:
    """The unique two-photon state whose (0,a), (a,0) and (1,1) coincidences
    all vanish at analyzer angle ``phi_m``, expressed in HV coordinates.

    In its own measurement frame the state reads (|00> + |01> + |10>)/sqrt(3),
    which makes the surviving paradox probability P(a,a) equal 1/12.
    """
    meas_amps = np.array([1.0, 1.0, 1.0, 0.0]) / math.sqrt(3.0)
    basis = rotation(-phi_m).matrix  # columns are |0>, |1> in HV coordinates
    return PureState2Q(np.kron(basis, basis) @ meas_amps, HV_FRAME)
