"""Tunable-entanglement photon-pair source with a two-parameter noise model.

The ideal source emits cos(phi_s)|HH> - sin(phi_s)|VV>, sweeping from a
product state at phi_s = 0 to a maximally entangled state at 45 deg.  Real
data is modeled by two phi_s-independent imperfections applied in the HV
frame, before any analyzer rotation:

* ``hv_dephasing_d`` scales the HH<->VV coherences by (1 - d), and
* ``white_noise_w`` admixes the maximally mixed state with weight w.

Both parameters are fixed by the two measured visibilities of the maximally
entangled setting: C_HV determines w, the C_PM/C_HV ratio determines d.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np

from .optics import Angle
from .qstate import DensityMatrix2Q, PureState2Q, pure_to_density


@dataclass(frozen=True)
class SourceConfig:
    """Source setting: entanglement-degree angle plus the two noise weights."""

    phi_s: Angle
    white_noise_w: float = 0.0
    hv_dephasing_d: float = 0.0

    def __post_init__(self):
        for name in ("white_noise_w", "hv_dephasing_d"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0) or not math.isfinite(value):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    def with_phi_s(self, phi_s: Angle) -> "SourceConfig":
        return replace(self, phi_s=phi_s)

    def to_dict(self) -> dict:
        return {
            "phi_s_deg": self.phi_s.degrees,
            "white_noise_w": self.white_noise_w,
            "hv_dephasing_d": self.hv_dephasing_d,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SourceConfig":
        return cls(
            phi_s=Angle(float(data["phi_s_deg"])),
            white_noise_w=float(data.get("white_noise_w", 0.0)),
            hv_dephasing_d=float(data.get("hv_dephasing_d", 0.0)),
        )


def ideal_state(phi_s: Angle) -> PureState2Q:
    """Noiseless source state cos(phi_s)|HH> - sin(phi_s)|VV>."""
    rad = phi_s.radians
    return PureState2Q(np.array([math.cos(rad), 0.0, 0.0, -math.sin(rad)], dtype=complex))


def noisy_state(config: SourceConfig) -> DensityMatrix2Q:
    """Source density matrix with dephasing applied before white noise."""
    rho = np.array(pure_to_density(ideal_state(config.phi_s)).matrix)
    keep = 1.0 - config.hv_dephasing_d
    rho[0, 3] *= keep
    rho[3, 0] *= keep
    rho = (1.0 - config.white_noise_w) * rho + config.white_noise_w * np.eye(4) / 4.0
    return DensityMatrix2Q(rho)


def calibrate_noise(c_hv: float, c_pm: float) -> tuple[float, float]:
    """Invert the measured maximally-entangled visibilities to (w, d).

    The model gives C_HV = 1 - w at every phi_s and, at phi_s = 45 deg,
    C_PM = (1 - w)(1 - d); hence w = 1 - C_HV and d = 1 - C_PM / C_HV.
    Requires 0 < C_PM <= C_HV <= 1; the model cannot produce C_PM > C_HV.
    """
    if not (0.0 < c_hv <= 1.0) or not (0.0 < c_pm <= 1.0):
        raise ValueError("visibilities must lie in (0, 1]")
    if c_pm > c_hv:
        raise ValueError(
            f"unsupported regime: C_PM={c_pm!r} exceeds C_HV={c_hv!r}, "
            "which no (w, d) setting reproduces"
        )
    return 1.0 - c_hv, 1.0 - c_pm / c_hv
