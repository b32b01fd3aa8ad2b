"""Exact complex linear algebra for one- and two-qubit polarization states.

Two-qubit amplitudes always use the fixed ordering (00, 01, 10, 11), i.e. the
first photon's label varies slowest.  Every state carries a basis-frame tag so
that coordinates written in the source HV frame cannot silently mix with
coordinates written in a rotated measurement frame; combining mismatched
frames raises :class:`FrameMismatchError`.

All value types are frozen dataclasses and the wrapped numpy arrays are marked
read-only, so instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

HV_FRAME = "HV"

# Construction tolerance.  Derived operations guarantee 1e-10.
NORM_TOL = 1e-12


class FrameMismatchError(ValueError):
    """Two states expressed in different basis frames were combined."""


def _frozen_complex(values, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(shape)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("amplitudes must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState1Q:
    """Single-photon pure state with amplitudes (c0, c1) in a tagged basis."""

    c0: complex
    c1: complex
    frame: str = HV_FRAME

    def __post_init__(self):
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")

    @classmethod
    def normalized(cls, c0: complex, c1: complex, frame: str = HV_FRAME) -> "PureState1Q":
        """Build a state from unnormalized amplitudes."""
        norm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite amplitude pair")
        return cls(c0 / norm, c1 / norm, frame)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)


@dataclass(frozen=True)
class PureState2Q:
    """Two-photon pure state; ``amplitudes[2*i + j]`` belongs to outcome (i, j)."""

    amplitudes: np.ndarray
    frame: str = HV_FRAME

    def __post_init__(self):
        amps = _frozen_complex(self.amplitudes, (4,))
        object.__setattr__(self, "amplitudes", amps)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")

    @classmethod
    def normalized(cls, amplitudes, frame: str = HV_FRAME) -> "PureState2Q":
        arr = np.asarray(amplitudes, dtype=complex).reshape(4)
        norm = float(np.linalg.norm(arr))
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite amplitude vector")
        return cls(arr / norm, frame)

    @property
    def amplitude_matrix(self) -> np.ndarray:
        """2x2 matrix M with M[i, j] the amplitude of photon-1 outcome i, photon-2 outcome j."""
        return self.amplitudes.reshape(2, 2)


@dataclass(frozen=True)
class Unitary1Q:
    """Single-photon unitary, validated to satisfy U^dag U = 1 within 1e-12."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_complex(self.matrix, (2, 2))
        object.__setattr__(self, "matrix", mat)
        defect = np.abs(mat.conj().T @ mat - np.eye(2)).max()
        if defect > NORM_TOL:
            raise ValueError(f"matrix is not unitary (defect {defect:.3e})")


@dataclass(frozen=True)
class DensityMatrix2Q:
    """Two-photon density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray
    frame: str = HV_FRAME

    def __post_init__(self):
        mat = _frozen_complex(self.matrix, (4, 4))
        object.__setattr__(self, "matrix", mat)
        if np.abs(mat - mat.conj().T).max() > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {trace!r} differs from 1")
        # Small negative eigenvalues from rounding are tolerated to -1e-10.
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def tensor(first: PureState1Q, second: PureState1Q) -> PureState2Q:
    """Product state of two single-photon states sharing one frame."""
    if first.frame != second.frame:
        raise FrameMismatchError(f"cannot tensor frames {first.frame!r} and {second.frame!r}")
    return PureState2Q(np.kron(first.vector, second.vector), first.frame)


def inner_product(bra: PureState2Q, ket: PureState2Q) -> complex:
    """<bra|ket>, conjugate-linear in the first argument; frames must match."""
    if bra.frame != ket.frame:
        raise FrameMismatchError(f"cannot contract frames {bra.frame!r} and {ket.frame!r}")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply_local(u1: Unitary1Q, u2: Unitary1Q, state: PureState2Q) -> PureState2Q:
    """Apply u1 to photon 1 and u2 to photon 2; the frame tag is unchanged."""
    out = np.kron(u1.matrix, u2.matrix) @ state.amplitudes
    return PureState2Q(out, state.frame)


def pure_to_density(state: PureState2Q) -> DensityMatrix2Q:
    """Rank-one projector |state><state|."""
    return DensityMatrix2Q(np.outer(state.amplitudes, state.amplitudes.conj()), state.frame)


def schmidt_coefficients(state: PureState2Q) -> tuple[float, float]:
    """Squared Schmidt values (descending); equal to the eigenvalues of the
    photon-1 reduced density matrix and invariant under local unitaries."""
    singular = np.linalg.svd(state.amplitude_matrix, compute_uv=False)
    lam = np.sort(singular**2)[::-1]
    return float(lam[0]), float(lam[1])
