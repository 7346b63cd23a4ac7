"""Operators on the truncated transmon-resonator product space.

Tensor ordering is transmon (x) resonator: basis state |m, l> sits at
row m*n_resonator + l.  ``a`` annihilates a resonator excitation and
``b`` a transmon excitation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .params import DeviceParams, DrivePulse

HERMITICITY_TOL = 1e-12


def destroy(n: int) -> np.ndarray:
    """Truncated annihilation operator with entries sqrt(1..n-1)."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on the product space, tagged with its factor dims."""

    dims: tuple[int, int]
    matrix: np.ndarray = field(repr=False)
    hermitian: bool = False

    def __post_init__(self):
        n = self.dims[0] * self.dims[1]
        if self.matrix.shape != (n, n):
            raise DimensionMismatch(
                f"matrix shape {self.matrix.shape} does not match dims {self.dims}"
            )
        if self.hermitian:
            scale = max(1.0, float(np.abs(self.matrix).max()))
            drift = float(np.abs(self.matrix - self.matrix.conj().T).max())
            if drift > HERMITICITY_TOL * scale:
                raise ValueError(f"hermitian flag set but max|O - O^dag| = {drift:g}")

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def to_json(self) -> str:
        """Serialize as dims plus row-major interleaved re/im pairs."""
        flat = self.matrix.ravel()
        data = np.empty(2 * flat.size)
        data[0::2] = flat.real
        data[1::2] = flat.imag
        return json.dumps(
            {"dims": list(self.dims), "hermitian": self.hermitian, "entries": data.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "OperatorMatrix":
        obj = json.loads(text)
        dims = tuple(obj["dims"])
        n = dims[0] * dims[1]
        data = np.asarray(obj["entries"], dtype=float)
        mat = (data[0::2] + 1j * data[1::2]).reshape(n, n)
        return cls(dims=dims, matrix=mat, hermitian=bool(obj["hermitian"]))


def as_array(op) -> np.ndarray:
    """Accept an OperatorMatrix or a bare ndarray."""
    return op.matrix if isinstance(op, OperatorMatrix) else np.asarray(op)


def build_ladder_ops(params: DeviceParams) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Product-space annihilation operators (a for resonator, b for transmon)."""
    nt, nr = params.n_transmon, params.n_resonator
    a = np.kron(np.eye(nt, dtype=complex), destroy(nr))
    b = np.kron(destroy(nt), np.eye(nr, dtype=complex))
    return (
        OperatorMatrix(dims=(nt, nr), matrix=a),
        OperatorMatrix(dims=(nt, nr), matrix=b),
    )


def static_hamiltonian(params: DeviceParams, omega_d: float) -> np.ndarray:
    """H0 + Hc in the frame rotating at omega_d (rad/s)."""
    a, b = (op.matrix for op in build_ladder_ops(params))
    ad, bd = a.conj().T, b.conj().T
    h = (
        params.delta_r(omega_d) * (ad @ a)
        + params.delta_q(omega_d) * (bd @ b)
        + 0.5 * params.alpha * (bd @ bd @ b @ b)
        + params.g * (a @ bd + ad @ b)
    )
    return h


def drive_hamiltonian(params: DeviceParams, Omega: float, phi: float = 0.0) -> np.ndarray:
    """Hd = (Omega/2) (e^{i phi} b + h.c.)."""
    _, b = (op.matrix for op in build_ladder_ops(params))
    return 0.5 * Omega * (np.exp(1j * phi) * b + np.exp(-1j * phi) * b.conj().T)


def build_hamiltonian(
    params: DeviceParams, drive: DrivePulse, amplitude_scale: float = 1.0
) -> OperatorMatrix:
    """Full rotating-frame Hamiltonian with the drive scaled by the envelope.

    amplitude_scale is the instantaneous envelope value divided by Omega,
    in [0, 1].
    """
    h = static_hamiltonian(params, drive.omega_d) + drive_hamiltonian(
        params, amplitude_scale * drive.Omega, drive.phi
    )
    h = 0.5 * (h + h.conj().T)
    return OperatorMatrix(
        dims=(params.n_transmon, params.n_resonator), matrix=h, hermitian=True
    )


def bare_index(params: DeviceParams, m: int, l: int) -> int:
    return m * params.n_resonator + l
