"""Phenomenological qutrit channel of the readout-resonator removal unit.

The channel composes an exponentiated downward Lindbladian (the |2> -> |0>
transfer at a rate set by the target reduction, plus ordinary qutrit
relaxation and dephasing over the unit duration) with an exponentiated
upward jump carrying the induced leakage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import InvalidRates
from .markov import LRUParams

_DIM = 3


def _vec_superop(ham_part: np.ndarray | None, jumps: list[np.ndarray]) -> np.ndarray:
    """Lindbladian as a row-major-vec superoperator on 3x3 matrices."""
    eye = np.eye(_DIM)
    lio = np.zeros((_DIM * _DIM, _DIM * _DIM), dtype=complex)
    if ham_part is not None:
        lio += -1j * (np.kron(ham_part, eye) - np.kron(eye, ham_part.T))
    for k in jumps:
        kk = k.conj().T @ k
        lio += np.kron(k, k.conj()) - 0.5 * (np.kron(kk, eye) + np.kron(eye, kk.T))
    return lio


@dataclass(frozen=True)
class QutritChannel:
    """Trace-preserving map on qutrit density matrices (row-major vec)."""

    superoperator: np.ndarray = field(repr=False)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.superoperator @ rho.reshape(-1)).reshape(_DIM, _DIM)

    def populations(self, rho: np.ndarray) -> tuple[float, float, float]:
        out = self.apply(rho)
        return tuple(float(out[i, i].real) for i in range(_DIM))

    def choi(self) -> np.ndarray:
        """Choi matrix sum_ij |i><j| (x) Phi(|i><j|)."""
        c = np.zeros((_DIM * _DIM, _DIM * _DIM), dtype=complex)
        for i in range(_DIM):
            for j in range(_DIM):
                unit = np.zeros((_DIM, _DIM), dtype=complex)
                unit[i, j] = 1.0
                block = self.apply(unit)
                c[
                    i * _DIM : (i + 1) * _DIM, j * _DIM : (j + 1) * _DIM
                ] = block
        return c

    def is_trace_preserving(self, tol: float = 1e-10) -> bool:
        for i in range(_DIM):
            for j in range(_DIM):
                unit = np.zeros((_DIM, _DIM), dtype=complex)
                unit[i, j] = 1.0
                if abs(np.trace(self.apply(unit)) - (1.0 if i == j else 0.0)) > tol:
                    return False
        return True

    def choi_min_eigenvalue(self) -> float:
        c = self.choi()
        c = 0.5 * (c + c.conj().T)
        return float(np.linalg.eigvalsh(c).min())


def build_res_lru_channel(
    lru: LRUParams, t_lru: float, T1: float, Tphi: float = math.inf
) -> QutritChannel:
    """Downward transfer + relaxation/dephasing, then the upward jump.

    The transfer rate is fixed so that the simulated reduction equals
    R + 2*L1_LRU; with that choice the population action reproduces the
    affine map (1-R, 2*L1_LRU) up to relaxation corrections of order
    t_lru/T1.  R_sim = 1 is the complete-transfer limit and is handled
    by clamping just below 1 (transfer complete to double precision).
    """
    r_sim = lru.R + 2.0 * lru.L1_LRU
    if r_sim <= 0.0 or r_sim > 1.0 + 1e-9:
        raise InvalidRates(f"R + 2*L1_LRU = {r_sim:g} outside (0, 1]")
    r_sim = min(r_sim, 1.0 - 1e-15)
    if t_lru <= 0.0 or T1 <= 0.0:
        raise InvalidRates("t_lru and T1 must be positive")

    down = np.zeros((_DIM, _DIM), dtype=complex)
    down[0, 2] = 1.0
    jumps_down = [math.sqrt(-math.log(1.0 - r_sim) / t_lru) * down]
    relax1 = np.zeros((_DIM, _DIM), dtype=complex)
    relax1[0, 1] = 1.0
    relax2 = np.zeros((_DIM, _DIM), dtype=complex)
    relax2[1, 2] = 1.0
    jumps_down.append(math.sqrt(1.0 / T1) * relax1)
    jumps_down.append(math.sqrt(2.0 / T1) * relax2)
    if math.isfinite(Tphi):
        jumps_down.append(
            math.sqrt(2.0 / Tphi) * np.diag(np.arange(_DIM)).astype(complex)
        )
    s_down = expm(t_lru * _vec_superop(None, jumps_down))

    up = np.zeros((_DIM, _DIM), dtype=complex)
    up[2, 0] = 1.0
    if lru.L1_LRU > 0.0:
        rate_up = -math.log(1.0 - 2.0 * lru.L1_LRU)
        s_up = expm(_vec_superop(None, [math.sqrt(rate_up) * up]))
    else:
        s_up = np.eye(_DIM * _DIM, dtype=complex)

    return QutritChannel(superoperator=s_up @ s_down)
