"""First transformation: dressing by the capacitive coupling.

Closed forms for the generator, the dressed static Hamiltonian and the
dressed drive.  The two-photon and indirect-drive coefficients follow
the single-commutator result [S1, Hd]; see the project notes for the
sign convention (the commutator route is authoritative).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateDenominator
from ..operators import destroy
from ..params import TWO_PI, DeviceParams, DrivePulse

DENOMINATOR_GUARD = TWO_PI * 1e6


@dataclass(frozen=True)
class Detunings:
    """Detuning ladders entering the analytic stack.

    Delta_m          : Delta + alpha*m
    delta_q_m        : bare drive detuning ladder, delta^q + alpha*m
    delta_q_tilde_m  : Stark-corrected ladder (transition energies of the
                       dressed transmon); the denominators of the second
                       transformation
    delta_q_doubletilde_m : diagonal coefficient of the second-order
                       drive shift, identically (m+1)*dqt(m-1) - m*dqt(m)
    """

    params: DeviceParams
    omega_d: float

    def Delta_m(self, m: int) -> float:
        return self.params.Delta_m(m)

    def delta_q_m(self, m: int) -> float:
        return self.params.delta_q(self.omega_d) + self.params.alpha * m

    def delta_q_tilde_m(self, m: int) -> float:
        p = self.params
        return self.delta_q_m(m) + p.g**2 * p.Delta_m(-1) / (
            p.Delta_m(m - 1) * p.Delta_m(m)
        )

    def delta_q_doubletilde_m(self, m: int) -> float:
        return (m + 1) * self.delta_q_tilde_m(m - 1) - m * self.delta_q_tilde_m(m)

    def guard(self, m_max: int) -> None:
        """Raise when any used dispersive denominator is degenerate."""
        p = self.params
        for m in range(-2, m_max + 2):
            if abs(p.Delta_m(m)) < DENOMINATOR_GUARD:
                raise DegenerateDenominator(
                    f"|Delta + {m}*alpha| = "
                    f"{abs(p.Delta_m(m)) / TWO_PI:.3g} Hz below guard"
                )

    def guard_drive(self, m_max: int) -> None:
        for m in range(-2, m_max + 2):
            if abs(self.delta_q_tilde_m(m)) < DENOMINATOR_GUARD:
                raise DegenerateDenominator(
                    f"|delta^q_{m}| = "
                    f"{abs(self.delta_q_tilde_m(m)) / TWO_PI:.3g} Hz below guard"
                )


def _check_Delta(params: DeviceParams, m_max: int) -> None:
    for m in range(-1, m_max):
        if abs(params.Delta_m(m)) < DENOMINATOR_GUARD:
            raise DegenerateDenominator(
                f"|Delta + {m}*alpha| below 2*pi*1 MHz at m={m}"
            )


def s1_capacitive(params: DeviceParams) -> np.ndarray:
    """Generator of the capacitive dressing.

    S1 = g sum_m sqrt(m)/(Delta + alpha(m-1)) (a |m><m-1| - h.c.),
    anti-hermitian, independent of the drive frequency.
    """
    nt, nr = params.n_transmon, params.n_resonator
    _check_Delta(params, nt - 1)
    a_r = destroy(nr)
    s = np.zeros((nt * nr, nt * nr), dtype=complex)
    for m in range(1, nt):
        coeff = params.g * math.sqrt(m) / params.Delta_m(m - 1)
        raise_t = np.zeros((nt, nt))
        raise_t[m, m - 1] = 1.0
        s += coeff * np.kron(raise_t, a_r)
    return s - s.conj().T


def dressed_static_1st(params: DeviceParams, omega_d: float) -> np.ndarray:
    """Diagonal dressed Hamiltonian with Stark and dispersive shifts."""
    nt, nr = params.n_transmon, params.n_resonator
    _check_Delta(params, nt)
    g2 = params.g**2
    dq = params.delta_q(omega_d)
    dr = params.delta_r(omega_d)
    transmon = np.zeros(nt)
    disp = np.zeros(nt)
    for m in range(nt):
        transmon[m] = (
            m * dq + 0.5 * params.alpha * m * (m - 1) + g2 * m / params.Delta_m(m - 1)
        )
        disp[m] = g2 * params.Delta_m(-1) / (params.Delta_m(m) * params.Delta_m(m - 1))
    n_r = np.arange(nr, dtype=float)
    diag = (
        np.repeat(transmon, nr)
        + dr * np.tile(n_r, nt)
        - np.repeat(disp, nr) * np.tile(n_r, nt)
    )
    return np.diag(diag.astype(complex))


def dressed_drive_terms(
    params: DeviceParams, drive: DrivePulse
) -> tuple[np.ndarray, np.ndarray]:
    """Drive in the dressed frame: (Hd1^D, Hd2^D).

    Hd1^D is the bare transmon drive.  Hd2^D = [S1, Hd] holds the
    indirect resonator drive (diagonal in the transmon index) and the
    two-photon a^dag |m><m+2| couplings.
    """
    nt, nr = params.n_transmon, params.n_resonator
    _check_Delta(params, nt)
    omega, phi, g = drive.Omega, drive.phi, params.g
    a_r = destroy(nr)
    b_t = destroy(nt)
    hd1 = 0.5 * omega * (
        np.exp(1j * phi) * np.kron(b_t, np.eye(nr))
        + np.exp(-1j * phi) * np.kron(b_t.conj().T, np.eye(nr))
    )

    half = np.zeros((nt * nr, nt * nr), dtype=complex)
    for m in range(nt):
        # indirect resonator drive; the upper-path piece needs level m+1
        c0 = g * m / params.Delta_m(m - 1)
        if m + 1 <= nt - 1:
            c0 -= g * (m + 1) / params.Delta_m(m)
        proj = np.zeros((nt, nt))
        proj[m, m] = 1.0
        half += 0.5 * omega * np.exp(1j * phi) * c0 * np.kron(proj, a_r)
    for m in range(nt - 2):
        # two-photon coupling, both paths need level m+2
        c2 = (
            -g
            * params.alpha
            * math.sqrt((m + 1) * (m + 2))
            / (params.Delta_m(m) * params.Delta_m(m + 1))
        )
        hop = np.zeros((nt, nt))
        hop[m, m + 2] = 1.0
        half += 0.5 * omega * np.exp(1j * phi) * c2 * np.kron(hop, a_r.conj().T)
    hd2 = half + half.conj().T
    return hd1, hd2


def g_tilde_lowest_order(params: DeviceParams, Omega: float) -> float:
    """Lowest-order effective |2,0> <-> |0,1> coupling.

    Linear in the drive amplitude, vanishes with the anharmonicity; the
    sign follows the printed formula, magnitude is abs() of the return.
    """
    _check_Delta(params, 2)
    return (
        Omega
        * params.g
        * params.alpha
        / (math.sqrt(2.0) * params.Delta * (params.Delta + params.alpha))
    )
