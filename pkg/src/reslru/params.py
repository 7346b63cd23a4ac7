"""Physical parameters of the driven transmon-resonator pair.

All frequencies are stored as angular frequencies (rad/s).  Constructors
with a ``_hz`` suffix take ordinary frequencies (cycles/s) and apply the
2*pi conversion, which is the only place that conversion happens.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviceParams:
    """Static constants of one transmon coupled to one readout resonator.

    omega_q, omega_r : transmon / resonator angular frequency (rad/s)
    alpha            : transmon anharmonicity (rad/s, negative)
    g                : capacitive coupling (rad/s)
    kappa            : resonator decay rate 1/T1_r (rad/s)
    nbar             : mean thermal photon number of the resonator
    T1_q, T2_q       : transmon relaxation / dephasing times (s)
    T2_r             : resonator dephasing time (s)
    n_transmon, n_resonator : Hilbert-space truncations
    """

    omega_q: float
    omega_r: float
    alpha: float
    g: float
    kappa: float
    nbar: float
    T1_q: float
    T2_q: float
    T2_r: float
    n_transmon: int = 6
    n_resonator: int = 3

    def __post_init__(self):
        if not (self.omega_q > 0 and self.omega_r > 0):
            raise ValueError("omega_q and omega_r must be positive")
        if not self.alpha < 0:
            raise ValueError("alpha must be negative for a transmon")
        if not self.g > 0:
            raise ValueError("g must be positive")
        if self.n_transmon < 3:
            raise ValueError("need at least 3 transmon levels to model leakage")
        if self.n_resonator < 2:
            raise ValueError("need at least 2 resonator levels")
        if self.T2_q > 2.0 * self.T1_q * (1.0 + 1e-12):
            raise ValueError("T2_q exceeds the 2*T1_q limit")
        if self.kappa > 0 and self.T2_r > 2.0 / self.kappa * (1.0 + 1e-12):
            raise ValueError("T2_r exceeds the 2*T1_r limit")
        if self.nbar < 0:
            raise ValueError("nbar must be non-negative")

    @classmethod
    def from_hz(cls, f_q, f_r, anh, g, kappa, **kw) -> "DeviceParams":
        """Build from plain frequencies in Hz (omega/2pi convention)."""
        return cls(
            omega_q=TWO_PI * f_q,
            omega_r=TWO_PI * f_r,
            alpha=TWO_PI * anh,
            g=TWO_PI * g,
            kappa=TWO_PI * kappa,
            **kw,
        )

    # Derived detunings -------------------------------------------------
    @property
    def Delta(self) -> float:
        """Transmon-resonator detuning omega_q - omega_r (rad/s)."""
        return self.omega_q - self.omega_r

    def Delta_m(self, m: int) -> float:
        """Delta + alpha*m (rad/s)."""
        return self.Delta + self.alpha * m

    def delta_r(self, omega_d: float) -> float:
        """Resonator detuning from the drive, omega_r - omega_d."""
        return self.omega_r - omega_d

    def delta_q(self, omega_d: float) -> float:
        """Transmon detuning from the drive, omega_q - omega_d."""
        return self.omega_q - omega_d

    @property
    def T1_r(self) -> float:
        return 1.0 / self.kappa

    @property
    def Tphi_q(self) -> float:
        """Transmon pure-dephasing time; inf when T2 = 2*T1."""
        rate = 1.0 / self.T2_q - 0.5 / self.T1_q
        return math.inf if rate <= 0 else 1.0 / rate

    @property
    def Tphi_r(self) -> float:
        rate = 1.0 / self.T2_r - 0.5 * self.kappa
        return math.inf if rate <= 0 else 1.0 / rate

    @property
    def dim(self) -> int:
        return self.n_transmon * self.n_resonator

    @property
    def bare_crossing(self) -> float:
        """Drive frequency where bare |2,0> and |0,1> are degenerate."""
        return 2.0 * self.omega_q + self.alpha - self.omega_r

    def with_qubit_shift(self, zeta: float) -> "DeviceParams":
        """Copy with the transmon frequency shifted by zeta (rad/s)."""
        return replace(self, omega_q=self.omega_q + zeta)

    def with_truncation(self, n_transmon: int, n_resonator: int) -> "DeviceParams":
        return replace(self, n_transmon=n_transmon, n_resonator=n_resonator)


@dataclass(frozen=True)
class DrivePulse:
    """Flat-top drive pulse with sin^2 ramps.

    Omega   : peak amplitude (rad/s)
    omega_d : drive angular frequency (rad/s)
    phi     : drive phase (rad)
    t_rise  : ramp duration (s); the fall mirrors the rise
    t_p     : total pulse duration (s), >= 2*t_rise
    """

    Omega: float
    omega_d: float
    phi: float = 0.0
    t_rise: float = 30e-9
    t_p: float = 440e-9

    def __post_init__(self):
        if self.Omega < 0:
            raise ValueError("Omega must be non-negative")
        if self.t_p < 2.0 * self.t_rise * (1.0 - 1e-12):
            raise ValueError("t_p must be at least 2*t_rise")

    @classmethod
    def from_hz(cls, amp_hz, f_d, **kw) -> "DrivePulse":
        return cls(Omega=TWO_PI * amp_hz, omega_d=TWO_PI * f_d, **kw)

    def with_tp(self, t_p: float) -> "DrivePulse":
        return DrivePulse(self.Omega, self.omega_d, self.phi, self.t_rise, t_p)


@dataclass(frozen=True)
class ScheduleParams:
    """Per-QEC-cycle operation durations (s)."""

    t_gate: float = 20e-9
    t_int: float = 30e-9
    t_pc: float = 10e-9
    t_res_lru: float = 100e-9
    t_pi_lru: float = 20e-9
    t_m: float = 580e-9
    t_c: float = 800e-9
    T_slot: float = 440e-9


def table1_device(n_transmon: int = 6, n_resonator: int = 3) -> DeviceParams:
    """Target parameters of a high-frequency data qubit and its resonator.

    T2_r is set to the exact 2/kappa limit so that the resonator
    pure-dephasing channel vanishes identically.
    """
    kappa = TWO_PI * 10e6
    return DeviceParams.from_hz(
        f_q=6.7e9,
        f_r=7.8e9,
        anh=-300e6,
        g=135e6,
        kappa=10e6,
        nbar=0.005,
        T1_q=30e-6,
        T2_q=30e-6,
        T2_r=2.0 / kappa,
        n_transmon=n_transmon,
        n_resonator=n_resonator,
    )


def operating_pulse() -> DrivePulse:
    """The selected operating point of the leakage-removal pulse."""
    return DrivePulse.from_hz(amp_hz=204e6, f_d=5.2464e9, t_rise=30e-9, t_p=178.6e-9)


T_SLOT_DEFAULT = 440e-9
