"""Pulse characterization runs: removal, coherences, robustness."""
from __future__ import annotations

import math

import numpy as np

from .errors import NonPositiveCoherence, NonPositivePopulation, PulseTooLong
from .lindblad import (
    EvolutionContext,
    Trajectory,
    build_context,
    evolve,
    plus_state,
    product_state,
    thermal_resonator_state,
)
from .params import DeviceParams, DrivePulse


def run_lru(
    params: DeviceParams,
    pulse: DrivePulse,
    initial_transmon_level: int,
    T_slot: float,
    sample_times=None,
    ctx: EvolutionContext | None = None,
    **kw,
) -> tuple[float, Trajectory]:
    """Apply the removal pulse and idle until the end of the time slot.

    Returns the final transmon leakage population and the trajectory.
    """
    if pulse.t_p > T_slot * (1.0 + 1e-12):
        raise PulseTooLong(f"t_p = {pulse.t_p:.3e} exceeds T_slot = {T_slot:.3e}")
    if initial_transmon_level not in (0, 1, 2):
        raise ValueError("initial transmon level must be 0, 1 or 2")
    sigma = thermal_resonator_state(params.nbar, params.n_resonator)
    rho0 = product_state(params, initial_transmon_level, sigma)
    traj = evolve(params, pulse, rho0, T_slot, sample_times=sample_times, ctx=ctx, **kw)
    return float(traj.transmon_population(2)[-1]), traj


def effective_T1(
    params: DeviceParams,
    pulse: DrivePulse,
    T_slot: float,
    ctx: EvolutionContext | None = None,
) -> float:
    """Decay time over the whole slot from the remaining |1> population."""
    sigma = thermal_resonator_state(params.nbar, params.n_resonator)
    rho0 = product_state(params, 1, sigma)
    traj = evolve(
        params, pulse, rho0, T_slot, sample_times=np.array([0.0, T_slot]), ctx=ctx
    )
    p1 = float(traj.transmon_population(1)[-1])
    if p1 <= 0.0:
        raise NonPositivePopulation(f"p1(T_slot) = {p1:g}")
    return -T_slot / math.log(p1)


def effective_T2(
    params: DeviceParams,
    pulse: DrivePulse,
    T_slot: float,
    ctx: EvolutionContext | None = None,
) -> float:
    """Dephasing time from the decay of the 0-1 transmon coherence."""
    sigma = thermal_resonator_state(params.nbar, params.n_resonator)
    rho0 = plus_state(params, sigma)
    traj = evolve(
        params,
        pulse,
        rho0,
        T_slot,
        sample_times=np.array([0.0, T_slot]),
        ctx=ctx,
        keep_states=True,
    )
    rho = traj.states[-1]
    nr = params.n_resonator
    coh = sum(rho[0 * nr + l, 1 * nr + l] for l in range(nr))
    mag = abs(complex(coh))
    if mag <= 0.0:
        raise NonPositiveCoherence("vanishing 0-1 coherence at the slot end")
    return -T_slot / math.log(2.0 * mag)


def excitation_time(
    params: DeviceParams,
    pulse: DrivePulse,
    T_slot: float,
    ctx: EvolutionContext | None = None,
) -> float:
    """Inverse excitation rate from the |1> population grown out of |0>.

    Linearized inversion of 1 - exp(-T/T_up); infinite when no population
    appears.
    """
    sigma = thermal_resonator_state(params.nbar, params.n_resonator)
    rho0 = product_state(params, 0, sigma)
    traj = evolve(
        params, pulse, rho0, T_slot, sample_times=np.array([0.0, T_slot]), ctx=ctx
    )
    p1 = float(traj.transmon_population(1)[-1])
    if p1 <= 1e-14:
        return math.inf
    return T_slot / p1


def zz_sensitivity(
    params: DeviceParams,
    pulse: DrivePulse,
    zeta_list,
    T_slot: float,
) -> list[tuple[float, float]]:
    """Leakage-reduction rate R = 1 - p2 versus a transmon frequency shift.

    The pulse is held fixed while omega_q -> omega_q + zeta, mimicking a
    residual static ZZ shift from neighboring qubits.
    """
    out = []
    for zeta in zeta_list:
        shifted = params.with_qubit_shift(float(zeta))
        p2, _ = run_lru(shifted, pulse, 2, T_slot)
        out.append((float(zeta), 1.0 - p2))
    return out


def long_drive_run(
    params: DeviceParams,
    Omega: float,
    omega_d: float,
    T_slot: float,
    t_rise: float = 30e-9,
    sample_times=None,
    ctx: EvolutionContext | None = None,
) -> Trajectory:
    """Always-on drive during the slot: ramp up, then hold until T_slot."""
    pulse = DrivePulse(
        Omega=Omega, omega_d=omega_d, phi=0.0, t_rise=t_rise, t_p=T_slot + t_rise
    )
    sigma = thermal_resonator_state(params.nbar, params.n_resonator)
    rho0 = product_state(params, 2, sigma)
    return evolve(params, pulse, rho0, T_slot, sample_times=sample_times, ctx=ctx)
