"""Analytic avoided-crossing solver and the exact/analytic comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..crossing import find_avoided_crossing_exact
from ..errors import NoConvergence
from ..operators import bare_index
from ..params import TWO_PI, DeviceParams, DrivePulse
from .capacitive import dressed_static_1st, g_tilde_lowest_order
from .driven import double_dressed_static, effective_coupling, residual_coupling

SECANT_TOL = TWO_PI * 1e3
SECANT_MAX_ITER = 50
SECANT_OFFSET = TWO_PI * 10e6


@dataclass(frozen=True)
class EffectiveCouplingReport:
    """Analytic crossing location and coupling at a given drive amplitude.

    g_tilde_lowest  : lowest-order coupling (drive-frequency independent)
    g_tilde_order3  : third-order coupling evaluated at the analytic crossing
    omega_d_star_analytic : root of the double-dressed level splitting
    residual_norm   : largest residual matrix element within 3 excitations
    """

    Omega: float
    g_tilde_lowest: float
    g_tilde_order3: float
    omega_d_star_analytic: float
    residual_norm: float


def eta(params: DeviceParams, drive: DrivePulse, omega_d: float | None = None) -> float:
    """Double-dressed splitting <2,0|H|2,0> - <0,1|H|0,1> at omega_d."""
    wd = drive.omega_d if omega_d is None else omega_d
    h = double_dressed_static(params, drive, wd)
    i20 = bare_index(params, 2, 0)
    i01 = bare_index(params, 0, 1)
    return float(h[i20, i20].real - h[i01, i01].real)


def eta_first_order(params: DeviceParams, omega_d: float) -> float:
    """Splitting from the first dressing only (no drive shifts)."""
    h = dressed_static_1st(params, omega_d)
    i20 = bare_index(params, 2, 0)
    i01 = bare_index(params, 0, 1)
    return float(h[i20, i20].real - h[i01, i01].real)


def _secant_root(f, x0: float, x1: float, tol: float, max_iter: int) -> float:
    """Secant iteration with a bisection fallback on a sign bracket."""
    f0, f1 = f(x0), f(x1)
    lo, hi = None, None
    for x, fx in ((x0, f0), (x1, f1)):
        if fx > 0:
            hi = x
        elif fx < 0:
            lo = x
    for _ in range(max_iter):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not math.isfinite(x2):
            break
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if f1 > 0:
            hi = x1
        elif f1 < 0:
            lo = x1
        if abs(x1 - x0) < tol:
            return x1
    # fall back to bisection if the secant did not settle
    if lo is None or hi is None:
        raise NoConvergence("secant diverged and no sign bracket was found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm > 0:
            hi = mid
        else:
            lo = mid
        if abs(hi - lo) < tol:
            return 0.5 * (lo + hi)
    raise NoConvergence("bisection fallback failed to reach tolerance")


def crossing_first_order(params: DeviceParams) -> float:
    """Crossing of the first-dressed levels; linear in omega_d, solved exactly.

    The splitting shifts by -(2 - (-1)) * d(omega_d) per unit omega_d for
    the |2,0> vs |0,1> pair, so two evaluations pin the root.
    """
    w0 = params.bare_crossing
    y0 = eta_first_order(params, w0)
    w1 = w0 + SECANT_OFFSET
    y1 = eta_first_order(params, w1)
    return w0 - y0 * (w1 - w0) / (y1 - y0)


def solve_omega_d_star_analytic(params: DeviceParams, Omega: float) -> EffectiveCouplingReport:
    """Analytic crossing frequency and third-order coupling at amplitude Omega."""
    drive = DrivePulse(Omega=Omega, omega_d=params.bare_crossing, phi=0.0)
    w0 = params.bare_crossing
    root = _secant_root(
        lambda wd: eta(params, drive, wd),
        w0,
        w0 + SECANT_OFFSET,
        SECANT_TOL,
        SECANT_MAX_ITER,
    )
    h_eff = effective_coupling(params, drive, root)
    i20 = bare_index(params, 2, 0)
    i01 = bare_index(params, 0, 1)
    g3 = abs(complex(h_eff[i01, i20]))

    h_res = residual_coupling(params, drive, root)
    nt, nr = params.n_transmon, params.n_resonator
    m_idx = np.arange(nt * nr) // nr
    l_idx = np.arange(nt * nr) % nr
    keep = (m_idx + l_idx) <= 3
    sub = h_res[np.ix_(keep, keep)]
    return EffectiveCouplingReport(
        Omega=Omega,
        g_tilde_lowest=g_tilde_lowest_order(params, Omega),
        g_tilde_order3=g3,
        omega_d_star_analytic=root,
        residual_norm=float(np.abs(sub).max()),
    )


def comparison_table(params: DeviceParams, omega_list: np.ndarray) -> list[dict]:
    """Exact vs analytic crossing data, one row per drive amplitude.

    Frequencies are reported in Hz (omega/2pi).
    """
    rows = []
    w_eq10 = crossing_first_order(params)
    for omega in omega_list:
        exact = find_avoided_crossing_exact(params, omega)
        rep = solve_omega_d_star_analytic(params, omega)
        rows.append(
            {
                "Omega_Hz": omega / TWO_PI,
                "omega_d_star_exact_Hz": exact.omega_d_star / TWO_PI,
                "omega_d_star_order3_Hz": rep.omega_d_star_analytic / TWO_PI,
                "omega_d_star_eq10_Hz": w_eq10 / TWO_PI,
                "g_tilde_exact_Hz": exact.g_tilde / TWO_PI,
                "g_tilde_order3_Hz": rep.g_tilde_order3 / TWO_PI,
                "g_tilde_eq10_Hz": abs(g_tilde_lowest_order(params, omega)) / TWO_PI,
                "err_omega_d_order3_Hz": abs(rep.omega_d_star_analytic - exact.omega_d_star) / TWO_PI,
                "err_omega_d_eq10_Hz": abs(w_eq10 - exact.omega_d_star) / TWO_PI,
                "err_g_tilde_order3_Hz": abs(rep.g_tilde_order3 - exact.g_tilde) / TWO_PI,
                "err_g_tilde_eq10_Hz": abs(abs(g_tilde_lowest_order(params, omega)) - exact.g_tilde) / TWO_PI,
            }
        )
    return rows
