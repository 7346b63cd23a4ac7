"""Adaptive embedded Runge-Kutta 5(4) stepper for the master equation.

The state is integrated in the interaction picture of the static dressed
diagonal: the large diagonal phases are removed exactly (populations are
picture-invariant, coherences are rephased on output), leaving the
envelope curvature and the drive sidebands to set the step.  Dormand-
Prince coefficients, elementwise RMS error control, hermiticity
re-symmetrization on every accepted step.

Compiled with numba; the pure-array layout keeps one dissipator
evaluation at three dense matmuls plus elementwise work.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_STEP_FAILURE = 1

# envelope segment kinds
SEG_CONST = 0
SEG_RISE = 1
SEG_FALL = 2

_MIN_STEP = 1e-17
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@njit(cache=True)
def _envelope(kind: int, t: float, t_ref: float, t_rise: float, s0: float) -> float:
    """Instantaneous drive amplitude (rad/s) of one pulse segment.

    SEG_CONST: s0.  SEG_RISE: s0*sin^2(pi (t-t_ref)/(2 t_rise)).
    SEG_FALL: s0*sin^2(pi (t_ref-t)/(2 t_rise)) with t_ref the pulse end.
    """
    if kind == SEG_CONST:
        return s0
    if kind == SEG_RISE:
        x = (t - t_ref) / t_rise
        s = math.sin(0.5 * math.pi * x)
        return s0 * s * s
    x = (t_ref - t) / t_rise
    if x <= 0.0:
        return 0.0
    s = math.sin(0.5 * math.pi * x)
    return s0 * s * s


@njit(cache=True)
def _rhs(
    t, y, kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out
):
    """Master-equation right-hand side in the interaction picture."""
    n = y.shape[0]
    ph = np.exp(-1j * d * t)
    phc = np.conj(ph)
    # back to the computational frame
    rho = np.empty_like(y)
    for i in range(n):
        for j in range(n):
            rho[i, j] = ph[i] * y[i, j] * phc[j]
    # dissipator: diagonal-jump and anticommutator parts are elementwise
    for i in range(n):
        for j in range(n):
            out[i, j] = w[i, j] * rho[i, j]
    # sandwich terms of the ladder jumps
    for q in range(ks.shape[0]):
        t1 = np.dot(ks[q], rho)
        t2 = np.dot(t1, kdags[q])
        out += t2
    # coherent drive
    s = _envelope(kind, t, t_ref, t_rise, s0)
    if s != 0.0:
        vr = np.dot(v, rho)
        out += (-1j * s) * (vr - np.conj(vr.T))
    # return to the interaction picture
    for i in range(n):
        for j in range(n):
            out[i, j] = phc[i] * out[i, j] * ph[j]
    return out


@njit(cache=True)
def _error_norm(err, y0, y1, rtol, atol):
    n = y0.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            sc = atol + rtol * max(abs(y0[i, j]), abs(y1[i, j]))
            e = abs(err[i, j]) / sc
            acc += e * e
    return math.sqrt(acc / (n * n))


@njit(cache=True)
def propagate_segment(
    y, t0, t1, kind, t_ref, t_rise, s0, d, v, ks, kdags, w, rtol, atol, max_step, h_init
):
    """Advance the interaction-picture state from t0 to t1.

    Returns (y, h_last, status).  y is hermitized after every accepted
    step; h_last seeds the next segment.
    """
    n = y.shape[0]
    span = t1 - t0
    if span <= 0.0:
        return y, h_init, STATUS_OK

    # Dormand-Prince 5(4) tableau
    c2, c3, c4, c5 = 0.2, 0.3, 0.8, 8.0 / 9.0
    a21 = 0.2
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
    a61, a62, a63, a64, a65 = (
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    )
    b1, b3, b4, b5, b6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
    e1, e3, e4, e5, e6, e7 = (
        71.0 / 57600.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    )

    out = np.empty((n, n), dtype=np.complex128)
    h = h_init
    if h <= 0.0 or h > max_step:
        h = max_step
    if h > span:
        h = span
    t = t0
    while t < t1 - 1e-18 * max(1.0, abs(t1)):
        if h > t1 - t:
            h = t1 - t
        if h < _MIN_STEP:
            return y, h, STATUS_STEP_FAILURE

        k1 = _rhs(t, y, kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out).copy()
        k2 = _rhs(t + c2 * h, y + (h * a21) * k1, kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out).copy()
        k3 = _rhs(
            t + c3 * h, y + h * (a31 * k1 + a32 * k2), kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out
        ).copy()
        k4 = _rhs(
            t + c4 * h,
            y + h * (a41 * k1 + a42 * k2 + a43 * k3),
            kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out,
        ).copy()
        k5 = _rhs(
            t + c5 * h,
            y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
            kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out,
        ).copy()
        k6 = _rhs(
            t + h,
            y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
            kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out,
        ).copy()
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)
        k7 = _rhs(t + h, y_new, kind, t_ref, t_rise, s0, d, v, ks, kdags, w, out)
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)
        enorm = _error_norm(err, y, y_new, rtol, atol)

        if enorm <= 1.0:
            t = t + h
            # re-symmetrize: exact dynamics preserves hermiticity
            y = 0.5 * (y_new + np.conj(y_new.T))
        if enorm == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * enorm ** (-0.2)
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            elif factor > _MAX_FACTOR:
                factor = _MAX_FACTOR
        h = h * factor
        if h > max_step:
            h = max_step
    return y, h, STATUS_OK
