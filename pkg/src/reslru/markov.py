"""Per-QEC-cycle Markov model of leakage with reduction units.

Two-state (computational/leaked) chains per qubit, augmented by the
removal-unit transitions, plus the closed-form lifetime and saturation
algebra, a counter-based-seeded Monte Carlo over a distance-3 layout,
and the exponential-saturation trace fit.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import FitDiverged, InvalidDistribution, RateOverflow, ZeroSeepage
from .params import ScheduleParams


@dataclass(frozen=True)
class MarkovRates:
    """Per-cycle leakage and seepage probabilities."""

    gamma_CL: float
    gamma_LC: float

    def __post_init__(self):
        if not (0.0 <= self.gamma_CL <= 1.0 and 0.0 <= self.gamma_LC <= 1.0):
            raise ValueError("rates must be probabilities")


@dataclass(frozen=True)
class LRUParams:
    """Removal-unit performance: data-qubit rate, induced leakage, readout."""

    R: float = 0.95
    L1_LRU: float = 0.0025
    pM22: float = 0.90
    pM11: float = 0.995

    def __post_init__(self):
        for name in ("R", "L1_LRU", "pM22", "pM11"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")


@dataclass(frozen=True)
class QubitSpec:
    name: str
    role: str  # "data" or "ancilla"
    n_flux: int
    leakage_prone: bool = True

    def __post_init__(self):
        if self.role not in ("data", "ancilla"):
            raise ValueError("role must be data or ancilla")
        if self.n_flux not in (0, 1, 2, 3, 4):
            raise ValueError("n_flux must be 0..4")


def surface17_layout() -> list[QubitSpec]:
    """Distance-3 layout: 9 data and 8 ancilla qubits.

    High-frequency data qubits flux in 4 (center) or 3 CZs per cycle;
    boundary Z ancillas in 1, the remaining ancillas in 2.  Low-frequency
    data qubits do not leak.
    """
    qubits = []
    for i in range(9):
        if i == 4:
            qubits.append(QubitSpec(f"D{i}", "data", 4, True))
        elif i in (3, 5):
            qubits.append(QubitSpec(f"D{i}", "data", 3, True))
        else:
            qubits.append(QubitSpec(f"D{i}", "data", 0, False))
    for i in range(4):
        qubits.append(QubitSpec(f"X{i}", "ancilla", 2, True))
    for i in range(4):
        n = 1 if i in (0, 3) else 2
        qubits.append(QubitSpec(f"Z{i}", "ancilla", n, True))
    return qubits


def rates_from_physical(
    n_flux: int,
    L1: float,
    L2: float | None = None,
    t_c: float = ScheduleParams().t_c,
    T1: float = 30e-6,
) -> MarkovRates:
    """Per-cycle rates from gate leakage/seepage and |2> relaxation.

    The |2> state relaxes at twice the single-excitation rate, hence the
    T1/2 time constant.  L2 defaults to 2*L1 (subspace dimension ratio).
    """
    if L2 is None:
        L2 = 2.0 * L1
    g_cl = n_flux * L1
    g_lc = n_flux * L2 + (1.0 - math.exp(-t_c / (T1 / 2.0)))
    if g_cl > 1.0:
        warnings.warn(f"leakage rate {g_cl:.3f} clamped to 1", RateOverflow)
        g_cl = 1.0
    if g_lc > 1.0:
        warnings.warn(f"seepage rate {g_lc:.3f} clamped to 1", RateOverflow)
        g_lc = 1.0
    return MarkovRates(gamma_CL=g_cl, gamma_LC=g_lc)


def lifetime(rates: MarkovRates) -> float:
    """Mean number of cycles spent leaked: 1/seepage."""
    if rates.gamma_LC <= 0.0:
        raise ZeroSeepage("seepage rate is zero; leakage never ends")
    return 1.0 / rates.gamma_LC


def steady_state(rates: MarkovRates) -> float:
    return rates.gamma_CL / (rates.gamma_CL + rates.gamma_LC)


def pbar_curve(rates: MarkovRates, n_cycles: int) -> np.ndarray:
    """Mean leakage probability after n = 1..n_cycles cycles."""
    n = np.arange(1, n_cycles + 1, dtype=float)
    s = rates.gamma_CL + rates.gamma_LC
    if s == 0.0:
        return np.zeros(n_cycles)
    return steady_state(rates) * (1.0 - np.exp(-s * n))


def lru_augmented_rates(
    base: MarkovRates, lru: LRUParams, role: str
) -> MarkovRates:
    """Per-cycle rates with the removal unit folded in.

    Seepage channels compose as complementary probabilities; induced
    leakage adds (data: the averaged unit leakage rate; ancilla: a wrong
    |2> declaration on a qubit sitting in |1> half the time).
    """
    if role == "data":
        s, i = lru.R, lru.L1_LRU
    elif role == "ancilla":
        s, i = lru.pM22, 0.5 * (1.0 - lru.pM11)
    else:
        raise ValueError("role must be data or ancilla")
    g_lc = 1.0 - (1.0 - base.gamma_LC) * (1.0 - s)
    g_cl = base.gamma_CL + i
    if g_cl > 1.0:
        warnings.warn(f"augmented leakage rate {g_cl:.3f} clamped to 1", RateOverflow)
        g_cl = 1.0
    return MarkovRates(gamma_CL=g_cl, gamma_LC=g_lc)


def res_lru_population_map(
    p_in: tuple[float, float, float], lru: LRUParams
) -> tuple[float, float, float]:
    """Affine population action of the removal unit on (p0, p1, p2)."""
    p0, p1, p2 = p_in
    if min(p0, p1, p2) < -1e-12 or p0 + p1 + p2 > 1.0 + 1e-9:
        raise InvalidDistribution(f"invalid population triple {p_in}")
    removed = lru.R * p2
    induced = 2.0 * lru.L1_LRU * p0
    return (p0 + removed - induced, p1, (1.0 - lru.R) * p2 + induced)


def readout_declare(true_state: int, lru: LRUParams, rng: np.random.Generator) -> int:
    """Sample the declared outcome for a projective result 0, 1 or 2.

    |0> is never misdeclared; |1> and |2> confuse into each other with
    the complementary assignment probabilities.
    """
    if true_state == 0:
        return 0
    u = rng.random()
    if true_state == 1:
        return 1 if u < lru.pM11 else 2
    if true_state == 2:
        return 2 if u < lru.pM22 else 1
    raise ValueError("true_state must be 0, 1 or 2")


@dataclass
class LeakageTrace:
    """Per-cycle leakage probability averaged over runs."""

    pbar: np.ndarray
    runs: int
    stderr: np.ndarray | None = None
    indicators: np.ndarray | None = field(default=None, repr=False)


def _qubit_rng(seed: int, qubit_index: int, cycle: int) -> np.random.Generator:
    """Counter-based stream: one Philox key per (seed, qubit, cycle)."""
    key = np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, (qubit_index << 32) | cycle], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))


def monte_carlo_surface17(
    layout: list[QubitSpec],
    L1: float,
    L2: float | None = None,
    lru: LRUParams | None = None,
    use_data_lru: bool = True,
    use_ancilla_lru: bool = True,
    cycles: int = 20,
    runs: int = 20000,
    seed: int = 1,
    t_c: float = ScheduleParams().t_c,
    T1: float = 30e-6,
    keep_runs: bool = True,
) -> dict[str, LeakageTrace]:
    """Independent two-state chains per qubit, vectorized over runs.

    Per cycle: the gate/relaxation transition fires first and the leakage
    indicator is recorded (the mid-cycle observation point), then the
    applicable removal unit acts.  Draws come from counter-based streams
    keyed by (seed, qubit, cycle), so results are independent of
    scheduling and thread count.
    """
    if cycles < 5 or runs < 100:
        raise ValueError("need at least 5 cycles and 100 runs")
    lru = lru if lru is not None else LRUParams()
    out: dict[str, LeakageTrace] = {}
    for qi, spec in enumerate(layout):
        base = rates_from_physical(spec.n_flux, L1 if spec.leakage_prone else 0.0,
                                   None if L2 is None else L2, t_c, T1)
        leaked = np.zeros(runs, dtype=bool)
        ind = np.empty((cycles, runs), dtype=bool)
        for c in range(cycles):
            rng = _qubit_rng(seed, qi, c)
            u = rng.random((runs, 3))
            # CZ + relaxation transition from the start-of-cycle state
            leak = (~leaked) & (u[:, 0] < base.gamma_CL)
            seep = leaked & (u[:, 0] < base.gamma_LC)
            leaked = (leaked | leak) & ~seep
            ind[c] = leaked
            # removal unit later in the cycle
            if spec.role == "data" and use_data_lru:
                fixed = leaked & (u[:, 1] < lru.R)
                induced = (~leaked) & (u[:, 1] < lru.L1_LRU)
                leaked = (leaked & ~fixed) | induced
            elif spec.role == "ancilla" and use_ancilla_lru:
                # declaration: leaked qubits read |2|, computational ones
                # read |1> half the time; a declared |2> triggers the flip
                declared2_leaked = leaked & (u[:, 1] < lru.pM22)
                in_one = (~leaked) & (u[:, 2] < 0.5)
                declared2_comp = in_one & (u[:, 1] > lru.pM11)
                leaked = (leaked & ~declared2_leaked) | declared2_comp
        pbar = ind.mean(axis=1)
        stderr = np.sqrt(np.maximum(pbar * (1.0 - pbar), 0.0) / runs)
        out[spec.name] = LeakageTrace(
            pbar=pbar,
            runs=runs,
            stderr=stderr,
            indicators=ind if keep_runs else None,
        )
    return out


@dataclass(frozen=True)
class FitResult:
    rates: MarkovRates
    gamma_CL_err: float
    gamma_LC_err: float

    @property
    def lifetime(self) -> float:
        return 1.0 / self.rates.gamma_LC

    @property
    def steady_state(self) -> float:
        return steady_state(self.rates)

    @property
    def lifetime_err(self) -> float:
        return self.gamma_LC_err / self.rates.gamma_LC**2


def _fit_pbar(pbar: np.ndarray) -> tuple[float, float]:
    """Least-squares (amplitude, total-rate) for A(1 - exp(-B n)).

    Coarse grid over B with the linear amplitude solved exactly, then
    Gauss-Newton refinement of both parameters.
    """
    n = np.arange(1, len(pbar) + 1, dtype=float)
    if np.all(pbar <= 0.0):
        raise FitDiverged("trace is identically zero; rates unidentifiable")

    best = None
    for b in np.geomspace(1e-3, 5.0, 120):
        f = 1.0 - np.exp(-b * n)
        denom = float(f @ f)
        a = float(pbar @ f) / denom
        r = pbar - a * f
        sse = float(r @ r)
        if best is None or sse < best[0]:
            best = (sse, a, b)
    _, a, b = best

    for _ in range(60):
        e = np.exp(-b * n)
        f = 1.0 - e
        r = pbar - a * f
        ja = f
        jb = a * n * e
        g = np.array([ja @ r, jb @ r])
        h = np.array([[ja @ ja, ja @ jb], [jb @ ja, jb @ jb]])
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError as exc:
            raise FitDiverged("singular normal equations") from exc
        a += step[0]
        b += step[1]
        b = min(max(b, 1e-6), 50.0)
        if np.all(np.abs(step) < 1e-12):
            break
    if not (math.isfinite(a) and math.isfinite(b)) or b <= 0.0:
        raise FitDiverged(f"fit left the feasible region: A={a}, B={b}")
    return a, b


def fit_trace(trace: LeakageTrace, bootstrap: int = 100, seed: int = 7) -> FitResult:
    """Fit the saturation curve and return the per-cycle rates.

    gamma_CL = A*B and gamma_LC = B - A*B from the fitted amplitude and
    total rate; bootstrap over runs provides the error bars when per-run
    indicators are available.
    """
    if len(trace.pbar) < 5:
        raise ValueError("trace too short to fit")
    a, b = _fit_pbar(trace.pbar)
    g_cl = min(max(a * b, 0.0), 1.0)
    g_lc = min(max(b - a * b, 1e-12), 1.0)

    err_cl = err_lc = float("nan")
    if trace.indicators is not None and bootstrap > 0:
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
        cls, lcs = [], []
        runs = trace.indicators.shape[1]
        for _ in range(bootstrap):
            pick = rng.integers(0, runs, size=runs)
            pb = trace.indicators[:, pick].mean(axis=1)
            try:
                ab, bb = _fit_pbar(pb)
            except FitDiverged:
                continue
            cls.append(ab * bb)
            lcs.append(bb - ab * bb)
        if len(cls) >= 10:
            err_cl = float(np.std(cls))
            err_lc = float(np.std(lcs))
    return FitResult(
        rates=MarkovRates(gamma_CL=g_cl, gamma_LC=g_lc),
        gamma_CL_err=err_cl,
        gamma_LC_err=err_lc,
    )
