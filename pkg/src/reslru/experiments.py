"""Experiment bodies behind the command-line interface.

Each command sweeps one figure-style experiment and writes CSV artifacts
plus a JSON manifest; plotting is left to external tools (column
contracts documented in the README).
"""
from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .channels import build_res_lru_channel
from .characterize import long_drive_run, run_lru, zz_sensitivity
from .config import ExperimentConfig
from .crossing import find_avoided_crossing_exact
from .lindblad import build_context
from .manifest import write_csv, write_json, write_manifest
from .markov import (
    LRUParams,
    fit_trace,
    monte_carlo_surface17,
    res_lru_population_map,
    surface17_layout,
)
from .optimize import (
    OptimizerConfig,
    critical_amplitude,
    optimize_tp,
    select_operating_point,
    sweep_landscape,
)
from .params import TWO_PI, DrivePulse
from .swt.report import comparison_table

CROSSING_COLUMNS = [
    "Omega_Hz",
    "omega_d_star_exact_Hz",
    "omega_d_star_order3_Hz",
    "omega_d_star_eq10_Hz",
    "g_tilde_exact_Hz",
    "g_tilde_order3_Hz",
    "g_tilde_eq10_Hz",
    "err_omega_d_order3_Hz",
    "err_omega_d_eq10_Hz",
    "err_g_tilde_order3_Hz",
    "err_g_tilde_eq10_Hz",
]


def _ensure_outdir(cfg: ExperimentConfig) -> Path:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_crossing(cfg: ExperimentConfig) -> list[Path]:
    """Exact vs analytic avoided-crossing comparison over amplitudes."""
    t0 = time.perf_counter()
    out = _ensure_outdir(cfg)
    amp_list = cfg.section("drive").get("amplitude_list_hz")
    if amp_list is None:
        amp_list = [50e6, 100e6, 200e6, 300e6, 400e6, 500e6]
    rows = comparison_table(cfg.device, TWO_PI * np.asarray(amp_list, dtype=float))
    path = write_csv(
        out / "crossing.csv",
        CROSSING_COLUMNS,
        [[r[c] for c in CROSSING_COLUMNS] for r in rows],
    )
    outputs = [path]
    write_manifest(out, "crossing", cfg.raw, outputs, time.perf_counter() - t0)
    return outputs


def _trajectory_rows(traj, labels):
    rows = []
    for i, t in enumerate(traj.times):
        rows.append([float(t)] + [float(traj.populations[lab][i]) for lab in labels])
    return rows


def cmd_evolve(cfg: ExperimentConfig) -> list[Path]:
    """Trajectories from initial levels 0/1/2 at the configured pulse."""
    t0 = time.perf_counter()
    out = _ensure_outdir(cfg)
    T_slot = cfg.optimizer.T_slot
    pulse = cfg.drive
    long_drive = bool(cfg.section("drive").get("long_drive", False))
    labels = [(m, l) for m in range(cfg.device.n_transmon) for l in range(cfg.device.n_resonator)]
    header = ["time_s"] + [f"p_{m}{l}" for m, l in labels]
    sample = np.linspace(0.0, T_slot, 221)
    ctx = build_context(cfg.device, pulse.omega_d, pulse.phi)

    outputs = []
    for level in (0, 1, 2):
        if long_drive:
            traj = long_drive_run(
                cfg.device, pulse.Omega, pulse.omega_d, T_slot,
                t_rise=pulse.t_rise, sample_times=sample, ctx=ctx,
            ) if level == 2 else None
            if traj is None:
                continue
            name = f"evolve_longdrive_level{level}.csv"
        else:
            _, traj = run_lru(
                cfg.device, pulse, level, T_slot, sample_times=sample, ctx=ctx
            )
            name = f"evolve_level{level}.csv"
        path = write_csv(out / name, header, _trajectory_rows(traj, labels))
        meta = dict(traj.meta)
        meta["initial_level"] = level
        meta["T_slot_s"] = T_slot
        outputs.append(path)
        outputs.append(write_json(out / (path.stem + "_meta.json"), meta))
    write_manifest(out, "evolve", cfg.raw, outputs, time.perf_counter() - t0)
    return outputs


LANDSCAPE_COLUMNS = [
    "Omega_Hz",
    "omega_d_Hz",
    "t_p_opt_s",
    "p2_leaked",
    "p2_induced_0",
    "p2_induced_1",
    "eff_T1_s",
    "eff_T2_s",
]


def cmd_heatmap(cfg: ExperimentConfig) -> list[Path]:
    """Landscape sweep, operating-point selection, optional local refine."""
    t0 = time.perf_counter()
    out = _ensure_outdir(cfg)
    oc = cfg.optimizer
    points = sweep_landscape(cfg.device, oc, workers=cfg.threads)
    rows = [
        [
            p.Omega / TWO_PI,
            p.omega_d / TWO_PI,
            p.t_p_opt,
            p.p2_leaked,
            p.p2_induced_0,
            p.p2_induced_1,
            p.eff_T1,
            p.eff_T2,
        ]
        for p in points
    ]
    path = write_csv(out / "landscape.csv", LANDSCAPE_COLUMNS, rows)
    threshold = cfg.section("optimizer").get("p2_threshold", 0.01)
    op = select_operating_point(points, p2_threshold=threshold)

    # one local 3x3 re-sample around the selection within the refine radius
    best = op.point
    refined_from = None
    r = oc.refine_radius
    if r > 0:
        omega_cr = critical_amplitude(cfg.device)
        local = []
        for dom in (-r, 0.0, r):
            for dwd in (-r, 0.0, r):
                om = min(max(best.Omega + dom, oc.Omega_range[0]), oc.Omega_range[1])
                wd = min(max(best.omega_d + dwd, oc.omega_d_range[0]), oc.omega_d_range[1])
                tp, p2 = optimize_tp(cfg.device, om, wd, oc, omega_cr)
                local.append((p2, om, wd, tp))
        local.sort()
        if local[0][0] < best.p2_leaked:
            refined_from = {"Omega_Hz": best.Omega / TWO_PI, "p2_leaked": best.p2_leaked}
            p2, om, wd, tp = local[0]
            best = type(best)(
                Omega=om, omega_d=wd, t_p_opt=tp, p2_leaked=p2,
                p2_induced_0=best.p2_induced_0, p2_induced_1=best.p2_induced_1,
                eff_T1=best.eff_T1, eff_T2=best.eff_T2,
            )
    op_json = {
        "Omega_Hz": best.Omega / TWO_PI,
        "omega_d_Hz": best.omega_d / TWO_PI,
        "t_p_opt_s": best.t_p_opt,
        "p2_leaked": best.p2_leaked,
        "p2_induced_0": best.p2_induced_0,
        "p2_induced_1": best.p2_induced_1,
        "eff_T1_s": best.eff_T1,
        "eff_T2_s": best.eff_T2,
        "rationale": op.rationale,
        "local_refine": refined_from,
    }
    op_path = write_json(out / "operating_point.json", op_json)
    outputs = [path, op_path]
    write_manifest(out, "heatmap", cfg.raw, outputs, time.perf_counter() - t0)
    return outputs


def cmd_zz(cfg: ExperimentConfig) -> list[Path]:
    """Leakage-reduction rate vs static frequency shift, operating + critical."""
    t0 = time.perf_counter()
    out = _ensure_outdir(cfg)
    zz = cfg.section("zz")
    zmax = TWO_PI * zz.get("zeta_max_hz", 2e6)
    npts = int(zz.get("n_points", 9))
    zetas = np.linspace(-zmax, zmax, npts)
    T_slot = cfg.optimizer.T_slot

    outputs = []
    curves = [("operating", cfg.drive)]
    if zz.get("include_critical", True):
        omega_cr = critical_amplitude(cfg.device)
        wd_cr = find_avoided_crossing_exact(cfg.device, omega_cr).omega_d_star
        curves.append(
            (
                "critical",
                DrivePulse(omega_cr, wd_cr, 0.0, cfg.drive.t_rise, T_slot),
            )
        )
    for name, pulse in curves:
        data = zz_sensitivity(cfg.device, pulse, zetas, T_slot)
        rows = [[z / TWO_PI, r] for z, r in data]
        outputs.append(write_csv(out / f"zz_{name}.csv", ["zeta_Hz", "R"], rows))
    write_manifest(out, "zz", cfg.raw, outputs, time.perf_counter() - t0)
    return outputs


MARKOV_COLUMNS = [
    "sweep",
    "value",
    "qubit",
    "role",
    "n_flux",
    "gamma_CL",
    "gamma_LC",
    "gamma_CL_err",
    "gamma_LC_err",
    "lifetime_cycles",
    "lifetime_err",
    "steady_state",
]


def cmd_markov(cfg: ExperimentConfig) -> list[Path]:
    """Monte-Carlo lifetime/steady-state sweeps over the unit parameters."""
    t0 = time.perf_counter()
    out = _ensure_outdir(cfg)
    mk = cfg.section("markov")
    layout = surface17_layout()
    l1 = mk.get("l1", 0.005)
    l2 = mk.get("l2")
    cycles = int(mk.get("cycles", 20))
    runs = int(mk.get("runs", 20000))
    r_list = mk.get("r_list") or [0.0, 0.2, 0.5, 0.8, 0.95, 1.0]
    pm22_list = mk.get("pm22_list") or [0.0, 0.2, 0.5, 0.8, 0.9, 1.0]
    base_lru = cfg.lru

    rows = []
    trace_rows = []
    for sweep, values in (("R", r_list), ("pM22", pm22_list)):
        for value in values:
            if sweep == "R":
                lru = LRUParams(
                    R=float(value), L1_LRU=base_lru.L1_LRU,
                    pM22=base_lru.pM22, pM11=base_lru.pM11,
                )
                use_data, use_anc = True, False
            else:
                lru = LRUParams(
                    R=base_lru.R, L1_LRU=base_lru.L1_LRU,
                    pM22=float(value), pM11=base_lru.pM11,
                )
                use_data, use_anc = False, True
            traces = monte_carlo_surface17(
                layout, l1, l2, lru,
                use_data_lru=use_data, use_ancilla_lru=use_anc,
                cycles=cycles, runs=runs, seed=cfg.seed,
                t_c=cfg.schedule.t_c,
            )
            for spec in layout:
                if not spec.leakage_prone:
                    continue
                if sweep == "R" and spec.role != "data":
                    continue
                if sweep == "pM22" and spec.role != "ancilla":
                    continue
                fit = fit_trace(traces[spec.name])
                rows.append(
                    [
                        sweep,
                        float(value),
                        spec.name,
                        spec.role,
                        spec.n_flux,
                        fit.rates.gamma_CL,
                        fit.rates.gamma_LC,
                        fit.gamma_CL_err,
                        fit.gamma_LC_err,
                        fit.lifetime,
                        fit.lifetime_err,
                        fit.steady_state,
                    ]
                )
                for c, (pb, se) in enumerate(
                    zip(traces[spec.name].pbar, traces[spec.name].stderr), start=1
                ):
                    trace_rows.append([sweep, float(value), spec.name, c, pb, se])

    fit_path = write_csv(out / "markov_fits.csv", MARKOV_COLUMNS, rows)
    trace_path = write_csv(
        out / "markov_traces.csv",
        ["sweep", "value", "qubit", "cycle", "pbar", "stderr"],
        trace_rows,
    )

    # channel self-test artifact
    ch = build_res_lru_channel(base_lru, cfg.schedule.t_res_lru, cfg.device.T1_q)
    rho2 = np.diag([0.0, 0.0, 1.0]).astype(complex)
    rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
    affine = res_lru_population_map((0.0, 0.0, 1.0), base_lru)
    self_test = {
        "trace_preserving": ch.is_trace_preserving(),
        "choi_min_eigenvalue": ch.choi_min_eigenvalue(),
        "p2_from_leaked": ch.populations(rho2)[2],
        "p2_from_ground": ch.populations(rho0)[2],
        "affine_p2_from_leaked": affine[2],
    }
    ch_path = write_json(out / "channel_selftest.json", self_test)
    outputs = [fit_path, trace_path, ch_path]
    write_manifest(out, "markov", cfg.raw, outputs, time.perf_counter() - t0)
    return outputs


COMMANDS = {
    "crossing": cmd_crossing,
    "evolve": cmd_evolve,
    "heatmap": cmd_heatmap,
    "zz": cmd_zz,
    "markov": cmd_markov,
}
