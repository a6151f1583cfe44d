"""Command-line front end.

    lepotto <command> [--config run.json] [--out DIR] [--shots N] [--seed S]
                      [--preset NAME] [--ramp staircase|linear] [--workers K]

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, liouvillian as lv, otto, output, thermo
from .config import COMMANDS, load_json, validate_config
from .errors import ConfigError, IoError, LepOttoError, NumericalError, ValidationError
from .measurement import RNG_ALGORITHM, emulate_series, make_rng
from .units import rate_khz

log = logging.getLogger("lepotto")

UNITS = {
    "time": "s",
    "delta, omega": "rad/s",
    "gamma_eff": "1/s",
    "energy (summary.json)": "rad/s with hbar = 1",
    "W (csv)": "2pi*kHz (hbar = 1)",
    "P_out (csv)": "2pi*kHz per microsecond",
    "temperature": "rad/s with k_B = 1",
}


def _phase(p):
    try:
        pc = lv.classify_phase(p)
    except lv.DegenerateParams:
        return None
    return {"phase": pc.phase.value, "ratio": pc.ratio, "xi": pc.xi}


def run_spectrum(cfg, out):
    p = cfg.qubit_params()
    spec = lv.spectrum(p)
    res = {
        "params": {"delta": p.delta, "omega": p.omega, "gamma_eff": p.gamma_eff},
        "eigenvalues": list(spec.eigenvalues),
        "phase": _phase(p),
    }
    if p.delta == 0:
        res["analytic_eigenvalues"] = list(lv.analytic_eigenvalues(p))
    return res


def run_steady(cfg, out):
    p = cfg.qubit_params()
    rho = lv.steady_state(p)
    return {
        "params": {"delta": p.delta, "omega": p.omega, "gamma_eff": p.gamma_eff},
        "rho": rho,
        "P_e": rho[1, 1].real,
        "P_e_closed_form": lv.steady_excited_population(p),
        "T_eff": thermo.effective_temperature_or_zero(rho, p.delta),
        "C_l1": thermo.l1_coherence(rho),
        "S": thermo.von_neumann_entropy(rho),
        "phase": _phase(p),
    }


def _spec_summary(spec):
    return {
        "delta_min": spec.delta_min,
        "delta_max": spec.delta_max,
        "t1": spec.t1, "t2": spec.t2, "t3": spec.t3, "t4": spec.t4,
        "ramp_mode": spec.ramp_mode.value,
        "strokes": [
            {"role": s.role.value, "omega": s.omega, "gamma_eff": s.gamma_eff, **(_phase(s.qubit(0.0)) or {})}
            for s in spec.strokes
        ],
    }


def run_cycle(cfg, out):
    spec = cfg.cycle_spec()
    traj, ledgers = otto.run_cycle(spec, n_cycles=cfg.n_cycles)
    last = traj.select(traj.cycle == cfg.n_cycles - 1)
    report = thermo.efficiency_report(last, ledgers[-1], spec)
    p_e = None
    if cfg.shots > 0:
        means, stds = emulate_series(traj.p_e, cfg.shots, make_rng(cfg.seed))
        p_e = means
        output.emit_csv(
            output.MEASUREMENT_COLUMNS,
            ((traj.times[k], int(traj.stroke[k]), traj.p_e[k], means[k], stds[k]) for k in range(len(traj))),
            out / "measurements.csv",
        )
    output.emit_csv(output.TRAJECTORY_COLUMNS, output.trajectory_rows(traj, p_e), out / "trajectory.csv")
    return {
        "cycle": _spec_summary(spec),
        "ledgers": [lg.to_dict() for lg in ledgers],
        "efficiency": report.to_dict(),
        "max_P_e": float(traj.p_e.max()),
    }


def run_sweep_t2(cfg, out):
    spec = cfg.cycle_spec()
    rows = otto.sweep_t2(spec, cfg.t2_values(), workers=cfg.workers)
    output.emit_csv(output.SWEEP_T2_COLUMNS, output.sweep_t2_rows(rows), out / "sweep.csv")
    best = max(rows, key=lambda r: r.w)
    return {
        "cycle": _spec_summary(spec),
        "points": len(rows),
        "argmax_W_t2": best.t2,
        "argmax_P_t2": max(rows, key=lambda r: r.p_out).t2,
        "argmax_eta_q_t2": max(rows, key=lambda r: r.eta_q).t2,
        "max_W": best.w,
    }


def run_sweep_ratio(cfg, out):
    spec = cfg.cycle_spec()
    t2s = cfg.t2_values() if cfg.t2_values_us is not None else [spec.t2]
    rows = otto.sweep_ratio(spec, cfg.ratios(), t2s, workers=cfg.workers)
    output.emit_csv(output.SWEEP_RATIO_COLUMNS, output.sweep_ratio_rows(rows), out / "sweep.csv")
    return {"cycle": _spec_summary(spec), "points": len(rows)}


def _two_level_gamma(cfg):
    return rate_khz(cfg.gamma_khz) if cfg.gamma_khz else 1.0


def run_lep_locate(cfg, out):
    if cfg.source == "three-level":
        t = cfg.three_level_params()
        src, g_eff = lv.three_level_source(t), lv.effective_decay_rate(t)
    else:
        g_eff = _two_level_gamma(cfg)
        src = lv.two_level_source(g_eff)
    r = lv.lep_locate(src, cfg.ratio_lo, cfg.ratio_hi, cfg.lep_rtol)
    return {"source": cfg.source, "gamma_eff": g_eff, "ratio_at_lep": r, "expected": 0.25, "relative_deviation": r / 0.25 - 1}


def run_three_level_compare(cfg, out):
    t = cfg.three_level_params()
    g_eff = lv.effective_decay_rate(t)
    two, three = lv.two_level_source(g_eff), lv.three_level_source(t)
    r2 = lv.lep_locate(two, cfg.ratio_lo, cfg.ratio_hi, cfg.lep_rtol)
    r3 = lv.lep_locate(three, cfg.ratio_lo, cfg.ratio_hi, cfg.lep_rtol)
    rows = []
    for r in np.linspace(cfg.ratio_lo, cfg.ratio_hi, cfg.scan_points):
        row = [r]
        for src in (two, three):
            w, g = src(r)
            a, b = lv.slow_pair(w, g)
            row += [a.real / g, a.imag / g, b.real / g, b.imag / g]
        rows.append(row)
    output.emit_csv(output.SPECTRUM_SCAN_COLUMNS, rows, out / "sweep.csv")
    return {
        "three_level": {"omega_p": t.omega_p, "gamma_g": t.gamma_g, "gamma_e": t.gamma_e},
        "gamma_eff": g_eff,
        "ratio_at_lep_two_level": r2,
        "ratio_at_lep_three_level": r3,
        "relative_deviation": r3 / r2 - 1,
    }


HANDLERS = {
    "spectrum": run_spectrum,
    "steady": run_steady,
    "cycle": run_cycle,
    "sweep-t2": run_sweep_t2,
    "sweep-ratio": run_sweep_ratio,
    "lep-locate": run_lep_locate,
    "three-level-compare": run_three_level_compare,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="lepotto", description="Single-qubit Otto engine around a Liouvillian exceptional point.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--out", type=Path, help="output directory (default: config out_dir or .)")
    ap.add_argument("--shots", type=int, help="projective measurements per sample (0 = noiseless)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--preset", choices=("exact-exact", "broken-broken", "exact-broken"))
    ap.add_argument("--ramp", choices=("staircase", "linear"))
    ap.add_argument("--workers", type=int, help="parallel processes for sweeps")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def load_run_config(args):
    data = {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ValidationError("--config", f"cannot read {args.config}: {exc.strerror}") from exc
        data = load_json(text)
        if not isinstance(data, dict):
            raise ValidationError("config", "top level must be a JSON object")
    if data.get("command", args.command) != args.command:
        raise ValidationError("command", f"config says '{data['command']}' but '{args.command}' was requested")
    data["command"] = args.command
    for name in ("shots", "seed", "preset", "ramp", "workers"):
        val = getattr(args, name)
        if val is not None:
            data[name] = val
    if args.out is not None:
        data["out_dir"] = str(args.out)
    return validate_config(data)


def execute(cfg):
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    result = HANDLERS[cfg.command](cfg, out)
    summary = {
        "artifact": "lepotto",
        "artifact_version": __version__,
        "command": cfg.command,
        "config": cfg.model_dump(mode="json"),
        "rng": {"algorithm": RNG_ALGORITHM, "seed": cfg.seed, "shots": cfg.shots},
        "units": UNITS,
        "result": result,
    }
    output.emit_summary_json(summary, out / "summary.json")
    return summary


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_run_config(args)
        execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return exc.exit_code
    except LepOttoError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    log.info("wrote %s", cfg.out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
