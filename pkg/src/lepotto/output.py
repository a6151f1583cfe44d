"""CSV and JSON writers with fixed schemas."""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import IoError
from .units import TWO_PI

TRAJECTORY_COLUMNS = (
    "t_s", "P_e", "P_g", "re_rho_eg", "im_rho_eg", "delta_rad_s", "omega_rad_s",
    "gamma_eff_s", "T_eff", "C_l1", "S", "stroke",
)
SWEEP_T2_COLUMNS = ("t2_s", "W", "P_out", "eta_c", "eta_q")
SWEEP_RATIO_COLUMNS = ("ratio", "t2_s", "W")
MEASUREMENT_COLUMNS = ("t_s", "stroke", "P_e_exact", "P_e_mean", "P_e_std")
SPECTRUM_SCAN_COLUMNS = (
    "ratio",
    "re_l3_two_level", "im_l3_two_level", "re_l4_two_level", "im_l4_two_level",
    "re_l3_three_level", "im_l3_three_level", "re_l4_three_level", "im_l4_three_level",
)

# reported work is in units of 2pi*kHz (hbar = 1), power per microsecond
WORK_UNIT = TWO_PI * 1e3
POWER_UNIT = WORK_UNIT / 1e-6


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def emit_csv(columns, rows, path):
    rows = list(rows)
    if not rows:
        raise IoError(f"refusing to write an empty table to {path}")
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                if len(row) != len(columns):
                    raise IoError(f"row has {len(row)} fields, expected {len(columns)}")
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return Path(path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return obj


def emit_summary_json(report, path):
    try:
        Path(path).write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return Path(path)


def trajectory_rows(traj, p_e=None):
    """Rows for trajectory.csv; ``p_e`` replaces the exact populations."""
    if p_e is None:
        p_e, p_g = traj.p_e, traj.p_g
    else:
        p_e = np.asarray(p_e)
        p_g = 1.0 - p_e
    rho_eg = traj.rho_eg
    t_eff, c_l1, s = traj.t_eff, traj.coherence, traj.entropy
    for k in range(len(traj)):
        yield (
            traj.times[k], p_e[k], p_g[k], rho_eg[k].real, rho_eg[k].imag,
            traj.delta[k], traj.omega[k], traj.gamma_eff[k], t_eff[k], c_l1[k], s[k], int(traj.stroke[k]),
        )


def sweep_t2_rows(rows):
    for r in rows:
        yield (r.t2, r.w / WORK_UNIT, r.p_out / POWER_UNIT, r.eta_c, r.eta_q)


def sweep_ratio_rows(rows):
    for r in rows:
        yield (r.ratio, r.t2, r.w / WORK_UNIT)
