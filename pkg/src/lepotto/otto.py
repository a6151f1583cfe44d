"""Four-stroke Otto cycle on the driven-dissipative qubit.

Stroke 1 ramps the detuning up (compression), stroke 2 holds it at its
maximum under a strong drive (heating), stroke 3 ramps it back down
(expansion) and stroke 4 holds it at its minimum under a weak drive
(cooling). The cycle is closed by letting the qubit relax under the cooling
controls; those samples carry stroke label 0.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import thermo
from .dynamics import Constant, LinearRamp, Segment, Trajectory, aom_discretize, propagate_segment, relax_to_steady
from .liouvillian import QubitParams, steady_state
from .units import US, khz_to_rad, rate_khz


class StrokeRole(str, Enum):
    COMPRESSION = "adiabatic-compression"
    HEATING = "isochoric-heating"
    EXPANSION = "adiabatic-expansion"
    COOLING = "isochoric-cooling"


ROLES = (StrokeRole.COMPRESSION, StrokeRole.HEATING, StrokeRole.EXPANSION, StrokeRole.COOLING)


class RampMode(str, Enum):
    STAIRCASE = "staircase"
    LINEAR = "linear"


class Regime(str, Enum):
    EXACT_EXACT = "exact-exact"
    BROKEN_BROKEN = "broken-broken"
    EXACT_BROKEN = "exact-broken"


@dataclass(frozen=True)
class StrokeParams:
    omega: float
    gamma_eff: float
    role: StrokeRole

    def qubit(self, delta):
        return QubitParams(delta, self.omega, self.gamma_eff)


AOM_STEP = khz_to_rad(2.0)
AOM_DWELL = 0.4 * US
DEFAULT_T2 = 12 * US
DEFAULT_T4 = 10 * US
DEFAULT_SAMPLE_DT = 0.02 * US


def staircase_duration(delta_min, delta_max, step=AOM_STEP, dwell=AOM_DWELL):
    return len(aom_discretize(delta_min, delta_max, step, dwell).steps) * dwell


@dataclass(frozen=True)
class OttoCycleSpec:
    delta_min: float
    delta_max: float
    strokes: tuple
    t2: float = DEFAULT_T2
    t1: float = None
    t3: float = None
    t4: float = DEFAULT_T4
    ramp_mode: RampMode = RampMode.STAIRCASE
    aom_step: float = AOM_STEP
    aom_dwell: float = AOM_DWELL
    sample_dt: float = DEFAULT_SAMPLE_DT
    relax_tol: float = 1e-8
    relax_t_max: float = None

    def __post_init__(self):
        if not self.delta_max > self.delta_min >= 0:
            raise ValueError("need delta_max > delta_min >= 0")
        if len(self.strokes) != 4:
            raise ValueError("an Otto cycle has exactly four strokes")
        object.__setattr__(self, "strokes", tuple(self.strokes))
        object.__setattr__(self, "ramp_mode", RampMode(self.ramp_mode))
        ramp_t = staircase_duration(self.delta_min, self.delta_max, self.aom_step, self.aom_dwell)
        if self.t1 is None:
            object.__setattr__(self, "t1", ramp_t)
        if self.t3 is None:
            object.__setattr__(self, "t3", ramp_t)
        for name in ("t1", "t2", "t3", "t4", "sample_dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def heating(self):
        return self.strokes[1]

    @property
    def cooling(self):
        return self.strokes[3]

    @property
    def stroke_time(self):
        return self.t1 + self.t2 + self.t3 + self.t4

    def initial_state(self):
        return steady_state(self.cooling.qubit(self.delta_min))

    def _ramp(self, start, stop, duration):
        if self.ramp_mode is RampMode.LINEAR:
            return LinearRamp(start, stop)
        stairs = aom_discretize(start, stop, self.aom_step, self.aom_dwell)
        # stretch the dwell when the stroke time is set explicitly
        dwell = duration / len(stairs.steps)
        return type(stairs)(tuple((v, dwell) for v, _ in stairs.steps))

    def segments(self):
        s1, s2, s3, s4 = self.strokes
        lo, hi = self.delta_min, self.delta_max
        return (
            Segment(self.t1, s1.qubit(lo), self._ramp(lo, hi, self.t1), stroke=1),
            Segment(self.t2, s2.qubit(hi), Constant(), stroke=2),
            Segment(self.t3, s3.qubit(hi), self._ramp(hi, lo, self.t3), stroke=3),
            Segment(self.t4, s4.qubit(lo), Constant(), stroke=4),
        )


def _strokes_khz(pairs):
    return tuple(StrokeParams(khz_to_rad(w), rate_khz(g), role) for (w, g), role in zip(pairs, ROLES))


# (Omega/2pi [kHz], gamma_eff [kHz]) for strokes 1-4
PRESET_TABLE = {
    Regime.EXACT_EXACT: ((23, 300), (82, 370), (24, 120), (24, 299)),
    Regime.BROKEN_BROKEN: ((25, 2500), (64, 2500), (25, 970), (25, 2500)),
    Regime.EXACT_BROKEN: ((25, 860), (90, 500), (25, 140), (25, 860)),
}
PRESET_DELTA_MAX_KHZ = 10.0


def preset(regime, **overrides) -> OttoCycleSpec:
    regime = Regime(regime)
    spec = OttoCycleSpec(
        delta_min=0.0,
        delta_max=khz_to_rad(PRESET_DELTA_MAX_KHZ),
        strokes=_strokes_khz(PRESET_TABLE[regime]),
    )
    return replace(spec, **overrides) if overrides else spec


def _run_one(spec, rho, t0, cycle):
    parts = [Trajectory.single(t0, rho, spec.cooling.qubit(spec.delta_min), stroke=0, cycle=cycle)]
    t = t0
    for seg in spec.segments():
        piece = propagate_segment(rho, seg, spec.sample_dt, t, cycle=cycle, check=False)
        parts.append(piece)
        rho = piece.final_state
        t = piece.times[-1]
    wait_params = spec.cooling.qubit(spec.delta_min)
    _, elapsed = relax_to_steady(rho, wait_params, spec.relax_tol, spec.relax_t_max)
    wait = propagate_segment(rho, Segment(elapsed, wait_params, Constant(), stroke=0), spec.sample_dt, t, cycle=cycle, check=False)
    parts.append(wait)
    return Trajectory.concat(parts)


def run_cycle(spec: OttoCycleSpec, rho0=None, n_cycles=1):
    """Run ``n_cycles`` back-to-back cycles.

    Returns the concatenated trajectory and one ledger per cycle.
    """
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    rho = spec.initial_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    parts, ledgers = [], []
    t = 0.0
    for k in range(n_cycles):
        traj = _run_one(spec, rho, t, k)
        parts.append(traj)
        ledgers.append(thermo.first_law_accumulate(traj))
        rho = traj.final_state
        t = traj.times[-1]
    return Trajectory.concat(parts), ledgers


@dataclass(frozen=True)
class CycleResult:
    trajectory: Trajectory
    ledger: thermo.ThermoLedger
    report: thermo.EfficiencyReport


def converged_cycle(spec: OttoCycleSpec, n_cycles=2) -> CycleResult:
    """Last of ``n_cycles`` cycles, with the first treated as transient."""
    traj, ledgers = run_cycle(spec, n_cycles=n_cycles)
    last = traj.select(traj.cycle == n_cycles - 1)
    return CycleResult(last, ledgers[-1], thermo.efficiency_report(last, ledgers[-1], spec))


@dataclass(frozen=True)
class SweepRow:
    t2: float
    w: float
    p_out: float
    eta_c: float
    eta_q: float


def _sweep_point(spec):
    res = converged_cycle(spec)
    r = res.report
    return SweepRow(spec.t2, r.w_net, r.p_out, r.eta_c, r.eta_q)


def _map(fn, items, workers):
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def sweep_t2(spec: OttoCycleSpec, t2_values, workers=1):
    t2_values = list(t2_values)
    if not t2_values or any(not t > 0 for t in t2_values):
        raise ValueError("t2 values must be a non-empty list of positive durations")
    return _map(_sweep_point, [replace(spec, t2=float(t)) for t in t2_values], workers)


def default_t2_grid():
    return [0.5 * US * k for k in range(1, 41)]


@dataclass(frozen=True)
class RatioRow:
    ratio: float
    t2: float
    w: float


def _ratio_point(spec):
    res = converged_cycle(spec)
    return RatioRow(spec.heating.omega / spec.heating.gamma_eff, spec.t2, res.report.w_net)


def with_heating_ratio(spec: OttoCycleSpec, ratio):
    heat = spec.heating
    strokes = list(spec.strokes)
    strokes[1] = replace(heat, omega=ratio * heat.gamma_eff)
    return replace(spec, strokes=tuple(strokes))


def sweep_ratio(base_spec: OttoCycleSpec, ratio_values, t2_values, workers=1):
    """Net work over the (heating Omega/gamma_eff, t2) grid, gamma_eff fixed."""
    ratio_values = list(ratio_values)
    if any(not r > 0 for r in ratio_values):
        raise ValueError("ratios must be positive")
    specs = [replace(with_heating_ratio(base_spec, r), t2=float(t)) for r in ratio_values for t in t2_values]
    return _map(_ratio_point, specs, workers)


def local_maxima(values):
    """Indices of strict interior local maxima (plateaus count once)."""
    v = np.asarray(values, dtype=float)
    out = []
    i = 1
    while i < len(v) - 1:
        if v[i] > v[i - 1]:
            j = i
            while j < len(v) - 1 and v[j + 1] == v[i]:
                j += 1
            if j < len(v) - 1 and v[j + 1] < v[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def stroke_population(traj, stroke):
    sel = np.asarray(traj.stroke) == stroke
    return traj.times[sel], traj.p_e[sel]


def has_interior_maximum(p_e):
    """Hump/ramp detector: the series rises to a strict local maximum and
    falls again somewhere inside the window."""
    return bool(local_maxima(p_e))


def is_monotone_nondecreasing(p_e, atol=1e-12):
    return bool(np.all(np.diff(np.asarray(p_e)) >= -atol))
