"""Piecewise-constant propagation of the qubit density matrix.

Every segment is broken into pieces of constant (delta, omega, gamma_eff);
inside a piece the state is advanced with the exact propagator
``expm(L dt)``, so the only approximation left is how a detuning ramp is
discretized.

At every piece boundary the trajectory holds two samples with the same time
and state: the last one under the old controls and the first one under the
new controls. Times are therefore non-decreasing rather than strictly
increasing; the duplicated rows are what lets the work bookkeeping see a
detuning jump exactly.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import thermo
from .errors import InvalidState, Timeout
from .linalg import expm
from .liouvillian import QubitParams, build_liouvillian, unvectorize, vectorize

RAMP_MIN_SUBSTEPS = 100
RAMP_MAX_SUBSTEP = 50e-9
DWELL_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    pass


@dataclass(frozen=True)
class LinearRamp:
    start: float
    stop: float


@dataclass(frozen=True)
class Staircase:
    # (detuning in rad/s, dwell in s) per plateau
    steps: tuple

    @property
    def duration(self):
        return math.fsum(dwell for _, dwell in self.steps)


@dataclass(frozen=True)
class Segment:
    duration: float
    params: QubitParams
    profile: object = field(default_factory=Constant)
    stroke: int = 0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"segment duration must be > 0, got {self.duration}")
        if isinstance(self.profile, Staircase):
            if abs(self.profile.duration - self.duration) > DWELL_TOL:
                raise ValueError("staircase dwells must sum to the segment duration")
            if any(dwell <= 0 for _, dwell in self.profile.steps):
                raise ValueError("staircase dwells must be positive")

    def pieces(self, ramp_substeps=None):
        """(params, duration) for each constant-control piece."""
        prof = self.profile
        p = self.params
        if isinstance(prof, Constant):
            return [(p, self.duration)]
        if isinstance(prof, Staircase):
            return [(QubitParams(d, p.omega, p.gamma_eff), dwell) for d, dwell in prof.steps]
        if isinstance(prof, LinearRamp):
            n = ramp_substeps or max(RAMP_MIN_SUBSTEPS, math.ceil(self.duration / RAMP_MAX_SUBSTEP - 1e-9))
            h = self.duration / n
            # midpoint value of the ramp on each sub-step
            return [
                (QubitParams(prof.start + (prof.stop - prof.start) * (k + 0.5) / n, p.omega, p.gamma_eff), h)
                for k in range(n)
            ]
        raise TypeError(f"unknown profile {prof!r}")


@dataclass(frozen=True)
class Schedule:
    segments: tuple
    sample_dt: float

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        if not 0 < self.sample_dt <= min(s.duration for s in self.segments):
            raise ValueError("sample_dt must be positive and no longer than the shortest segment")

    @property
    def duration(self):
        return math.fsum(s.duration for s in self.segments)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    delta: np.ndarray
    omega: np.ndarray
    gamma_eff: np.ndarray
    stroke: np.ndarray
    cycle: np.ndarray

    def __len__(self):
        return len(self.times)

    @classmethod
    def single(cls, t, rho, params, stroke=0, cycle=0):
        return cls(
            np.array([t], dtype=float),
            np.asarray(rho, dtype=complex)[None].copy(),
            np.array([params.delta]),
            np.array([params.omega]),
            np.array([params.gamma_eff]),
            np.array([stroke]),
            np.array([cycle]),
        )

    @classmethod
    def concat(cls, parts):
        parts = [p for p in parts if len(p)]
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in cls._fields()))

    @staticmethod
    def _fields():
        return ("times", "states", "delta", "omega", "gamma_eff", "stroke", "cycle")

    def select(self, mask):
        return Trajectory(*(getattr(self, f)[mask] for f in self._fields()))

    def with_cycle(self, index):
        out = self.select(slice(None))
        out.cycle = np.full(len(out), index)
        return out

    def shifted(self, dt):
        out = self.select(slice(None))
        out.times = out.times + dt
        return out

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def p_e(self):
        return self.states[:, 1, 1].real

    @property
    def p_g(self):
        return self.states[:, 0, 0].real

    @property
    def rho_eg(self):
        return self.states[:, 1, 0]

    @property
    def energy_hamiltonians(self):
        """Bare level Hamiltonian delta |e><e| at every sample."""
        h = np.zeros((len(self), 2, 2), dtype=complex)
        h[:, 1, 1] = self.delta
        return h

    @property
    def t_eff(self):
        return np.array([thermo.effective_temperature_or_zero(r, d) for r, d in zip(self.states, self.delta)])

    @property
    def coherence(self):
        a = np.abs(self.states)
        return a.sum(axis=(1, 2)) - np.trace(a, axis1=1, axis2=2)

    @property
    def entropy(self):
        p = np.linalg.eigvalsh(self.states)
        logs = np.log(np.where(p > thermo.ENTROPY_CUTOFF, p, 1.0))
        return -np.sum(np.where(p > thermo.ENTROPY_CUTOFF, p * logs, 0.0), axis=1)


def check_state(rho, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 3):
        raise InvalidState(f"density matrix must be 2x2 or 3x3, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidState("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise InvalidState(f"trace is {np.trace(rho).real:.3e}, expected 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -pos_tol:
        raise InvalidState("density matrix is not positive semidefinite")
    return rho


@lru_cache(maxsize=8192)
def _propagator(delta, omega, gamma_eff, dt):
    u = expm(build_liouvillian(QubitParams(delta, omega, gamma_eff)) * dt)
    u.setflags(write=False)
    return u


def propagator(params: QubitParams, dt):
    return _propagator(float(params.delta), float(params.omega), float(params.gamma_eff), float(dt))


def _propagate_piece(vec, params, duration, sample_dt, t0):
    n_full = max(0, math.ceil(duration / sample_dt - 1e-9) - 1)
    times = [t0]
    vecs = [vec]
    u = propagator(params, sample_dt)
    for k in range(1, n_full + 1):
        vec = u @ vec
        times.append(t0 + k * sample_dt)
        vecs.append(vec)
    rem = duration - n_full * sample_dt
    vec = propagator(params, rem) @ vec
    times.append(t0 + duration)
    vecs.append(vec)
    return times, vecs


def propagate_segment(rho0, seg: Segment, sample_dt, t0=0.0, ramp_substeps=None, cycle=0, check=True):
    """Evolve ``rho0`` through ``seg`` and sample it every ``sample_dt``.

    Each constant piece contributes its start sample, the interior grid
    points and its end sample.
    """
    if check:
        check_state(rho0)
    if not sample_dt > 0:
        raise ValueError("sample_dt must be positive")
    vec = vectorize(rho0)
    parts = []
    t = t0
    for params, dur in seg.pieces(ramp_substeps):
        times, vecs = _propagate_piece(vec, params, dur, sample_dt, t)
        vec = vecs[-1]
        t = t + dur
        n = len(times)
        states = np.array([unvectorize(v) for v in vecs])
        states = 0.5 * (states + states.conj().transpose(0, 2, 1))
        parts.append(
            Trajectory(
                np.array(times),
                states,
                np.full(n, params.delta),
                np.full(n, params.omega),
                np.full(n, params.gamma_eff),
                np.full(n, seg.stroke),
                np.full(n, cycle),
            )
        )
    return Trajectory.concat(parts)


def propagate_schedule(rho0, schedule: Schedule, t0=0.0, ramp_substeps=None, cycle=0):
    parts = []
    rho = rho0
    t = t0
    for seg in schedule.segments:
        piece = propagate_segment(rho, seg, schedule.sample_dt, t, ramp_substeps, cycle)
        parts.append(piece)
        rho = piece.final_state
        t = piece.times[-1]
    return Trajectory.concat(parts)


def aom_discretize(start, stop, step, dwell) -> Staircase:
    """Staircase approximating a detuning scan from ``start`` to ``stop``.

    The first plateau is already one step away from ``start``; the last one
    sits exactly on ``stop``.
    """
    if not step > 0 or not dwell > 0:
        raise ValueError("step and dwell must be positive")
    span = stop - start
    n = max(1, math.ceil(abs(span) / step - 1e-9))
    sign = 1.0 if span >= 0 else -1.0
    values = [start + sign * step * k for k in range(1, n)] + [stop]
    return Staircase(tuple((v, dwell) for v in values))


def relax_to_steady(rho0, params: QubitParams, tol=1e-8, t_max=None):
    """Propagate in chunks of 1/gamma_eff until successive states differ by
    at most ``tol`` (Frobenius). Returns (state, elapsed time)."""
    if not params.gamma_eff > 0:
        raise ValueError("relaxation needs gamma_eff > 0")
    chunk = 1.0 / params.gamma_eff
    if t_max is None:
        t_max = 200.0 / params.gamma_eff
    u = propagator(params, chunk)
    vec = vectorize(rho0)
    elapsed = 0.0
    while True:
        nxt = u @ vec
        elapsed += chunk
        if np.linalg.norm(nxt - vec) <= tol:
            rho = unvectorize(nxt)
            return 0.5 * (rho + rho.conj().T), elapsed
        if elapsed >= t_max - 1e-15:
            raise Timeout(f"no convergence to tol={tol} within {t_max:.3e} s")
        vec = nxt
