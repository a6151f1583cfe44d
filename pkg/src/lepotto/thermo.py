"""First-law bookkeeping and figures of merit.

Energies are in rad/s (hbar = 1) and temperatures in the same units
(k_B = 1). The internal energy is U = tr(rho H) with the bare level
Hamiltonian H = delta |e><e|; the drive only steers the state and carries no
energy of its own. Work increments are the work done *on* the qubit, so the
extracted work of a cycle is ``-sum(dW)``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator, MissingHamiltonian, NoHeatAbsorbed, ZeroPopulation
from .liouvillian import QubitParams, steady_excited_population

HEATING_STROKE = 2
ENTROPY_CUTOFF = 1e-14


@dataclass
class ThermoLedger:
    dW: np.ndarray
    dQ: np.ndarray
    step_stroke: np.ndarray
    stroke_work: dict
    stroke_heat: dict
    q_in: float
    q_out: float
    w_net: float
    delta_u: float
    cycle_duration: float

    @property
    def first_law_residual(self):
        return abs(self.w_net - (self.q_in + self.q_out))

    def to_dict(self):
        return {
            "w_net": self.w_net,
            "q_in": self.q_in,
            "q_out": self.q_out,
            "q_out_abs": abs(self.q_out),
            "delta_u": self.delta_u,
            "cycle_duration_s": self.cycle_duration,
            "first_law_residual": self.first_law_residual,
            "stroke_work_on": {str(k): v for k, v in sorted(self.stroke_work.items())},
            "stroke_heat": {str(k): v for k, v in sorted(self.stroke_heat.items())},
        }


@dataclass
class EfficiencyReport:
    eta_o: float
    eta_c: float
    eta_q: float
    p_out: float
    w_net: float
    q_in: float
    q_out: float
    t_eff: np.ndarray = field(repr=False)
    c_l1: np.ndarray = field(repr=False)
    entropy: np.ndarray = field(repr=False)

    def to_dict(self):
        return {
            "eta_o": self.eta_o,
            "eta_c": self.eta_c,
            "eta_q": self.eta_q,
            "p_out": self.p_out,
            "w_net": self.w_net,
            "q_in": self.q_in,
            "q_out": self.q_out,
            "c_l1_final": float(self.c_l1[-1]),
            "c_l1_max": float(self.c_l1.max()),
            "entropy_final": float(self.entropy[-1]),
        }


def first_law_accumulate(traj) -> ThermoLedger:
    """Midpoint-rule work and heat increments along a sampled trajectory.

    dW_k = tr(rho_mid (H_{k+1} - H_k)), dQ_k = tr(H_mid (rho_{k+1} - rho_k)).
    The two telescope to U_end - U_start exactly.
    """
    delta = getattr(traj, "delta", None)
    if delta is None or np.any(~np.isfinite(np.asarray(delta, dtype=float))):
        raise MissingHamiltonian("trajectory carries no detuning record")
    if len(traj) < 2:
        raise ValueError("need at least two samples")
    h = traj.energy_hamiltonians
    rho = traj.states
    rho_mid = 0.5 * (rho[1:] + rho[:-1])
    h_mid = 0.5 * (h[1:] + h[:-1])
    dW = np.einsum("kij,kji->k", rho_mid, np.diff(h, axis=0)).real
    dQ = np.einsum("kij,kji->k", h_mid, np.diff(rho, axis=0)).real

    step_stroke = np.asarray(traj.stroke[1:])
    stroke_work, stroke_heat = {}, {}
    for s in np.unique(step_stroke):
        sel = step_stroke == s
        stroke_work[int(s)] = math.fsum(dW[sel])
        stroke_heat[int(s)] = math.fsum(dQ[sel])

    dt = np.diff(traj.times)
    u = np.einsum("kij,kji->k", rho, h).real
    return ThermoLedger(
        dW=dW,
        dQ=dQ,
        step_stroke=step_stroke,
        stroke_work=stroke_work,
        stroke_heat=stroke_heat,
        q_in=math.fsum(dQ[dQ > 0]),
        q_out=math.fsum(dQ[dQ < 0]),
        w_net=-math.fsum(dW),
        delta_u=float(u[-1] - u[0]),
        cycle_duration=math.fsum(dt[step_stroke > 0]),
    )


def output_power(ledger: ThermoLedger):
    if not ledger.cycle_duration > 0:
        raise ValueError("cycle duration must be positive")
    return ledger.w_net / ledger.cycle_duration


def eta_ideal(delta_min, delta_max):
    return 1.0 - delta_min / delta_max


def eta_conventional(ledger: ThermoLedger):
    """W / Q_in, i.e. 1 + Q_out / Q_in with Q_out stored as a negative number."""
    if not ledger.q_in > 0:
        raise NoHeatAbsorbed(f"Q_in = {ledger.q_in:.3e}")
    return ledger.w_net / ledger.q_in


@dataclass(frozen=True)
class HeatingPopulations:
    start: float
    end: float
    steady: float

    @property
    def overshoot(self):
        return self.end - self.steady


def heating_populations(traj, spec) -> HeatingPopulations:
    sel = np.flatnonzero(np.asarray(traj.stroke) == HEATING_STROKE)
    if sel.size == 0:
        raise ValueError("trajectory has no heating stroke")
    heat = spec.strokes[1]
    steady = steady_excited_population(QubitParams(spec.delta_max, heat.omega, heat.gamma_eff))
    p_e = traj.p_e
    return HeatingPopulations(float(p_e[sel[0]]), float(p_e[sel[-1]]), steady)


def eta_quantum(traj, spec):
    """Quantum efficiency of one cycle.

    Work is the isochoric-stroke estimate (P_h(t2) - P_h^S)(dmax - dmin),
    which assumes populations frozen during the adiabatic strokes; the heat
    is what the heating stroke would absorb on its way to its own steady
    state, (P_h^L - P_h^S) dmax.
    """
    hp = heating_populations(traj, spec)
    gap = hp.steady - hp.start
    if abs(gap) < 1e-12:
        raise DegenerateDenominator("heating stroke starts at its own steady state")
    work = (hp.end - hp.start) * (spec.delta_max - spec.delta_min)
    return work / (gap * spec.delta_max)


def effective_temperature(rho, delta):
    """delta / ln(P_g / P_e) with k_B = 1. inf when P_e == P_g."""
    if delta == 0:
        return 0.0
    rho = np.asarray(rho)
    p_g, p_e = rho[0, 0].real, rho[1, 1].real
    if p_e <= 0 or p_g <= 0:
        raise ZeroPopulation(f"P_e = {p_e:.3e}, P_g = {p_g:.3e}")
    if p_e == p_g:
        return math.inf
    return delta / math.log(p_g / p_e)


def effective_temperature_or_zero(rho, delta):
    """As :func:`effective_temperature`, reporting the T -> 0+ limit as 0."""
    try:
        return effective_temperature(rho, delta)
    except ZeroPopulation:
        return 0.0


def l1_coherence(rho):
    rho = np.asarray(rho)
    return float(np.abs(rho).sum() - np.abs(np.diag(rho)).sum())


def von_neumann_entropy(rho):
    p = np.linalg.eigvalsh(0.5 * (np.asarray(rho) + np.asarray(rho).conj().T))
    p = p[p > ENTROPY_CUTOFF]
    return float(-np.sum(p * np.log(p)))


def efficiency_report(traj, ledger, spec) -> EfficiencyReport:
    return EfficiencyReport(
        eta_o=eta_ideal(spec.delta_min, spec.delta_max),
        eta_c=eta_conventional(ledger),
        eta_q=eta_quantum(traj, spec),
        p_out=output_power(ledger),
        w_net=ledger.w_net,
        q_in=ledger.q_in,
        q_out=ledger.q_out,
        t_eff=traj.t_eff,
        c_l1=traj.coherence,
        entropy=traj.entropy,
    )
