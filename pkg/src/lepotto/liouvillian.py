"""Two- and three-level Liouvillians, their spectra and steady states.

Density matrices are plain ``numpy`` arrays in the basis ``(|g>, |e>)`` (or
``(|g>, |e>, |p>)``). The two-level superoperator acts on the vector
``(rho_ee, rho_eg, rho_ge, rho_gg)``; the three-level one acts on the
row-major flattening of ``rho`` in ``(g, e, p)`` order.
"""
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import linalg
from .errors import (
    DegenerateParams,
    DeltaNotZero,
    NoBracket,
    NonUniqueSteadyState,
    ZeroGamma,
)

G, E, P = 0, 1, 2


@dataclass(frozen=True)
class QubitParams:
    """Control triple of the effective qubit.

    delta and omega in rad/s, gamma_eff in 1/s.
    """

    delta: float
    omega: float
    gamma_eff: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.gamma_eff < 0:
            raise ValueError(f"gamma_eff must be >= 0, got {self.gamma_eff}")

    @property
    def ratio(self):
        return self.omega / self.gamma_eff if self.gamma_eff > 0 else np.inf


@dataclass(frozen=True)
class ThreeLevelParams:
    delta: float
    omega: float
    omega_p: float
    gamma_g: float
    gamma_e: float

    def __post_init__(self):
        for name in ("omega", "omega_p", "gamma_g", "gamma_e"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def gamma(self):
        return self.gamma_g + self.gamma_e


class Phase(str, Enum):
    EXACT = "exact"
    BROKEN = "broken"
    AT_LEP = "at-lep"


@dataclass(frozen=True)
class PhaseClass:
    phase: Phase
    ratio: float
    xi: complex


def build_hamiltonian(p: QubitParams):
    """H = delta |e><e| + omega/2 (|e><g| + |g><e|), basis (g, e)."""
    return np.array([[0.0, p.omega / 2], [p.omega / 2, p.delta]], dtype=complex)


def build_liouvillian(p: QubitParams):
    d, w, g = p.delta, p.omega, p.gamma_eff
    h = 0.5j * w
    return np.array(
        [
            [-g, h, -h, 0],
            [h, -(g / 2 + 1j * d), 0, -h],
            [-h, 0, -(g / 2 - 1j * d), h],
            [g, -h, h, 0],
        ],
        dtype=complex,
    )


def vectorize(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape == (2, 2):
        return rho[::-1, ::-1].reshape(4).copy()
    return rho.reshape(-1).copy()


def unvectorize(v):
    v = np.asarray(v, dtype=complex)
    if v.size == 4:
        return v.reshape(2, 2)[::-1, ::-1].copy()
    n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n).copy()


def lindblad_superoperator(h, jumps):
    """Superoperator of -i[h, .] + sum_k D[L_k] for row-major vectorization."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    eye = np.eye(n)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in jumps:
        op = np.asarray(op, dtype=complex)
        ldl = op.conj().T @ op
        sup += np.kron(op, op.conj()) - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def three_level_hamiltonian(t: ThreeLevelParams):
    h = np.zeros((3, 3), dtype=complex)
    h[E, E] = t.delta
    h[E, G] = h[G, E] = t.omega / 2
    h[E, P] = h[P, E] = t.omega_p / 2
    return h


def three_level_jumps(t: ThreeLevelParams):
    to_g = np.zeros((3, 3), dtype=complex)
    to_g[G, P] = np.sqrt(t.gamma_g)
    to_e = np.zeros((3, 3), dtype=complex)
    to_e[E, P] = np.sqrt(t.gamma_e)
    return [to_g, to_e]


def build_liouvillian_three_level(t: ThreeLevelParams):
    return lindblad_superoperator(three_level_hamiltonian(t), three_level_jumps(t))


def effective_decay_rate(t: ThreeLevelParams):
    """gamma_g * omega_p**2 / gamma**2, from adiabatic elimination of |p>."""
    if t.gamma <= 0:
        raise ZeroGamma("gamma_g + gamma_e must be positive")
    return t.gamma_g * t.omega_p**2 / t.gamma**2


def xi(p: QubitParams):
    return np.sqrt(complex(p.gamma_eff**2 - 16 * p.omega**2))


def analytic_eigenvalues(p: QubitParams):
    """Closed-form Liouvillian spectrum at zero detuning, ordered l1..l4.

    l2 is -gamma/2: the characteristic polynomial of the matrix factors as
    l (gamma + 2 l) (2 l**2 + 3 gamma l + gamma**2 + 2 omega**2) / 4.
    """
    if p.delta != 0:
        raise DeltaNotZero(f"closed forms need delta == 0, got {p.delta}")
    g = p.gamma_eff
    x = xi(p)
    return np.array([0.0, -g / 2, (-3 * g - x) / 4, (-3 * g + x) / 4], dtype=complex)


def spectrum(p: QubitParams):
    return linalg.eig(build_liouvillian(p))


def classify_phase(p: QubitParams, tol_lep=1e-9) -> PhaseClass:
    if p.omega == 0 and p.gamma_eff == 0:
        raise DegenerateParams("omega and gamma_eff are both zero")
    g, four_w = p.gamma_eff, 4 * p.omega
    if abs(g - four_w) <= tol_lep * max(g, four_w):
        phase = Phase.AT_LEP
    elif g < four_w:
        phase = Phase.EXACT
    else:
        phase = Phase.BROKEN
    return PhaseClass(phase, p.ratio, xi(p))


def steady_state(p: QubitParams):
    """Unique normalized kernel vector of the Liouvillian, as a 2x2 matrix."""
    kernel = linalg.nullspace(build_liouvillian(p))
    if len(kernel) != 1:
        raise NonUniqueSteadyState(f"kernel dimension is {len(kernel)}")
    rho = unvectorize(kernel[0])
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def steady_state_three_level(t: ThreeLevelParams):
    kernel = linalg.nullspace(build_liouvillian_three_level(t))
    if len(kernel) != 1:
        raise NonUniqueSteadyState(f"kernel dimension is {len(kernel)}")
    rho = unvectorize(kernel[0])
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def steady_excited_population(p: QubitParams):
    """Closed-form steady-state P_e = omega^2 / (4 delta^2 + gamma^2 + 2 omega^2)."""
    w2 = p.omega**2
    den = 4 * p.delta**2 + p.gamma_eff**2 + 2 * w2
    if den == 0:
        raise DegenerateParams("steady state undefined for omega = gamma_eff = 0")
    return w2 / den


# --- exceptional point location ------------------------------------------


def slow_pair(eigenvalues, gamma_eff):
    """The two eigenvalues continuing l3, l4: drop the one nearest zero, then
    take the two closest to -3 gamma_eff / 4."""
    w = np.asarray(eigenvalues)
    rest = np.delete(w, np.argmin(np.abs(w)))
    idx = np.argsort(np.abs(rest + 0.75 * gamma_eff), kind="stable")[:2]
    pair = rest[idx]
    return pair[linalg.sort_order(pair)]


def pair_discriminant(eigenvalues, gamma_eff):
    """Re((la - lb)^2) / gamma_eff^2: > 0 broken, < 0 exact, 0 at the LEP."""
    a, b = slow_pair(eigenvalues, gamma_eff)
    return float(((a - b) ** 2).real) / gamma_eff**2


def two_level_source(gamma_eff=1.0, delta=0.0):
    """Spectrum source for :func:`lep_locate` built on the 4x4 Liouvillian."""

    def source(ratio):
        p = QubitParams(delta, ratio * gamma_eff, gamma_eff)
        return np.linalg.eigvals(build_liouvillian(p)), gamma_eff

    return source


def three_level_source(t: ThreeLevelParams):
    """Spectrum source on the 9x9 Liouvillian; the ratio is Omega/gamma_eff
    with gamma_eff from :func:`effective_decay_rate`."""
    g_eff = effective_decay_rate(t)

    def source(ratio):
        tt = replace(t, omega=ratio * g_eff)
        return np.linalg.eigvals(build_liouvillian_three_level(tt)), g_eff

    return source


def lep_locate(source, lo, hi, rtol=1e-4):
    """Bisect the slow-pair discriminant for the coalescence ratio in [lo, hi]."""
    def disc(r):
        w, g = source(r)
        return pair_discriminant(w, g)

    d_lo, d_hi = disc(lo), disc(hi)
    if d_lo == 0:
        return lo
    if d_hi == 0:
        return hi
    if np.sign(d_lo) == np.sign(d_hi):
        raise NoBracket(f"no phase change of the slow pair in [{lo}, {hi}]")
    while hi - lo > rtol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        d_mid = disc(mid)
        if d_mid == 0:
            return mid
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
