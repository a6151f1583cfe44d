"""Dense complex linear algebra for the small (<= 9x9) matrices used here.

LAPACK (through numpy/scipy) does the heavy lifting; this module adds the
contracts the rest of the package relies on: input checks, a deterministic
eigenvalue order, phase-fixed eigenvectors and an ``expm`` that falls back
to scaling-and-squaring when the eigenbasis is ill-conditioned (which is
exactly what happens at an exceptional point).
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionTooLarge, NoConvergence, NonSquare

MAX_DIM = 9
EXPM_COND_LIMIT = 1e6
EXPM_RECON_RTOL = 1e-13
NULLSPACE_RTOL = 1e-10


def _square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise DimensionTooLarge(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _fix_phase(v):
    """Scale each column to unit norm with its largest entry real positive."""
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    idx = np.argmax(np.abs(v) - 1e-12 * np.arange(v.shape[0])[:, None], axis=0)
    pivot = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(pivot) / pivot)


def sort_order(values):
    """Indices ordering ``values`` by real part, then imaginary part.

    Real parts that agree to ~1e-10 of the spectral radius count as ties, so
    a complex-conjugate pair always comes out as (-i, +i) regardless of
    rounding noise in the real parts.
    """
    values = np.asarray(values)
    scale = max(float(np.max(np.abs(values), initial=0.0)), 1e-300)
    re = np.round(values.real / scale, 10)
    return np.lexsort((values.imag, re))


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray
    # columns are the right eigenvectors, matching eigenvalues[i]
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def residuals(self, m):
        m = np.asarray(m)
        return np.linalg.norm(m @ self.eigenvectors - self.eigenvectors * self.eigenvalues, axis=0)


def eig(m) -> SpectralResult:
    """Eigen-decomposition with deterministic ordering and phases."""
    m = _square(m)
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = sort_order(w)
    return SpectralResult(w[order], _fix_phase(v[:, order]))


def expm(m):
    """Matrix exponential.

    Uses the eigen-decomposition when the eigenvector matrix has condition
    number below ``EXPM_COND_LIMIT`` and reproduces ``m`` to
    ``EXPM_RECON_RTOL``; scipy's Pade scaling-and-squaring otherwise
    (defective or nearly defective input, or badly scaled entries).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    if not np.any(m):
        return np.eye(m.shape[0], dtype=complex)
    if m.shape[0] <= MAX_DIM:
        try:
            w, v = np.linalg.eig(m)
            if np.linalg.cond(v) < EXPM_COND_LIMIT:
                vinv = np.linalg.inv(v)
                if np.linalg.norm((v * w) @ vinv - m) <= EXPM_RECON_RTOL * np.linalg.norm(m):
                    return (v * np.exp(w)) @ vinv
        except np.linalg.LinAlgError:
            pass
    return scipy.linalg.expm(m)


def nullspace(m, tol=NULLSPACE_RTOL):
    """Orthonormal basis (list of vectors) for the numerical kernel of ``m``.

    A right singular vector belongs to the kernel when its singular value is
    at most ``tol * sigma_max``.
    """
    m = _square(m)
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        basis = np.eye(m.shape[0], dtype=complex)
    else:
        basis = vh[s <= tol * smax].conj().T
    if basis.shape[1] == 0:
        return []
    basis = _fix_phase(basis)
    return [basis[:, k].copy() for k in range(basis.shape[1])]
