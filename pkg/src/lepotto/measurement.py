"""Projection-noise emulation for excited-state population measurements."""
from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = "PCG64"


@dataclass(frozen=True)
class MeasurementSample:
    mean: float
    std: float


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _estimate(k, shots):
    mean = k / shots
    return mean, np.sqrt(mean * (1 - mean) / shots)


def emulate_shots(p_true, shots, seed) -> MeasurementSample:
    """Binomial estimate of ``p_true`` from ``shots`` projective measurements.

    The reported std is the estimator's standard error sqrt(p(1-p)/N)
    evaluated at the estimate.
    """
    if not 0 <= p_true <= 1:
        raise ValueError(f"p_true must lie in [0, 1], got {p_true}")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    k = make_rng(seed).binomial(shots, p_true)
    mean, std = _estimate(k, shots)
    return MeasurementSample(float(mean), float(std))


def emulate_series(p_true, shots, rng):
    """Vectorized version for a whole trajectory; returns (means, stds)."""
    p = np.clip(np.asarray(p_true, dtype=float), 0.0, 1.0)
    k = rng.binomial(shots, p)
    return _estimate(k, shots)
