"""Minimum-MSE power scaling across groups and the linear shrinkage decoder.

Groups are scaled so that, for Gaussian sources under an average transmit
power of one per channel sample, the total reconstruction MSE over an AWGN
channel is minimized: each group's gain is proportional to its variance to
the power -1/4, normalized so the weighted average power is exactly one.
"""

from __future__ import annotations

import numpy as np

from .errors import SparseCastError


def min_mse_gains(variances: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Optimal per-group scaling under a unit average power budget.

    g_j = variance_j**(-1/4) * sqrt(sum(m) / sum(m * sqrt(variance))), with
    zero-variance groups assigned gain 0 (their limit). Satisfies
    sum(m_j * g_j**2 * variance_j) == sum(m_j).
    """
    lam = np.asarray(variances, dtype=np.float64)
    m = np.asarray(lengths, dtype=np.float64)
    if lam.shape != m.shape or lam.ndim != 1:
        raise SparseCastError(f"variance/length shape mismatch: {lam.shape} vs {m.shape}")
    if np.any(m < 1):
        raise SparseCastError("every group length must be >= 1")
    if np.any(lam < 0):
        raise SparseCastError("variances must be nonnegative")
    if not np.any(lam > 0):
        raise SparseCastError("all group variances are zero; nothing to allocate")
    denom = float(np.sum(m * np.sqrt(lam)))
    factor = np.sqrt(np.sum(m) / denom)
    gains = np.zeros_like(lam)
    positive = lam > 0
    gains[positive] = lam[positive] ** -0.25 * factor
    return gains


def mmse_estimate(
    received: np.ndarray,
    gain: float,
    variance: float,
    mean: float,
    noise_variance: float,
) -> np.ndarray:
    """Linear MMSE estimate of an uncompressed group from its noisy samples.

    estimate = gain*variance / (gain**2 * variance + noise_variance) * received + mean.
    A zero gain or zero variance collapses to the constant mean vector.
    """
    received = np.asarray(received, dtype=np.float64)
    if gain == 0.0 or variance == 0.0:
        return np.full_like(received, mean)
    coef = gain * variance / (gain * gain * variance + noise_variance)
    return coef * received + mean
