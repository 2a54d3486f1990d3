"""Restoration quality and detection metrics."""

from dataclasses import dataclass

import numpy as np

from .core import as_image, as_mask, seqsum


def psnr(u_hat, u):
    """Peak signal-to-noise ratio in dB with the peak fixed at 255.

    10 * log10(255^2 / MSE); returns numpy.inf when the images coincide.
    """
    u_hat = as_image(u_hat, "u_hat")
    u = as_image(u, "u")
    if u_hat.shape != u.shape:
        raise ValueError(f"shape mismatch {u_hat.shape} vs {u.shape}")
    diff = u_hat - u
    mse = seqsum(diff * diff) / u.size
    if mse == 0.0:
        return np.inf
    return 10.0 * np.log10(255.0 ** 2 / mse)


@dataclass
class DetectionStats:
    """Agreement between an estimated and a ground-truth damage mask."""

    misses: int       # truly damaged but marked kept
    false_hits: int   # truly kept but marked damaged
    recall: float
    precision: float


def detection_stats(mask_est, mask_true):
    """Compare damage detections (bit 0 = damaged) against ground truth."""
    mask_est = as_mask(mask_est, name="mask_est")
    mask_true = as_mask(mask_true, name="mask_true")
    if mask_est.shape != mask_true.shape:
        raise ValueError(f"shape mismatch {mask_est.shape} vs {mask_true.shape}")
    misses = int(np.count_nonzero((mask_true == 0) & (mask_est == 1)))
    false_hits = int(np.count_nonzero((mask_true == 1) & (mask_est == 0)))
    true_zeros = int(np.count_nonzero(mask_true == 0))
    est_zeros = int(np.count_nonzero(mask_est == 0))
    recall = 1.0 if true_zeros == 0 else 1.0 - misses / true_zeros
    precision = 1.0 if est_zeros == 0 else 1.0 - false_hits / est_zeros
    return DetectionStats(misses=misses, false_hits=false_hits,
                          recall=recall, precision=precision)
