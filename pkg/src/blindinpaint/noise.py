"""Seeded Gaussian and impulse corruption, and the mixed-noise likelihood sim.

Corruption order is Gaussian first, impulse overwrite second, so impulse
pixels carry no information about the clean image.  Impulse corruption hits
an exact pixel count, round(level_s * rows * cols), chosen without
replacement by a partial Fisher-Yates shuffle; this makes the outlier budget
of the constraint-form solver exactly known in experiments.

Draw order per operation (one xoshiro256++ stream per seed, see rng module):

* add_gaussian: rows*cols normals in row-major pixel order (none if sigma=0).
* add_impulse: one uniform per selected pixel for the Fisher-Yates swaps,
  then one uniform per selected pixel (in selection order) for the value:
  salt-and-pepper takes d_min when u < 0.5 else d_max; random-valued takes
  d_min + u * (d_max - d_min).
* corrupt: a single stream does the Gaussian batch then the impulse batches.
* simulate_mixed_nll: all normals, then all impulse decisions, then all
  replacement values (replacement values are drawn for every trial and used
  only where the decision uniform is below level_s).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import D_MAX, D_MIN, as_image
from .rng import Xoshiro256pp

IMPULSE_KINDS = ("salt_pepper", "random_valued", "none")


@dataclass
class NoiseSpec:
    """Mixed-noise description: Gaussian sigma plus an impulse kind/level."""

    sigma: float = 0.0
    impulse_kind: str = "none"
    level_s: float = 0.0
    seed: int = 0
    clip: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.level_s <= 1.0:
            raise ValueError("level_s must be in [0, 1]")
        if self.impulse_kind not in IMPULSE_KINDS:
            raise ValueError(f"impulse_kind must be one of {IMPULSE_KINDS}")


def _impulse_count(level_s, npix):
    return int(math.floor(level_s * npix + 0.5))


def _add_gaussian(u, sigma, rng, clip):
    out = u.copy()
    if sigma > 0:
        out += sigma * rng.normals(u.size).reshape(u.shape)
        if clip:
            np.clip(out, D_MIN, D_MAX, out=out)
    return out


def _add_impulse(u, kind, level_s, rng):
    out = u.copy()
    mask = np.ones(u.shape, dtype=np.uint8)
    if kind == "none":
        return out, mask
    npix = u.size
    n_hit = _impulse_count(level_s, npix)
    if n_hit == 0:
        return out, mask
    idx = np.arange(npix)
    for i in range(n_hit):
        j = i + rng.index_below(npix - i)
        idx[i], idx[j] = idx[j], idx[i]
    hits = idx[:n_hit]
    flat = out.ravel()
    draws = rng.uniforms(n_hit)
    if kind == "salt_pepper":
        flat[hits] = np.where(draws < 0.5, D_MIN, D_MAX)
    elif kind == "random_valued":
        flat[hits] = D_MIN + draws * (D_MAX - D_MIN)
    else:
        raise ValueError(f"unknown impulse kind {kind!r}")
    mask.ravel()[hits] = 0
    return out, mask


def add_gaussian(u, sigma, seed, clip=False):
    """Add i.i.d. zero-mean Gaussian noise of std sigma; deterministic per seed."""
    u = as_image(u)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return _add_gaussian(u, sigma, Xoshiro256pp(seed), clip)


def add_impulse(u, kind, level_s, seed):
    """Overwrite an exact fraction of pixels with impulse noise.

    Returns (corrupted image, ground-truth mask) where mask bit 0 marks a
    corrupted pixel.  Exactly round(level_s * rows * cols) distinct pixels
    are hit, even when a drawn value happens to equal the original one.
    """
    u = as_image(u)
    if not 0.0 <= level_s <= 1.0:
        raise ValueError("level_s must be in [0, 1]")
    if kind not in IMPULSE_KINDS:
        raise ValueError(f"kind must be one of {IMPULSE_KINDS}")
    return _add_impulse(u, kind, level_s, Xoshiro256pp(seed))


def corrupt(u, spec):
    """Apply a full NoiseSpec: Gaussian first, then impulse overwrite.

    One generator stream serves both stages.  Returns (observed image,
    ground-truth impulse mask).
    """
    u = as_image(u)
    rng = Xoshiro256pp(spec.seed)
    g = _add_gaussian(u, spec.sigma, rng, spec.clip)
    return _add_impulse(g, spec.impulse_kind, spec.level_s, rng)


@dataclass
class NllHistogram:
    """Histogrammed negative log-likelihood of simulated mixed noise."""

    edges: np.ndarray
    centers: np.ndarray
    counts: np.ndarray
    nll: np.ndarray  # nan where the bin is empty
    trials: int

    @property
    def empty(self):
        return self.counts == 0


def simulate_mixed_nll(true_value, sigma, level_s, trials, bins, seed):
    """Monte-Carlo negative log-likelihood of one pixel under mixed noise.

    Each trial perturbs true_value by N(0, sigma^2), then with probability
    level_s replaces the result by a uniform draw on [d_min, d_max].
    Observed values are histogrammed over [d_min, d_max]; draws outside the
    range land in the boundary bins.  Returns -log(count / trials) per bin,
    with empty bins flagged (nan).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if bins < 3:
        raise ValueError("bins must be >= 3")
    if sigma < 0 or not 0.0 <= level_s <= 1.0:
        raise ValueError("invalid sigma or level_s")
    rng = Xoshiro256pp(seed)
    if sigma > 0:
        samples = true_value + sigma * rng.normals(trials)
    else:
        samples = np.full(trials, float(true_value))
    decisions = rng.uniforms(trials)
    values = rng.uniforms(trials)
    hit = decisions < level_s
    samples[hit] = D_MIN + values[hit] * (D_MAX - D_MIN)

    width = (D_MAX - D_MIN) / bins
    idx = np.floor((samples - D_MIN) / width).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins).astype(np.int64)

    edges = D_MIN + width * np.arange(bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    nll = np.full(bins, np.nan)
    nonzero = counts > 0
    nll[nonzero] = -np.log(counts[nonzero] / trials)
    return NllHistogram(edges=edges, centers=centers, counts=counts, nll=nll,
                        trials=int(trials))
