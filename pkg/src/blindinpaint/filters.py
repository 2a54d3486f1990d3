"""Median-type impulse detectors used to build the initial mask.

Both filters return (filtered image, detection mask) with mask bit 0 at
every pixel whose value the filter changed.  Windows are clamped to the
image domain at borders rather than padded.  Medians of even-sized
multisets are the lower median (order statistic ceil(n/2)) so results are
identical across implementations.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_image


@dataclass
class AmfConfig:
    """Adaptive median filter: window grows odd from 3 up to max_window."""

    max_window: int = 19

    def __post_init__(self):
        if self.max_window < 3 or self.max_window % 2 == 0:
            raise ValueError("max_window must be an odd integer >= 3")


@dataclass
class AcwmfConfig:
    """Center-weighted median detector thresholds.

    deltas[k] pairs with center weight 2k+1 (so deltas[0] guards the plain
    median) and must be strictly decreasing.  Flag threshold per weight is
    scale_s * MAD + deltas[k].
    """

    deltas: tuple = (40.0, 25.0, 10.0, 5.0)
    scale_s: float = 0.6

    def __post_init__(self):
        if len(self.deltas) != 4 or any(d <= 0 for d in self.deltas):
            raise ValueError("deltas must be four positive thresholds")
        if not all(a > b for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly decreasing")
        if self.scale_s <= 0:
            raise ValueError("scale_s must be positive")


def _lower_median(sorted_vals):
    # order statistic ceil(n/2), 0-indexed (n-1)//2
    return sorted_vals[(len(sorted_vals) - 1) // 2]


def _window(f, i, j, half):
    m, n = f.shape
    return f[max(0, i - half):min(m, i + half + 1),
             max(0, j - half):min(n, j + half + 1)]


def amf(f, cfg=None):
    """Adaptive median filter (two-stage) for salt-and-pepper noise.

    Stage A grows the window until its median is strictly between its min
    and max (or max_window is reached).  Stage B keeps the center pixel if
    it is strictly between the window extremes, else writes the window
    median; when stage A never succeeds the window median is written
    directly.  Returns (filtered, mask) with mask 0 exactly where the
    output value differs from the input.
    """
    f = as_image(f)
    cfg = cfg or AmfConfig()
    m, n = f.shape
    out = f.copy()
    mask = np.ones(f.shape, dtype=np.uint8)
    for i in range(m):
        for j in range(n):
            stage_a_ok = False
            w = 3
            while True:
                vals = np.sort(_window(f, i, j, w // 2), axis=None)
                zmin = vals[0]
                zmax = vals[-1]
                zmed = _lower_median(vals)
                if zmin < zmed < zmax:
                    stage_a_ok = True
                    break
                w += 2
                if w > cfg.max_window:
                    break
            center = f[i, j]
            if stage_a_ok and zmin < center < zmax:
                new = center
            else:
                new = zmed
            if new != center:
                out[i, j] = new
                mask[i, j] = 0
    return out, mask


def acwmf(f, cfg=None):
    """Adaptive center-weighted median detector for random-valued noise.

    Over the (border-clamped) 3x3 window, computes center-weighted medians
    with weights 7, 5, 3, 1; the pixel is flagged and replaced by the plain
    window median as soon as one weighted median deviates from the pixel by
    more than scale_s * MAD + deltas[k], where MAD is the median absolute
    deviation about the window median.
    """
    f = as_image(f)
    cfg = cfg or AcwmfConfig()
    m, n = f.shape
    out = f.copy()
    mask = np.ones(f.shape, dtype=np.uint8)
    for i in range(m):
        for j in range(n):
            win = _window(f, i, j, 1).ravel()
            svals = np.sort(win)
            med = _lower_median(svals)
            mad = _lower_median(np.sort(np.abs(win - med)))
            center = f[i, j]
            flagged = False
            for k in range(4):
                weight = 2 * k + 1
                if weight == 1:
                    mk = med
                else:
                    multiset = np.sort(np.concatenate(
                        [win, np.full(weight - 1, center)]))
                    mk = _lower_median(multiset)
                if abs(mk - center) > cfg.scale_s * mad + cfg.deltas[k]:
                    flagged = True
                    break
            if flagged:
                out[i, j] = med
                mask[i, j] = 0
    return out, mask
