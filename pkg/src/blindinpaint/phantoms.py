"""Synthetic test images, so experiments run without third-party assets."""

import numpy as np


def shapes_phantom(size=128):
    """Piecewise-smooth geometric test image of the given square size.

    Rectangles, a disk, a triangle and a soft ramp on a mid-gray background.
    Values stay inside [30, 220] so impulse extremes (0/255) never coincide
    with clean pixels, which keeps detector ground truth unambiguous.
    """
    if size < 16:
        raise ValueError("size must be at least 16")
    n = size
    img = np.full((n, n), 90.0)
    yy, xx = np.mgrid[0:n, 0:n]

    # soft diagonal ramp over the background
    img += 30.0 * (xx + yy) / (2.0 * (n - 1))

    # bright rectangle, upper left
    img[n // 8:n // 3, n // 10:n // 2] = 200.0
    # dark rectangle overlapping it
    img[n // 5:n // 2, n // 3:n // 2 + n // 8] = 45.0
    # disk, lower right
    cy, cx, r = 0.68 * n, 0.66 * n, 0.18 * n
    img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = 165.0
    # small bright disk inside it
    r2 = 0.07 * n
    img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r2 * r2] = 220.0
    # triangle, lower left
    tri = (yy > 0.6 * n) & (xx < 0.4 * n) & (yy - 0.6 * n > 1.2 * xx)
    img[tri] = 130.0
    # thin horizontal bar
    img[int(0.55 * n):int(0.58 * n), int(0.15 * n):int(0.9 * n)] = 30.0

    return np.clip(img, 30.0, 220.0)
