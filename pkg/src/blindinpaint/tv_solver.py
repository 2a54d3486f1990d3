"""Inner convex solvers: masked TV inpainting and the TVL1 baseline.

Both use split Bregman with an auxiliary gradient field d and Bregman
variable b.  The quadratic u-subproblem is relaxed by a fixed number of
Gauss-Seidel sweeps in forward lexicographic (row-major) order; that sweep
order is part of the determinism contract, so identical inputs give
bit-identical outputs.  Solves are safeguarded: if the final iterate has a
worse objective than the starting point, the starting point is returned,
which makes the outer alternating loop a strict descent method even with
loose inner tolerances.
"""

import numpy as np
from numba import njit

from .core import InnerConfig, as_image, as_mask, grad, grad_adjoint, seqsum, tv


@njit(cache=True)
def _gs_sweeps(u, rhs, diag0, mu, nsweeps):
    """Gauss-Seidel sweeps for (diag0 + mu * grad^T grad) u = rhs.

    diag0 is the per-pixel zeroth-order diagonal (the mask for inpainting, a
    constant data weight for TVL1).  Neighbors are accumulated in the fixed
    order up, down, left, right.
    """
    m, n = u.shape
    for _ in range(nsweeps):
        for i in range(m):
            for j in range(n):
                acc = rhs[i, j]
                deg = 0.0
                if i > 0:
                    acc += mu * u[i - 1, j]
                    deg += 1.0
                if i < m - 1:
                    acc += mu * u[i + 1, j]
                    deg += 1.0
                if j > 0:
                    acc += mu * u[i, j - 1]
                    deg += 1.0
                if j < n - 1:
                    acc += mu * u[i, j + 1]
                    deg += 1.0
                u[i, j] = acc / (diag0[i, j] + mu * deg)


def _iso_shrink(sx, sy, thresh):
    """Isotropic shrinkage of the field (sx, sy); shrink(0) = 0."""
    mag = np.sqrt(sx * sx + sy * sy)
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(mag > 0.0, np.maximum(mag - thresh, 0.0) / mag, 0.0)
    return factor * sx, factor * sy


def _rel_change(u_new, u_old):
    return float(np.linalg.norm(u_new - u_old) / max(np.linalg.norm(u_old), 1.0))


def inpaint_objective(u, f, lam, lambda1):
    """The masked TV inpainting objective 0.5*sum(lam*(u-f)^2) + lambda1*tv(u)."""
    res = u - f
    return 0.5 * seqsum(lam * res * res) + lambda1 * tv(u)


def tv_inpaint(f, lam, lambda1, inner=None, warm_start=None):
    """Masked TV inpainting by split Bregman.

    Minimizes 0.5 * sum_{lam=1}(u - f)^2 + lambda1 * tv(u).  Returns
    (image, bregman iterations).  With an all-zero mask the objective has no
    data term, so the starting image is returned unchanged with 0 iterations.
    """
    f = as_image(f, "f")
    lam = as_mask(lam, f.shape)
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    inner = inner or InnerConfig()
    mu = inner.resolve_mu(lambda1)

    u0 = as_image(warm_start, "warm_start").copy() if warm_start is not None else f.copy()
    if u0.shape != f.shape:
        raise ValueError("warm_start shape does not match f")
    if int(lam.sum()) == 0:
        return u0, 0

    lamf = lam.astype(np.float64)
    u = u0.copy()
    dx = np.zeros_like(f)
    dy = np.zeros_like(f)
    bx = np.zeros_like(f)
    by = np.zeros_like(f)
    lam_f = lamf * f
    thresh = lambda1 / mu

    iterations = 0
    for _ in range(inner.max_bregman):
        iterations += 1
        rhs = lam_f + mu * grad_adjoint(dx - bx, dy - by)
        u_old = u.copy()
        _gs_sweeps(u, rhs, lamf, mu, inner.gs_sweeps)
        gx, gy = grad(u)
        sx = gx + bx
        sy = gy + by
        dx, dy = _iso_shrink(sx, sy, thresh)
        bx = sx - dx
        by = sy - dy
        if _rel_change(u, u_old) < inner.rel_tol:
            break

    # descent safeguard: never hand back anything worse than the start point
    if inpaint_objective(u, f, lamf, lambda1) > inpaint_objective(u0, f, lamf, lambda1):
        return u0, iterations
    return u, iterations


def tvl1_objective(u, f, lam_tv):
    return seqsum(np.abs(u - f)) + lam_tv * tv(u)


def tvl1_denoise(f, lam_tv, inner=None):
    """TVL1 denoising sum|u - f| + lam_tv * tv(u) by split Bregman.

    Two splittings: w for the l1 data term (weight 2.0) and d for the
    gradient (weight inner.mu, default lam_tv / 2).  Same stopping rule and
    descent safeguard as tv_inpaint.
    """
    f = as_image(f, "f")
    if lam_tv <= 0:
        raise ValueError("lam_tv must be positive")
    inner = inner or InnerConfig()
    mu_d = inner.resolve_mu(lam_tv)
    mu_w = 2.0

    u = f.copy()
    w = np.zeros_like(f)
    bw = np.zeros_like(f)
    dx = np.zeros_like(f)
    dy = np.zeros_like(f)
    bx = np.zeros_like(f)
    by = np.zeros_like(f)
    diag0 = np.full(f.shape, mu_w)
    thresh_d = lam_tv / mu_d
    thresh_w = 1.0 / mu_w

    for _ in range(inner.max_bregman):
        rhs = mu_w * (f + w - bw) + mu_d * grad_adjoint(dx - bx, dy - by)
        u_old = u.copy()
        _gs_sweeps(u, rhs, diag0, mu_d, inner.gs_sweeps)
        t = u - f + bw
        w = np.sign(t) * np.maximum(np.abs(t) - thresh_w, 0.0)
        bw = t - w
        gx, gy = grad(u)
        sx = gx + bx
        sy = gy + by
        dx, dy = _iso_shrink(sx, sy, thresh_d)
        bx = sx - dx
        by = sy - dy
        if _rel_change(u, u_old) < inner.rel_tol:
            break

    if tvl1_objective(u, f, lam_tv) > tvl1_objective(f, f, lam_tv):
        return f.copy()
    return u
