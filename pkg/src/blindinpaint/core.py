"""Domain types and the energies every solver in this package minimizes.

Images are plain 2-D float64 arrays on a nominal [0, 255] dynamic range
(values may transiently leave the range after Gaussian corruption).  Masks
are 2-D uint8 arrays of 0/1 bits, 1 marking a pixel trusted as uncorrupted
and 0 a pixel treated as damaged.

All sums are accumulated sequentially in row-major order in double precision
(no pairwise reduction), so energies are bit-reproducible for fixed inputs.
"""

from dataclasses import dataclass, field

import numpy as np

D_MIN = 0.0
D_MAX = 255.0


def as_image(a, name="image"):
    """Validate and return a 2-D finite float64 image array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array with positive shape, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_mask(m, shape=None, name="mask"):
    """Validate and return a 2-D uint8 mask of 0/1 bits."""
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    else:
        vals = np.unique(arr)
        if not np.all(np.isin(vals, (0, 1))):
            raise ValueError(f"{name} entries must all be 0 or 1")
        arr = arr.astype(np.uint8)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} shape {arr.shape} does not match image shape {tuple(shape)}")
    return arr


def _check_same_shape(a, b, what="images"):
    if a.shape != b.shape:
        raise ValueError(f"{what} have mismatched shapes {a.shape} vs {b.shape}")


def seqsum(a):
    """Strict row-major sequential sum in double precision.

    numpy's sum() uses pairwise reduction; cumsum accumulates one element at
    a time in order, which pins the floating-point result to the row-major
    accumulation order.
    """
    flat = np.ascontiguousarray(a, dtype=np.float64).ravel()
    if flat.size == 0:
        return 0.0
    return float(np.cumsum(flat)[-1])


def grad(u):
    """Forward-difference gradient (gx, gy) with Neumann boundary.

    gx[i, j] = u[i, j+1] - u[i, j] (0 on the last column);
    gy[i, j] = u[i+1, j] - u[i, j] (0 on the last row).
    """
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[:, :-1] = u[:, 1:] - u[:, :-1]
    gy[:-1, :] = u[1:, :] - u[:-1, :]
    return gx, gy


def grad_adjoint(qx, qy):
    """Adjoint of :func:`grad` (a negative divergence)."""
    out = np.zeros_like(qx)
    out[:, :-1] -= qx[:, :-1]
    out[:, 1:] += qx[:, :-1]
    out[:-1, :] -= qy[:-1, :]
    out[1:, :] += qy[:-1, :]
    return out


def tv(u):
    """Isotropic discrete total variation of an image.

    Sum over pixels of sqrt(gx^2 + gy^2) with forward differences and zero
    (Neumann) differences on the last row and column.
    """
    u = as_image(u)
    gx, gy = grad(u)
    return seqsum(np.sqrt(gx * gx + gy * gy))


def robust_penalty(x, lambda2, kind):
    """Pointwise robust data-fidelity envelope of a residual.

    kind "r0": min(x^2, 2*lambda2), the hard-threshold envelope.
    kind "r1": x^2 where |x| <= lambda2, else 2*lambda2*|x| - lambda2^2
    (the soft-threshold / Huber-like envelope).

    Accepts scalars or arrays.
    """
    if lambda2 <= 0:
        raise ValueError("lambda2 must be positive")
    x = np.asarray(x, dtype=np.float64)
    if kind == "r0":
        out = np.minimum(x * x, 2.0 * lambda2)
    elif kind == "r1":
        ax = np.abs(x)
        out = np.where(ax <= lambda2, x * x, 2.0 * lambda2 * ax - lambda2 * lambda2)
    else:
        raise ValueError(f"kind must be 'r0' or 'r1', got {kind!r}")
    return float(out) if out.ndim == 0 else out


def f1_energy(u, lam, f, lambda1, lambda2):
    """Penalty-form joint energy of an image/mask pair.

    0.5 * sum(lam * (u - f)^2) + lambda1 * tv(u) + lambda2 * sum(1 - lam).
    """
    u = as_image(u, "u")
    f = as_image(f, "f")
    _check_same_shape(u, f)
    lam = as_mask(lam, u.shape)
    res = u - f
    fidelity = 0.5 * seqsum(lam * res * res)
    return fidelity + lambda1 * tv(u) + lambda2 * float(lam.size - int(lam.sum()))


def f2_energy(u, lam, f, lambda1, L):
    """Constraint-form joint energy; +inf when the mask exceeds its budget.

    0.5 * sum(lam * (u - f)^2) + lambda1 * tv(u) when the mask has at most L
    zero bits, numpy.inf otherwise.
    """
    u = as_image(u, "u")
    f = as_image(f, "f")
    _check_same_shape(u, f)
    lam = as_mask(lam, u.shape)
    if L < 0:
        raise ValueError("L must be nonnegative")
    zeros = lam.size - int(lam.sum())
    if zeros > L:
        return np.inf
    res = u - f
    return 0.5 * seqsum(lam * res * res) + lambda1 * tv(u)


def e0_penalty(u, f, lambda1, lambda2):
    """Mask-eliminated penalty energy 0.5 * sum(R0(u - f)) + lambda1 * tv(u).

    Equals the minimum of :func:`f1_energy` over all binary masks.
    """
    u = as_image(u, "u")
    f = as_image(f, "f")
    _check_same_shape(u, f)
    res = u - f
    return 0.5 * seqsum(np.minimum(res * res, 2.0 * lambda2)) + lambda1 * tv(u)


@dataclass
class InnerConfig:
    """Split-Bregman inner-solver knobs.

    mu is the quadratic splitting weight; None means "use lambda1 / 2",
    resolved when a solve starts.  (Larger mu stalls the inpainting solve
    well short of the minimizer at these tolerances.)
    """

    mu: float | None = None
    max_bregman: int = 500
    gs_sweeps: int = 2
    rel_tol: float = 1e-5

    def __post_init__(self):
        if self.mu is not None and self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.max_bregman < 1:
            raise ValueError("max_bregman must be positive")
        if self.gs_sweeps < 1:
            raise ValueError("gs_sweeps must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")

    def resolve_mu(self, lambda1):
        return 0.5 * lambda1 if self.mu is None else self.mu


@dataclass
class SolverConfig:
    """Outer-loop configuration for the alternating solvers.

    Exactly one of lambda2 (penalty form) or L (constraint form) is used,
    depending on which solver is called.  epsilon is a per-pixel stop
    tolerance: the loop stops once the energy decrease per outer iteration
    drops to epsilon * rows * cols or below.  tie is one of "keep", "drop",
    "rand"; "rand" perturbs the threshold statistic by tau times a seeded
    uniform field (fixed across outer iterations).
    """

    lambda1: float = 1.0
    lambda2: float | None = None
    L: int | None = None
    epsilon: float = 1e-4
    max_outer: int = 50
    inner: InnerConfig = field(default_factory=InnerConfig)
    tie: str = "keep"
    tau: float = 1e-8
    tie_seed: int = 0

    def __post_init__(self):
        if self.lambda1 <= 0:
            raise ValueError("lambda1 must be positive")
        if self.lambda2 is not None and self.lambda2 <= 0:
            raise ValueError("lambda2 must be positive")
        if self.L is not None and self.L < 0:
            raise ValueError("L must be nonnegative")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.max_outer < 1:
            raise ValueError("max_outer must be positive")
        if self.tie not in ("keep", "drop", "rand"):
            raise ValueError(f"tie must be keep, drop or rand, got {self.tie!r}")
