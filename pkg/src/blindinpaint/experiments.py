"""Batch harness: corrupt / restore / evaluate over a parameter grid.

Config files are flat ``key = value`` text; ``#`` starts a comment and
comma-separated values make a list.  Recognized keys (defaults in
parentheses):

    images   = shapes            image names; "shapes" is the built-in
                                 phantom, anything else is a PGM path
    size     = 128               phantom size / center-crop size
    sigma    = 0                 Gaussian std grid
    level    = 0.3               impulse level grid
    impulse  = sp                sp | rv | none
    methods  = noisy, aop        noisy | amf | acwmf | tvl1 | two-stage |
                                 aop | penalty
    seeds    = 1                 one repetition per seed
    lambda1  = 1.0               TV weight for inpainting-based methods
    lambda2  =                   penalty threshold (method "penalty")
    tvl1_lambda = 1.0            TV weight for the TVL1 baseline
    init     = auto              amf | acwmf | ones | auto (by impulse kind)
    epsilon  (1e-4), max_outer (50), tie (keep), tau (1e-8)
    mu, rel_tol, max_bregman, gs_sweeps   inner-solver overrides
    clip     = false             clamp Gaussian output to [0, 255]
    quantize = false             quantize restorations to 8 bits before PSNR
    out      =                   rows CSV path (the CLI flag overrides this)

Each (image, sigma, level, method, seed) cell corrupts with a seed derived
by mix_seed(seed, image index, sigma index, level index), restores, and
emits one row.  Rows are sorted before writing, so output order never
depends on evaluation order.  The aggregate table (mean over seeds) omits
wall time and is byte-reproducible; rows carry a wall_time_s column that
naturally varies between runs.
"""

import io
import math

import numpy as np

from .core import InnerConfig, SolverConfig
from .filters import acwmf, amf
from .metrics import detection_stats, psnr
from .noise import NoiseSpec, corrupt
from .pgm import quantize, read_pgm
from .phantoms import shapes_phantom
from .rng import mix_seed
from .blind import solve_aop, solve_penalty, two_stage
from .tv_solver import tvl1_denoise

KNOWN_METHODS = ("noisy", "amf", "acwmf", "tvl1", "two-stage", "aop", "penalty")

ROW_FIELDS = ("image", "sigma", "level", "impulse", "method", "seed", "psnr",
              "recall", "precision", "outer_iterations", "final_energy",
              "wall_time_s")
AGG_FIELDS = ("image", "sigma", "level", "impulse", "method", "n_seeds",
              "psnr_mean", "recall_mean", "precision_mean",
              "outer_iterations_mean")


def parse_config(text):
    """Parse flat key = value config text into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_config(fh.read())


def _split_list(value):
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _get_float(cfg, key, default=None):
    v = cfg.get(key, "")
    if v == "":
        return default
    return float(v)

def _get_int(cfg, key, default=None):
    v = cfg.get(key, "")
    if v == "":
        return default
    return int(v)

def _get_bool(cfg, key, default=False):
    v = str(cfg.get(key, "")).lower()
    if v == "":
        return default
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"config key {key}: expected a boolean, got {v!r}")


def _center_crop(img, size):
    m, n = img.shape
    if m < size or n < size:
        raise ValueError(f"image {img.shape} smaller than crop size {size}")
    i0 = (m - size) // 2
    j0 = (n - size) // 2
    return img[i0:i0 + size, j0:j0 + size]


def _load_image(name, size):
    if name == "shapes":
        return shapes_phantom(size)
    return _center_crop(read_pgm(name), size)


def _impulse_kind(tag):
    return {"sp": "salt_pepper", "rv": "random_valued", "none": "none"}[tag]


def _init_mask(f, init, impulse_tag):
    if init == "auto":
        init = "amf" if impulse_tag == "sp" else "acwmf"
    if init == "amf":
        return amf(f)[1], "amf"
    if init == "acwmf":
        return acwmf(f)[1], "acwmf"
    if init == "ones":
        return np.ones(f.shape, dtype=np.uint8), "ones"
    raise ValueError(f"unknown init {init!r}")


def _restore(method, f, level, cfg, inner, impulse_tag):
    """Run one method; returns (u_hat, mask_est, outer_iters, final_energy)."""
    import time
    npix = f.size
    if method == "noisy":
        return f.copy(), np.ones(f.shape, np.uint8), 0, None
    if method == "amf":
        out, mask = amf(f)
        return out, mask, 0, None
    if method == "acwmf":
        out, mask = acwmf(f)
        return out, mask, 0, None
    if method == "tvl1":
        u = tvl1_denoise(f, cfg["tvl1_lambda"], inner)
        return u, np.ones(f.shape, np.uint8), 0, None
    if method == "two-stage":
        detector = cfg["init"] if cfg["init"] in ("amf", "acwmf") else (
            "amf" if impulse_tag == "sp" else "acwmf")
        res = two_stage(f, detector, cfg["lambda1"], inner)
        return res.u_hat, res.mask_hat, res.outer_iterations, res.trace[-1].energy
    mask0, _ = _init_mask(f, cfg["init"], impulse_tag)
    if method == "aop":
        L = cfg["L"] if cfg["L"] is not None else int(math.floor(level * npix + 0.5))
        scfg = SolverConfig(lambda1=cfg["lambda1"], L=L, epsilon=cfg["epsilon"],
                            max_outer=cfg["max_outer"], inner=inner,
                            tie=cfg["tie"], tau=cfg["tau"], tie_seed=cfg["tie_seed"])
        res = solve_aop(f, scfg, mask0)
    elif method == "penalty":
        if cfg["lambda2"] is None:
            raise ValueError("method 'penalty' needs lambda2 in the config")
        scfg = SolverConfig(lambda1=cfg["lambda1"], lambda2=cfg["lambda2"],
                            epsilon=cfg["epsilon"], max_outer=cfg["max_outer"],
                            inner=inner, tie=cfg["tie"], tau=cfg["tau"],
                            tie_seed=cfg["tie_seed"])
        res = solve_penalty(f, scfg, mask0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return res.u_hat, res.mask_hat, res.outer_iterations, res.trace[-1].energy


def run_experiment(config):
    """Run the grid described by a config dict (strings) or file path.

    Returns (rows, aggregates): lists of dicts keyed by ROW_FIELDS and
    AGG_FIELDS, already sorted.
    """
    import time
    if isinstance(config, str):
        config = load_config(config)
    images = _split_list(config.get("images", "shapes"))
    size = _get_int(config, "size", 128)
    sigmas = [float(s) for s in _split_list(config.get("sigma", "0"))]
    levels = [float(s) for s in _split_list(config.get("level", "0.3"))]
    impulse_tag = config.get("impulse", "sp")
    if impulse_tag not in ("sp", "rv", "none"):
        raise ValueError(f"impulse must be sp, rv or none, got {impulse_tag!r}")
    methods = _split_list(config.get("methods", ""))
    for m in methods:
        if m not in KNOWN_METHODS:
            raise ValueError(f"unknown method {m!r}; known: {KNOWN_METHODS}")
    seeds = [int(s) for s in _split_list(config.get("seeds", "1"))]

    mcfg = {
        "lambda1": _get_float(config, "lambda1", 1.0),
        "lambda2": _get_float(config, "lambda2", None),
        "tvl1_lambda": _get_float(config, "tvl1_lambda", 1.0),
        "init": config.get("init", "auto"),
        "epsilon": _get_float(config, "epsilon", 1e-4),
        "max_outer": _get_int(config, "max_outer", 50),
        "tie": config.get("tie", "keep"),
        "tau": _get_float(config, "tau", 1e-8),
        "tie_seed": _get_int(config, "tie_seed", 0),
        "L": _get_int(config, "L", None),
    }
    inner = InnerConfig(mu=_get_float(config, "mu", None),
                        max_bregman=_get_int(config, "max_bregman", 500),
                        gs_sweeps=_get_int(config, "gs_sweeps", 2),
                        rel_tol=_get_float(config, "rel_tol", 1e-5))
    clip = _get_bool(config, "clip", False)
    do_quantize = _get_bool(config, "quantize", False)

    rows = []
    for img_i, name in enumerate(images):
        clean = _load_image(name, size)
        for sig_i, sigma in enumerate(sigmas):
            for lvl_i, level in enumerate(levels):
                for seed in seeds:
                    cell_seed = mix_seed(seed, img_i, sig_i, lvl_i)
                    spec = NoiseSpec(sigma=sigma, impulse_kind=_impulse_kind(impulse_tag),
                                     level_s=level, seed=cell_seed, clip=clip)
                    f, mask_true = corrupt(clean, spec)
                    for method in methods:
                        t0 = time.perf_counter()
                        u_hat, mask_est, outer, energy = _restore(
                            method, f, level, mcfg, inner, impulse_tag)
                        wall = time.perf_counter() - t0
                        if do_quantize:
                            p = psnr(quantize(u_hat).astype(float),
                                     quantize(clean).astype(float))
                        else:
                            p = psnr(u_hat, clean)
                        st = detection_stats(mask_est, mask_true)
                        rows.append({
                            "image": name, "sigma": sigma, "level": level,
                            "impulse": impulse_tag, "method": method, "seed": seed,
                            "psnr": p, "recall": st.recall, "precision": st.precision,
                            "outer_iterations": outer,
                            "final_energy": energy, "wall_time_s": wall,
                        })
    rows.sort(key=lambda r: (r["image"], r["sigma"], r["level"], r["method"], r["seed"]))

    aggregates = []
    groups = {}
    for r in rows:
        key = (r["image"], r["sigma"], r["level"], r["impulse"], r["method"])
        groups.setdefault(key, []).append(r)
    for key in sorted(groups):
        grp = groups[key]
        n = len(grp)
        aggregates.append({
            "image": key[0], "sigma": key[1], "level": key[2],
            "impulse": key[3], "method": key[4], "n_seeds": n,
            "psnr_mean": sum(g["psnr"] for g in grp) / n,
            "recall_mean": sum(g["recall"] for g in grp) / n,
            "precision_mean": sum(g["precision"] for g in grp) / n,
            "outer_iterations_mean": sum(g["outer_iterations"] for g in grp) / n,
        })
    return rows, aggregates


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows, fields):
    """Render result dicts as CSV text (floats fixed to 6 decimals)."""
    buf = io.StringIO()
    buf.write(",".join(fields) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[k]) for k in fields) + "\n")
    return buf.getvalue()


def write_results(rows, aggregates, out_path):
    """Write rows to out_path and aggregates next to it (suffix _mean)."""
    with open(out_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(rows_to_csv(rows, ROW_FIELDS))
    if out_path.endswith(".csv"):
        agg_path = out_path[:-4] + "_mean.csv"
    else:
        agg_path = out_path + "_mean"
    with open(agg_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(rows_to_csv(aggregates, AGG_FIELDS))
    return agg_path
