"""Blind inpainting of impulse and mixed Gaussian-impulse noise.

Jointly estimates the set of damaged pixels and the restored image by
alternating a masked TV inpainting solve with an exact one-step mask
update.  Two coupled energies are supported: a penalty form that
thresholds per-pixel residuals against a fixed weight, and a constraint
form (adaptive outlier pursuit) that bounds the number of outliers and
re-selects them every outer iteration.  Classical detectors (adaptive
median filter, adaptive center-weighted median filter), a TVL1 baseline,
metrics, PGM file IO and a batch experiment harness round out the toolkit.
"""

from .core import (D_MAX, D_MIN, InnerConfig, SolverConfig, e0_penalty,
                   f1_energy, f2_energy, robust_penalty, tv)
from .noise import (NllHistogram, NoiseSpec, add_gaussian, add_impulse,
                    corrupt, simulate_mixed_nll)
from .filters import AcwmfConfig, AmfConfig, acwmf, amf
from .tv_solver import tv_inpaint, tvl1_denoise
from .blind import (CoordwiseReport, RestoreResult, TraceEntry, solve_aop,
                    solve_penalty, two_stage, update_mask_constraint,
                    update_mask_penalty, verify_coordinatewise_min)
from .metrics import DetectionStats, detection_stats, psnr
from .pgm import (PgmParseError, read_mask_pgm, read_pgm, write_mask_pgm,
                  write_mask_png, write_pgm)
from .phantoms import shapes_phantom
from .experiments import parse_config, run_experiment
from .rng import Xoshiro256pp, mix_seed

__version__ = "0.1.0"

__all__ = [
    "D_MAX", "D_MIN", "InnerConfig", "SolverConfig", "tv", "robust_penalty",
    "f1_energy", "f2_energy", "e0_penalty",
    "NoiseSpec", "NllHistogram", "add_gaussian", "add_impulse", "corrupt",
    "simulate_mixed_nll",
    "AmfConfig", "AcwmfConfig", "amf", "acwmf",
    "tv_inpaint", "tvl1_denoise",
    "update_mask_penalty", "update_mask_constraint", "solve_penalty",
    "solve_aop", "two_stage", "verify_coordinatewise_min",
    "RestoreResult", "TraceEntry", "CoordwiseReport",
    "psnr", "detection_stats", "DetectionStats",
    "read_pgm", "write_pgm", "write_mask_pgm", "write_mask_png",
    "read_mask_pgm", "PgmParseError",
    "shapes_phantom", "run_experiment", "parse_config",
    "Xoshiro256pp", "mix_seed",
]
