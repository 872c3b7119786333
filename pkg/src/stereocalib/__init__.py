"""Online extrinsic self-calibration of stereo rigs from pixel matches."""

__version__ = "0.1.0"

from .aggregate import GlobalEstimate, aggregate, canonicalize_signs, spherical_mean
from .baseline import solve_epipolar
from .metrics import MetricsReport, ReferenceExtrinsics, evaluate
from .rectification import (
    CorrespondenceSet,
    Extrinsics,
    Intrinsics,
    RectifyingPair,
    extract_extrinsics,
    init_from_prior,
    rectifying_homographies,
)
from .solver import PairEstimate, SolverConfig, solve_single_pair
from .synthetic import SceneConfig, generate, perturb_viewpoint, run_protocol

__all__ = [
    "CorrespondenceSet", "Extrinsics", "GlobalEstimate", "Intrinsics", "MetricsReport",
    "PairEstimate", "RectifyingPair", "ReferenceExtrinsics", "SceneConfig", "SolverConfig",
    "aggregate", "canonicalize_signs", "evaluate", "extract_extrinsics", "generate",
    "init_from_prior", "perturb_viewpoint", "rectifying_homographies", "run_protocol",
    "solve_epipolar", "solve_single_pair", "spherical_mean",
]
