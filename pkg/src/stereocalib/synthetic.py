"""Synthetic stereo scenes with known extrinsics.

Used as the ground-truth oracle for tests and for the ``synth`` command.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import so3
from .errors import InsufficientVisibility
from .rectification import (
    CorrespondenceSet,
    Extrinsics,
    Intrinsics,
    RectifyingPair,
    back_project_many,
    init_from_prior,
    project,
)

DEFAULT_INTRINSICS = Intrinsics(fx=1200.0, fy=1200.0, cx=960.0, cy=600.0)


class Viewpoint(str, Enum):
    MIDDLE = "middle"
    TOP = "top"
    BOTTOM = "bottom"
    LEFT = "left"
    RIGHT = "right"


# top/bottom pitch about the camera x-axis, left/right yaw about the y-axis
_VIEWPOINT_AXES = {
    Viewpoint.TOP: np.array([1.0, 0.0, 0.0]),
    Viewpoint.BOTTOM: np.array([-1.0, 0.0, 0.0]),
    Viewpoint.LEFT: np.array([0.0, -1.0, 0.0]),
    Viewpoint.RIGHT: np.array([0.0, 1.0, 0.0]),
}


@dataclass(frozen=True)
class SceneConfig:
    n_points: int = 50
    depth_range: tuple = (2.0, 20.0)
    image_size: tuple = (1920, 1200)
    intrinsics_left: Intrinsics = DEFAULT_INTRINSICS
    intrinsics_right: Intrinsics = DEFAULT_INTRINSICS
    pixel_noise_sigma: float = 0.0
    outlier_fraction: float = 0.0
    seed: int = 0
    # metres; only the direction of t is observable, this sets disparity scale
    baseline: float = 1.0

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if not 0 < self.depth_range[0] < self.depth_range[1]:
            raise ValueError("depth_range must satisfy 0 < min < max")
        if not 0 <= self.outlier_fraction < 1:
            raise ValueError("outlier_fraction must lie in [0, 1)")
        if self.pixel_noise_sigma < 0:
            raise ValueError("pixel_noise_sigma must be >= 0")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    extrinsics: Extrinsics
    rectifying: RectifyingPair
    points: np.ndarray
    outliers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def perturb_viewpoint(base: Extrinsics, direction, angle: float) -> Extrinsics:
    """Rotate the rig by ``angle`` about the axis assigned to ``direction``.

    The same rotation is applied to the translation direction.
    """
    direction = Viewpoint(direction)
    if not 0 <= angle <= math.pi / 4:
        raise ValueError("angle must lie in [0, pi/4]")
    if direction is Viewpoint.MIDDLE:
        return base
    Q = so3.exp_so3(angle * _VIEWPOINT_AXES[direction])
    return Extrinsics(Q @ base.rotation, Q @ base.translation)


def generate(config: SceneConfig, truth: Extrinsics, rng=None):
    """Sample a scene and its (noisy) correspondences.

    Returns ``(GroundTruth, CorrespondenceSet)``. Deterministic for a given
    ``config.seed`` unless an explicit ``rng`` is supplied.
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    rectifying = init_from_prior(truth)
    width, height = config.image_size
    K_l, K_r = config.intrinsics_left, config.intrinsics_right
    R, t = truth.rotation, truth.translation * config.baseline

    n = config.n_points
    points = np.empty((0, 3))
    attempts = 0
    batch = max(2 * n, 64)
    while len(points) < n and attempts < 100 * n:
        m = min(batch, 100 * n - attempts)
        attempts += m
        pix = rng.uniform([0.0, 0.0], [width, height], size=(m, 2))
        depth = rng.uniform(*config.depth_range, size=m)
        cand = back_project_many(K_l, pix) * depth[:, None]
        in_right = cand @ R.T + t
        ok = in_right[:, 2] > 0
        proj = project(K_r, np.where(ok[:, None], in_right, 1.0))
        ok &= (proj[:, 0] >= 0) & (proj[:, 0] < width) & (proj[:, 1] >= 0) & (proj[:, 1] < height)
        points = np.vstack([points, cand[ok]])
    if len(points) < n:
        raise InsufficientVisibility(
            f"found {len(points)} co-visible points of {n} after {attempts} attempts")
    points = points[:n]

    left = project(K_l, points)
    right = project(K_r, points @ R.T + t)
    if config.pixel_noise_sigma > 0:
        left = left + rng.normal(0.0, config.pixel_noise_sigma, size=left.shape)
        right = right + rng.normal(0.0, config.pixel_noise_sigma, size=right.shape)
    outliers = np.zeros(n, dtype=bool)
    n_out = int(round(config.outlier_fraction * n))
    if n_out:
        idx = rng.choice(n, size=n_out, replace=False)
        outliers[idx] = True
        right[idx] = rng.uniform([0.0, 0.0], [width, height], size=(n_out, 2))

    gt = GroundTruth(truth, rectifying, points, outliers)
    return gt, CorrespondenceSet(left, right, K_l, K_r)


def run_protocol(config: SceneConfig, base: Extrinsics, M: int):
    """``M`` independent scenes sharing one ground truth.

    Scene ``k`` draws from its own stream seeded by ``(config.seed, k)``;
    ``M == 1`` is equivalent to :func:`generate` with ``config.seed``.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if M == 1:
        gt, obs = generate(config, base)
        return [obs], gt
    scenes = []
    gt = None
    for k in range(M):
        gt_k, obs = generate(config, base, rng=np.random.default_rng([config.seed, k]))
        if gt is None:
            gt = gt_k
        scenes.append(obs)
    return scenes, gt
