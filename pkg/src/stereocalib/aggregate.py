"""Combine per-pair estimates into one rig estimate.

Translation directions and rotation axes are averaged on the unit sphere
(normalized sum, the maximizer of summed cosine similarity); the rotation
angle is the median of the per-pair angles.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import so3
from .errors import DegenerateSum

log = logging.getLogger(__name__)

SUM_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class GlobalEstimate:
    rotation: np.ndarray
    translation: np.ndarray
    theta: np.ndarray
    axis: np.ndarray
    angle: float
    contributing_pairs: int
    axes_valid: bool = True


def spherical_mean(vectors) -> np.ndarray:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if len(vectors) == 0:
        raise ValueError("no vectors to average")
    total = vectors.sum(axis=0)
    norm = np.linalg.norm(total)
    if norm <= SUM_EPS:
        raise DegenerateSum(f"vector sum has norm {norm:.3g}")
    return total / norm


def _align_majority(vectors):
    # flip each vector into the hemisphere of the first, then undo if the
    # first was itself the odd one out; ties keep the first's hemisphere
    signs = np.where(vectors @ vectors[0] >= 0, 1.0, -1.0)
    if (signs < 0).sum() > (signs > 0).sum():
        signs = -signs
    return signs


def canonicalize_signs(estimates):
    """Make translation directions share a hemisphere.

    The hemisphere is the one holding the majority of the inputs, so the
    result does not depend on ordering. Rotation axes are only flipped for
    estimates at an angle of pi, where ``v`` and ``-v`` describe the same
    rotation; anywhere else the axis sign is meaningful and kept.
    """
    estimates = list(estimates)
    if not estimates:
        raise ValueError("no estimates")
    t = np.array([e.translation for e in estimates])
    t_signs = _align_majority(t)

    valid = [i for i, e in enumerate(estimates) if not e.axis_degenerate]
    axis_signs = np.ones(len(estimates))
    if valid:
        axes = np.array([estimates[i].axis for i in valid])
        ref = spherical_mean(axes) if np.linalg.norm(axes.sum(0)) > SUM_EPS else axes[0]
        for i in valid:
            e = estimates[i]
            if e.angle > np.pi - 1e-9 and e.axis @ ref < 0:
                axis_signs[i] = -1.0

    out = []
    for e, st, sa in zip(estimates, t_signs, axis_signs):
        if st > 0 and sa > 0:
            out.append(e)
            continue
        axis = sa * e.axis
        out.append(replace(e, translation=st * e.translation, axis=axis,
                           theta=e.angle * axis if sa < 0 else e.theta))
    return out


def aggregate(estimates) -> GlobalEstimate:
    estimates = canonicalize_signs(estimates)
    t_star = spherical_mean([e.translation for e in estimates])
    s_star = float(np.median([e.angle for e in estimates]))
    axes = [e.axis for e in estimates if not e.axis_degenerate]
    if not axes:
        log.warning("all %d rotations are below the axis threshold; using identity",
                    len(estimates))
        return GlobalEstimate(np.eye(3), t_star, np.zeros(3), so3.FALLBACK_AXIS.copy(),
                              0.0, len(estimates), axes_valid=False)
    v_star = spherical_mean(axes)
    theta = s_star * v_star
    return GlobalEstimate(so3.exp_so3(theta), t_star, theta, v_star, s_star, len(estimates))
