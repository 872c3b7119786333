"""Rotation kernel: skew operator, exponential/logarithm maps, axis-angle.

Rotation vectors are ``(3,)`` float arrays whose direction is the axis and
whose norm is the angle in radians. Rotation matrices are ``(3, 3)`` arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SMALL_ANGLE = 1e-8
# Above this angle the axis comes from the symmetric part of R.
NEAR_PI = math.pi - 1e-3
FALLBACK_AXIS = np.array([0.0, 0.0, 1.0])


def hat(v):
    """Return the skew-symmetric matrix ``S`` with ``S @ w == cross(v, w)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(S):
    """Inverse of :func:`hat` (reads the antisymmetric entries only)."""
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def exp_so3(theta):
    """Rodrigues formula, switching to its Taylor expansion for tiny angles."""
    theta = np.asarray(theta, dtype=float)
    angle = math.sqrt(float(theta @ theta))
    K = hat(theta)
    if angle < SMALL_ANGLE:
        a = 1.0 - angle * angle / 6.0
        b = 0.5 - angle * angle / 24.0
    else:
        a = math.sin(angle) / angle
        b = (1.0 - math.cos(angle)) / (angle * angle)
    return np.eye(3) + a * K + b * (K @ K)


def _angle(R):
    # atan2 keeps full precision at both ends of [0, pi], unlike arccos.
    c = 0.5 * (np.trace(R) - 1.0)
    s = 0.5 * np.linalg.norm(vee(R - R.T))
    return math.atan2(s, c)


def _canonical_sign(axis):
    k = int(np.argmax(np.abs(axis)))
    return axis if axis[k] >= 0 else -axis


def _axis_near_pi(R, angle):
    sym = 0.5 * (R + R.T)
    c = math.cos(angle)
    outer = (sym - c * np.eye(3)) / (1.0 - c)
    k = int(np.argmax(np.diag(outer)))
    axis = outer[:, k] / math.sqrt(max(outer[k, k], 0.0))
    axis /= np.linalg.norm(axis)
    anti = vee(R - R.T)
    if np.linalg.norm(anti) > 1e-12:
        return axis if anti @ axis >= 0 else -axis
    return _canonical_sign(axis)


def log_so3(R):
    """Rotation vector of ``R`` with norm in ``[0, pi]``.

    At exactly pi the axis sign is chosen so that its largest-magnitude
    component is positive.
    """
    R = np.asarray(R, dtype=float)
    angle = _angle(R)
    if angle < SMALL_ANGLE:
        # theta ~ vee(R - R^T)/2 with a relative error of angle^2/6
        return 0.5 * vee(R - R.T)
    if angle > NEAR_PI:
        return angle * _axis_near_pi(R, angle)
    return angle / (2.0 * math.sin(angle)) * vee(R - R.T)


@dataclass(frozen=True)
class AxisAngle:
    axis: np.ndarray
    angle: float
    degenerate: bool = False

    @property
    def theta(self):
        return self.angle * self.axis


def axis_angle(R) -> AxisAngle:
    """Decompose ``R`` into a unit axis and an angle in ``[0, pi]``.

    Below the small-angle threshold the axis is undefined: the fallback
    ``[0, 0, 1]`` is returned with ``degenerate=True``.
    """
    R = np.asarray(R, dtype=float)
    angle = _angle(R)
    if angle < SMALL_ANGLE:
        return AxisAngle(FALLBACK_AXIS.copy(), angle, True)
    if angle > NEAR_PI:
        return AxisAngle(_axis_near_pi(R, angle), angle)
    axis = vee(R - R.T) / (2.0 * math.sin(angle))
    return AxisAngle(axis / np.linalg.norm(axis), angle)


def is_rotation(R, tol=1e-9):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    return bool(
        np.max(np.abs(R @ R.T - np.eye(3))) <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def orthogonality_defect(R):
    return float(np.max(np.abs(R @ R.T - np.eye(3))))
