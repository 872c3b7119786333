"""Accuracy and robustness metrics against a reference calibration."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from . import so3


@dataclass(frozen=True, eq=False)
class ReferenceExtrinsics:
    rotation: np.ndarray
    translation: np.ndarray
    theta: np.ndarray

    @classmethod
    def from_extrinsics(cls, ext):
        return cls(ext.rotation, ext.translation, so3.log_so3(ext.rotation))


@dataclass(frozen=True)
class MetricsReport:
    e_t: float
    e_theta: float
    sigma_t: float
    sigma_theta: float
    M: int

    def to_dict(self):
        return asdict(self)


def _angles(a, b):
    # atan2 form of arccos(a.b): exact at 0 where arccos loses ~1e-8
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    return np.arctan2(np.linalg.norm(np.cross(a, b), axis=-1), np.sum(a * b, axis=-1))


def angular_error_t(reference, estimate) -> float:
    """Angle in radians between the reference and estimated translation directions."""
    return float(_angles(reference.translation, estimate.translation)[0])


def rotation_error_theta(reference, estimate) -> float:
    return float(np.linalg.norm(np.asarray(estimate.theta) - np.asarray(reference.theta)))


def sigma_t(reference, estimates) -> float:
    """Root mean square of the per-pair translation angular errors."""
    t = np.array([e.translation for e in estimates])
    errs = _angles(t, reference.translation)
    return float(np.sqrt(np.mean(errs ** 2)))


def sigma_theta(reference, estimates) -> float:
    th = np.array([e.theta for e in estimates])
    return float(np.sqrt(np.mean(np.sum((th - reference.theta) ** 2, axis=1))))


def evaluate(reference, global_estimate, estimates) -> MetricsReport:
    estimates = list(estimates)
    return MetricsReport(
        e_t=angular_error_t(reference, global_estimate),
        e_theta=rotation_error_theta(reference, global_estimate),
        sigma_t=sigma_t(reference, estimates),
        sigma_theta=sigma_theta(reference, estimates),
        M=len(estimates),
    )
