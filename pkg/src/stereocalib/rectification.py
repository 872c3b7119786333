"""Rectification geometry for a two-camera rig.

Convention: a point ``p_l`` in the left camera frame maps to the right frame
as ``p_r = R @ p_l + t`` with ``|t| = 1``. Rectifying rotations ``R_left``,
``R_right`` rotate both frames so that ``R_left @ p_l = R_right @ p_r + e_x``;
in that configuration corresponding points share the same image row.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DegenerateBaseline, PointAtHorizon

HORIZON_EPS = 1e-12


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    skew: float = 0.0

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got {self.fx}, {self.fy}")

    @property
    def K(self):
        return np.array(
            [[self.fx, self.skew, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @property
    def K_inv(self):
        return np.linalg.inv(self.K)

    def to_dict(self):
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy, "skew": self.skew}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["fx"]), float(d["fy"]), float(d["cx"]), float(d["cy"]),
                   float(d.get("skew", 0.0)))


class PixelPoint(NamedTuple):
    u: float
    v: float


class CorrespondencePair(NamedTuple):
    left: PixelPoint
    right: PixelPoint


@dataclass(frozen=True, eq=False)
class CorrespondenceSet:
    """Matched pixels, stored as two ``(N, 2)`` arrays, plus both intrinsics."""

    left: np.ndarray
    right: np.ndarray
    intrinsics_left: Intrinsics
    intrinsics_right: Intrinsics

    def __post_init__(self):
        left = np.array(self.left, dtype=float).reshape(-1, 2)
        right = np.array(self.right, dtype=float).reshape(-1, 2)
        if left.shape != right.shape:
            raise ValueError("left and right point arrays differ in length")
        if len(left) == 0:
            raise ValueError("correspondence set is empty")
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise ValueError("correspondences must be finite")
        left.flags.writeable = False
        right.flags.writeable = False
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_pairs(cls, pairs, intrinsics_left, intrinsics_right):
        pairs = list(pairs)
        left = [tuple(p[0]) for p in pairs]
        right = [tuple(p[1]) for p in pairs]
        return cls(np.array(left), np.array(right), intrinsics_left, intrinsics_right)

    def __len__(self):
        return len(self.left)

    def __getitem__(self, i) -> CorrespondencePair:
        return CorrespondencePair(PixelPoint(*self.left[i]), PixelPoint(*self.right[i]))

    def __iter__(self) -> Iterator[CorrespondencePair]:
        return (self[i] for i in range(len(self)))

    def subset(self, index):
        return CorrespondenceSet(self.left[index], self.right[index],
                                 self.intrinsics_left, self.intrinsics_right)

    def rays(self):
        """Back-projected unit-depth rays ``(Q_left, Q_right)``, each ``(N, 3)``."""
        return (back_project_many(self.intrinsics_left, self.left),
                back_project_many(self.intrinsics_right, self.right))


@dataclass(frozen=True, eq=False)
class Extrinsics:
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float)
        norm = np.linalg.norm(t)
        if not norm > 0:
            raise ValueError("translation must be non-zero")
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "translation", t / norm)


@dataclass(frozen=True, eq=False)
class RectifyingPair:
    R_left: np.ndarray
    R_right: np.ndarray


def back_project(K: Intrinsics, p) -> np.ndarray:
    """Unit-depth ray ``K^-1 [u, v, 1]`` of pixel ``p``."""
    return back_project_many(K, np.asarray(p, dtype=float).reshape(1, 2))[0]


def back_project_many(K: Intrinsics, pixels) -> np.ndarray:
    pixels = np.asarray(pixels, dtype=float)
    y = (pixels[:, 1] - K.cy) / K.fy
    x = (pixels[:, 0] - K.cx - K.skew * y) / K.fx
    return np.column_stack([x, y, np.ones(len(pixels))])


def project(K: Intrinsics, points) -> np.ndarray:
    """Pinhole projection of ``(N, 3)`` camera-frame points to ``(N, 2)`` pixels."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x = points[:, 0] / points[:, 2]
    y = points[:, 1] / points[:, 2]
    return np.column_stack([K.fx * x + K.skew * y + K.cx, K.fy * y + K.cy])


def build_Rr_from_t(t) -> np.ndarray:
    """Right rectifying rotation whose rows are ``-t``, ``e_z x -t``, and their cross."""
    t = np.asarray(t, dtype=float)
    r1 = -t / np.linalg.norm(t)
    r2 = np.cross([0.0, 0.0, 1.0], r1)
    n = np.linalg.norm(r2)
    if n <= 1e-9:
        raise DegenerateBaseline(f"baseline {t} is parallel to the optical axis")
    r2 = r2 / n
    r3 = np.cross(r1, r2)
    return np.vstack([r1, r2, r3])


def extract_extrinsics(rect: RectifyingPair) -> Extrinsics:
    R = rect.R_right.T @ rect.R_left
    return Extrinsics(R, -rect.R_right[0].copy())


def init_from_prior(ext: Extrinsics) -> RectifyingPair:
    R_right = build_Rr_from_t(ext.translation)
    return RectifyingPair(R_right @ ext.rotation, R_right)


def rectifying_homographies(rect: RectifyingPair, K_left: Intrinsics,
                            K_right: Intrinsics, K_new: Intrinsics | None = None):
    """Pixel homographies ``K_new R_left K_left^-1`` and ``K_new R_right K_right^-1``.

    ``K_new`` defaults to the left intrinsics.
    """
    K = (K_new or K_left).K
    return (K @ rect.R_left @ K_left.K_inv, K @ rect.R_right @ K_right.K_inv)


def apply_homography(H, pixels) -> np.ndarray:
    pixels = np.atleast_2d(np.asarray(pixels, dtype=float))
    h = np.column_stack([pixels, np.ones(len(pixels))]) @ H.T
    return h[:, :2] / h[:, 2:3]


def vertical_residual_rays(rect: RectifyingPair, q_left, q_right) -> float:
    q_left = np.asarray(q_left, dtype=float)
    q_right = np.asarray(q_right, dtype=float)
    den_l = rect.R_left[2] @ q_left
    den_r = rect.R_right[2] @ q_right
    if den_l < HORIZON_EPS or den_r < HORIZON_EPS:
        raise PointAtHorizon(f"ray depth after rotation: left={den_l}, right={den_r}")
    return float((rect.R_left[1] @ q_left) / den_l - (rect.R_right[1] @ q_right) / den_r)


def vertical_residual(rect: RectifyingPair, pair, K_left: Intrinsics,
                      K_right: Intrinsics) -> float:
    """Difference of the rectified normalized row coordinates of one match."""
    left, right = pair
    return vertical_residual_rays(rect, back_project(K_left, left),
                                  back_project(K_right, right))
