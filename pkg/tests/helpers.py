import numpy as np

from stereocalib.rectification import Extrinsics
from stereocalib.solver import PairEstimate, SolveDiagnostics
from stereocalib.so3 import axis_angle, exp_so3


def make_estimate(R, t):
    diag = SolveDiagnostics(0, 0.0, 0.0, True, 0)
    return PairEstimate.from_extrinsics(Extrinsics(R, t), diag)


def noisy_estimates(rng, truth, M, axis_sigma, angle_sigma, t_sigma=0.0):
    """Perturb the axis, angle and translation of ``truth`` independently."""
    aa = axis_angle(truth.rotation)
    out = []
    for _ in range(M):
        axis = exp_so3(rng.normal(scale=axis_sigma, size=3)) @ aa.axis
        angle = aa.angle + rng.normal(scale=angle_sigma)
        t = exp_so3(rng.normal(scale=t_sigma, size=3)) @ truth.translation
        out.append(make_estimate(exp_so3(angle * axis), t))
    return out


def random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fibonacci_sphere_1deg():
    """Roughly uniform sphere grid with about 1 degree spacing."""
    n = int(4 * np.pi / np.deg2rad(1.0) ** 2)
    i = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * i / n)
    golden = np.pi * (1 + 5 ** 0.5)
    return np.column_stack([np.cos(golden * i) * np.sin(phi),
                            np.sin(golden * i) * np.sin(phi), np.cos(phi)])
