"""Single image pair extrinsics via two rectifying rotations.

The state is a pair of rotations ``(R_left, R_right)``. Residual 0 pins the
gauge (``R_right[1, 2] == 0``, the rectified y-axis has no optical-axis
component); residuals ``1..N`` are the vertical disparities of the matches in
normalized rectified coordinates. Steps are left perturbations
``R <- exp(delta) @ R`` solved by Levenberg-Marquardt with Huber reweighting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.linalg

from . import so3
from .errors import NumericalFailure, PointAtHorizon, TooFewPairs
from .rectification import (
    HORIZON_EPS,
    CorrespondenceSet,
    Extrinsics,
    RectifyingPair,
    extract_extrinsics,
    init_from_prior,
)

LAMBDA_MAX = 1e10


@dataclass(frozen=True)
class SolverConfig:
    huber_threshold: float = 0.01
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 0.1
    step_tol: float = 1e-10
    max_iterations: int = 100
    min_pairs: int = 6
    # False gives plain least squares (all weights 1).
    robust: bool = True

    def __post_init__(self):
        for name in ("huber_threshold", "lambda_init", "lambda_up", "lambda_down", "step_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.min_pairs < 1:
            raise ValueError("min_pairs must be >= 1")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


@dataclass(frozen=True, eq=False)
class SolverState:
    theta_left: np.ndarray
    theta_right: np.ndarray
    R_left: np.ndarray
    R_right: np.ndarray

    @classmethod
    def from_rotations(cls, R_left, R_right):
        return cls(so3.log_so3(R_left), so3.log_so3(R_right),
                   np.asarray(R_left, dtype=float), np.asarray(R_right, dtype=float))

    @classmethod
    def from_thetas(cls, theta_left, theta_right):
        theta_left = np.asarray(theta_left, dtype=float)
        theta_right = np.asarray(theta_right, dtype=float)
        return cls(theta_left, theta_right, so3.exp_so3(theta_left), so3.exp_so3(theta_right))

    @property
    def rectifying(self):
        return RectifyingPair(self.R_left, self.R_right)

    def perturbed(self, delta):
        """Apply the left-multiplicative update with a 6-vector ``[d_left, d_right]``."""
        return SolverState.from_rotations(so3.exp_so3(delta[:3]) @ self.R_left,
                                          so3.exp_so3(delta[3:]) @ self.R_right)


@dataclass
class SolveDiagnostics:
    iterations: int
    final_energy: float
    final_step_norm: float
    converged: bool
    dropped_pairs: int
    # (energy before, energy after) of every accepted step, weights frozen.
    accepted_energies: list = field(default_factory=list)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "final_energy": self.final_energy,
            "final_step_norm": self.final_step_norm,
            "converged": self.converged,
            "dropped_pairs": self.dropped_pairs,
        }


@dataclass(frozen=True, eq=False)
class PairEstimate:
    rotation: np.ndarray
    translation: np.ndarray
    axis: np.ndarray
    angle: float
    theta: np.ndarray
    diagnostics: SolveDiagnostics
    rectifying: RectifyingPair | None = None
    axis_degenerate: bool = False

    @classmethod
    def from_extrinsics(cls, ext: Extrinsics, diagnostics, rectifying=None):
        aa = so3.axis_angle(ext.rotation)
        return cls(ext.rotation, ext.translation, aa.axis, aa.angle, so3.log_so3(ext.rotation),
                   diagnostics, rectifying, aa.degenerate)

    @property
    def extrinsics(self):
        return Extrinsics(self.rotation, self.translation)


class _Problem:
    """Vectorized residuals and Jacobian rows over all matches."""

    def __init__(self, obs: CorrespondenceSet):
        self.q_left, self.q_right = obs.rays()
        self.n = len(obs)

    def evaluate(self, state: SolverState, jacobian=True):
        p_l = self.q_left @ state.R_left.T
        p_r = self.q_right @ state.R_right.T
        usable = (p_l[:, 2] >= HORIZON_EPS) & (p_r[:, 2] >= HORIZON_EPS)
        z_l = np.where(usable, p_l[:, 2], 1.0)
        z_r = np.where(usable, p_r[:, 2], 1.0)
        e = np.empty(self.n + 1)
        e[0] = state.R_right[1, 2]
        e[1:] = np.where(usable, p_l[:, 1] / z_l - p_r[:, 1] / z_r, 0.0)
        if not jacobian:
            return e, usable, None
        J = np.zeros((self.n + 1, 6))
        c = state.R_right[:, 2]
        J[0, 3:] = [-c[2], 0.0, c[0]]
        J[1:, :3] = _ratio_gradient(p_l, z_l)
        J[1:, 3:] = -_ratio_gradient(p_r, z_r)
        J[1:][~usable] = 0.0
        return e, usable, J


def _ratio_gradient(p, z):
    # d(y/z)/d(delta) for p -> exp(delta) p, i.e. dp = -[p]x delta
    x, y = p[:, 0], p[:, 1]
    z2 = z * z
    return np.column_stack([-(z * z + y * y) / z2, x * y / z2, x * z / z2])


def residual_vector(state: SolverState, obs: CorrespondenceSet,
                    config: SolverConfig | None = None) -> np.ndarray:
    """Gauge residual followed by one vertical residual per match, in input order.

    Matches that fall at or behind the rotated principal plane contribute 0.
    """
    config = config or SolverConfig()
    e, usable, _ = _Problem(obs).evaluate(state, jacobian=False)
    if usable.sum() < config.min_pairs:
        raise TooFewPairs(f"{int(usable.sum())} usable pairs, need {config.min_pairs}")
    return e


def jacobian(state: SolverState, obs: CorrespondenceSet) -> np.ndarray:
    """All ``(N + 1, 6)`` Jacobian rows, columns ``[d/d_left | d/d_right]``."""
    return _Problem(obs).evaluate(state)[2]


def jacobian_row(state: SolverState, index: int, obs: CorrespondenceSet) -> np.ndarray:
    if not 0 <= index <= len(obs):
        raise IndexError(index)
    if index == 0:
        return jacobian(state, obs.subset(slice(0, 1)))[0]
    sub = obs.subset(slice(index - 1, index))
    _, usable, J = _Problem(sub).evaluate(state)
    if not usable[0]:
        raise PointAtHorizon(f"pair {index} lies at the rotated horizon")
    return J[1]


def huber_weight(residual, c_t):
    """IRLS weight: 1 inside the threshold, ``c_t / |e|`` outside."""
    a = np.abs(residual)
    w = np.where(a <= c_t, 1.0, c_t / np.where(a == 0, 1.0, a))
    return float(w) if np.ndim(w) == 0 else w


def lm_step(J, residuals, weights, lam) -> np.ndarray:
    """Solve ``(J^T W J + lam I) delta = -J^T W e`` by Cholesky."""
    J = np.asarray(J, dtype=float)
    we = np.asarray(weights, dtype=float)
    A = (J * we[:, None]).T @ J + lam * np.eye(J.shape[1])
    g = (J * we[:, None]).T @ np.asarray(residuals, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(str(exc)) from exc
    return -scipy.linalg.cho_solve(factor, g)


def solve_single_pair(obs: CorrespondenceSet, config: SolverConfig | None = None,
                      init: Extrinsics | None = None) -> PairEstimate:
    """Estimate ``(R, t)`` for one image pair.

    Starts from the identity rig unless ``init`` is given. A result with
    ``diagnostics.converged == False`` is returned rather than raised.
    """
    config = config or SolverConfig()
    problem = _Problem(obs)
    if init is None:
        state = SolverState.from_thetas(np.zeros(3), np.zeros(3))
    else:
        rect = init_from_prior(init)
        state = SolverState.from_rotations(rect.R_left, rect.R_right)

    e, usable, J = problem.evaluate(state)
    if usable.sum() < config.min_pairs:
        raise TooFewPairs(f"{int(usable.sum())} usable pairs, need {config.min_pairs}")

    lam = config.lambda_init
    converged = False
    step_norm = math.inf
    accepted = []
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        w = _weights(e, usable, config)
        energy = float(w @ (e * e))
        while True:
            delta = lm_step(J, e, w, lam)
            step_norm = float(np.linalg.norm(delta))
            if step_norm < config.step_tol:
                converged = True
                break
            trial = state.perturbed(delta)
            e_new, usable_new, J_new = problem.evaluate(trial)
            # a match crossing the horizon invalidates the comparison
            new_energy = float(w @ (e_new * e_new)) if np.array_equal(usable_new, usable) \
                else math.inf
            if new_energy < energy:
                accepted.append((energy, new_energy))
                state, e, usable, J = trial, e_new, usable_new, J_new
                lam *= config.lambda_down
                break
            lam *= config.lambda_up
            if lam > LAMBDA_MAX:
                break
        if converged or lam > LAMBDA_MAX:
            break
        if usable.sum() < config.min_pairs:
            raise TooFewPairs(f"{int(usable.sum())} usable pairs, need {config.min_pairs}")

    w = _weights(e, usable, config)
    diagnostics = SolveDiagnostics(
        iterations=iterations,
        final_energy=float(w @ (e * e)),
        final_step_norm=step_norm,
        converged=converged,
        dropped_pairs=int(problem.n - usable.sum()),
        accepted_energies=accepted,
    )
    rect = state.rectifying
    return PairEstimate.from_extrinsics(extract_extrinsics(rect), diagnostics, rect)


def _weights(e, usable, config):
    w = np.ones_like(e)
    if config.robust:
        w[1:] = huber_weight(e[1:], config.huber_threshold)
    w[1:][~usable] = 0.0
    return w
