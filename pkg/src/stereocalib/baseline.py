"""Epipolar-constraint baseline for head-to-head comparison.

Minimizes the algebraic epipolar residuals ``q_r . (t x R q_l)`` over the
rotation (left perturbation) and the unit translation (two-dimensional
tangent chart, re-centred after every accepted step). The LM schedule and
Huber weighting mirror :func:`stereocalib.solver.solve_single_pair`.

With the rig convention ``p_r = R p_l + t`` the residual that vanishes at the
true extrinsics is ``q_r^T [t]x R q_l``; the transposed arrangement
``q_l^T [t]x R q_r`` does not.
"""
from __future__ import annotations

import math

import numpy as np

from . import so3
from .errors import DegenerateBaseline, TooFewPairs
from .rectification import CorrespondenceSet, Extrinsics, init_from_prior
from .solver import (
    LAMBDA_MAX,
    PairEstimate,
    SolveDiagnostics,
    SolverConfig,
    huber_weight,
    lm_step,
)


def essential_matrix(ext: Extrinsics) -> np.ndarray:
    return so3.hat(ext.translation) @ ext.rotation


def epipolar_residuals(ext: Extrinsics, obs: CorrespondenceSet) -> np.ndarray:
    q_l, q_r = obs.rays()
    return np.einsum("ij,ij->i", q_r, q_l @ essential_matrix(ext).T)


def epipolar_objective(ext: Extrinsics, obs: CorrespondenceSet) -> float:
    e = epipolar_residuals(ext, obs)
    return float(e @ e)


def tangent_basis(t) -> np.ndarray:
    """Two orthonormal vectors spanning the plane orthogonal to unit ``t``, as rows."""
    k = int(np.argmin(np.abs(t)))
    a = np.zeros(3)
    a[k] = 1.0
    b1 = np.cross(t, a)
    b1 /= np.linalg.norm(b1)
    return np.vstack([b1, np.cross(t, b1)])


def _evaluate(R, t, q_l, q_r):
    Rq = q_l @ R.T
    m = np.cross(Rq, q_r)
    e = m @ t
    J = np.empty((len(e), 5))
    # Rq -> Rq + delta x Rq gives de = delta . (Rq x (q_r x t))
    J[:, :3] = np.cross(Rq, np.cross(q_r, t))
    J[:, 3:] = m @ tangent_basis(t).T
    return e, J


def solve_epipolar(obs: CorrespondenceSet, config: SolverConfig | None = None,
                   init: Extrinsics | None = None) -> PairEstimate:
    config = config or SolverConfig()
    if len(obs) < config.min_pairs:
        raise TooFewPairs(f"{len(obs)} pairs, need {config.min_pairs}")
    q_l, q_r = obs.rays()
    if init is None:
        R, t = np.eye(3), np.array([-1.0, 0.0, 0.0])
    else:
        R, t = init.rotation.copy(), init.translation.copy()

    def weights(e):
        return huber_weight(e, config.huber_threshold) if config.robust else np.ones_like(e)

    e, J = _evaluate(R, t, q_l, q_r)
    lam = config.lambda_init
    converged = False
    step_norm = math.inf
    accepted = []
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        w = weights(e)
        energy = float(w @ (e * e))
        while True:
            delta = lm_step(J, e, w, lam)
            step_norm = float(np.linalg.norm(delta))
            if step_norm < config.step_tol:
                converged = True
                break
            R_new = so3.exp_so3(delta[:3]) @ R
            t_new = t + tangent_basis(t).T @ delta[3:]
            t_new /= np.linalg.norm(t_new)
            e_new, J_new = _evaluate(R_new, t_new, q_l, q_r)
            new_energy = float(w @ (e_new * e_new))
            if new_energy < energy:
                accepted.append((energy, new_energy))
                R, t, e, J = R_new, t_new, e_new, J_new
                lam *= config.lambda_down
                break
            lam *= config.lambda_up
            if lam > LAMBDA_MAX:
                break
        if converged or lam > LAMBDA_MAX:
            break

    diagnostics = SolveDiagnostics(
        iterations=iterations,
        final_energy=float(weights(e) @ (e * e)),
        final_step_norm=step_norm,
        converged=converged,
        dropped_pairs=0,
        accepted_energies=accepted,
    )
    ext = Extrinsics(R, t)
    try:
        rect = init_from_prior(ext)
    except DegenerateBaseline:
        rect = None
    return PairEstimate.from_extrinsics(ext, diagnostics, rect)
