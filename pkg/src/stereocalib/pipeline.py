"""Solve-aggregate-evaluate pipelines shared by the CLI and the test suite."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .aggregate import aggregate
from .baseline import solve_epipolar
from .metrics import MetricsReport, ReferenceExtrinsics, evaluate
from .solver import SolverConfig, solve_single_pair

METHODS = {"ours": solve_single_pair, "baseline": solve_epipolar}


def calibrate_sequence(scenes, config: SolverConfig | None = None, method="ours", jobs=1):
    """Solve every scene, then aggregate. Returns ``(estimates, global_estimate)``.

    Results do not depend on ``jobs``: solves share no state and are
    collected in input order.
    """
    config = config or SolverConfig()
    solve = METHODS[method]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            estimates = list(pool.map(lambda obs: solve(obs, config), scenes))
    else:
        estimates = [solve(obs, config) for obs in scenes]
    return estimates, aggregate(estimates)


def compare(scenes, reference, config: SolverConfig | None = None):
    """Four metrics for each method on the same scenes, keyed by method name."""
    ref = reference if isinstance(reference, ReferenceExtrinsics) \
        else ReferenceExtrinsics.from_extrinsics(reference)
    rows = {}
    for method in METHODS:
        estimates, global_estimate = calibrate_sequence(scenes, config, method)
        rows[method] = evaluate(ref, global_estimate, estimates)
    return rows


def format_comparison(rows: dict[str, MetricsReport]) -> str:
    lines = [f"{'algorithm':<10} {'e_t (rad)':>12} {'e_theta (rad)':>14} "
             f"{'sigma_t (rad)':>14} {'sigma_theta (rad)':>18}"]
    for name, m in rows.items():
        lines.append(f"{name:<10} {m.e_t:12.6g} {m.e_theta:14.6g} "
                     f"{m.sigma_t:14.6g} {m.sigma_theta:18.6g}")
    return "\n".join(lines)
