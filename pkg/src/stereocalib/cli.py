"""Command-line interface.

Exit status: 0 on success, 1 on bad input, 2 when no pair converged.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import io, pipeline
from .errors import StereoCalibError
from .metrics import ReferenceExtrinsics, evaluate
from .rectification import Extrinsics
from .solver import SolverConfig
from .synthetic import SceneConfig, Viewpoint, perturb_viewpoint, run_protocol

log = logging.getLogger("stereocalib")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2
IDENTITY_RIG = Extrinsics(np.eye(3), np.array([-1.0, 0.0, 0.0]))


def _solver_config(args):
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        data = data.get("solver", data)
    return SolverConfig.from_dict(data)


def _input_files(inputs):
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found = sorted(p.glob("*.txt"))
            if not found:
                raise StereoCalibError(f"no .txt correspondence files in {p}")
            files.extend(found)
        elif p.is_file():
            files.append(p)
        else:
            raise StereoCalibError(f"input not found: {p}")
    return files


def _load_scenes(args):
    files = _input_files(args.input)
    intr_path = args.intrinsics or files[0].with_name("intrinsics.json")
    intrinsics = io.read_intrinsics(intr_path)
    return files, [io.parse_correspondences(f, intrinsics=intrinsics) for f in files]


def _finish(report, estimates, output):
    io.write_report(output, report)
    if estimates and not any(e.diagnostics.converged for e in estimates):
        print("error: no pair converged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_calibrate_pair(args):
    config = _solver_config(args)
    files, scenes = _load_scenes(args)
    if len(scenes) != 1:
        raise StereoCalibError("calibrate-pair takes exactly one correspondence file")
    method = "baseline" if args.baseline else "ours"
    est = pipeline.METHODS[method](scenes[0], config)
    metrics = None
    if args.reference:
        ref = ReferenceExtrinsics.from_extrinsics(io.read_reference(args.reference))
        metrics = evaluate(ref, est, [est])
    report = io.build_report([est], [files[0].name], config, est, metrics, method=method)
    return _finish(report, [est], args.output)


def cmd_calibrate_sequence(args):
    config = _solver_config(args)
    files, scenes = _load_scenes(args)
    method = "baseline" if args.baseline else "ours"
    estimates, global_estimate = pipeline.calibrate_sequence(scenes, config, method, args.jobs)
    metrics = None
    if args.reference:
        ref = ReferenceExtrinsics.from_extrinsics(io.read_reference(args.reference))
        metrics = evaluate(ref, global_estimate, estimates)
    report = io.build_report(estimates, [f.name for f in files], config, global_estimate,
                             metrics, method=method)
    return _finish(report, estimates, args.output)


def _scene_config(args, seed=None, sigma=None):
    return SceneConfig(
        n_points=args.n_points,
        pixel_noise_sigma=args.noise_sigma if sigma is None else sigma,
        outlier_fraction=args.outlier_frac,
        seed=args.seed if seed is None else seed,
    )


def _truth(args):
    return perturb_viewpoint(IDENTITY_RIG, args.viewpoint, math.radians(args.angle_deg))


def cmd_synth(args):
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    config = _scene_config(args)
    truth = _truth(args)
    scenes, _ = run_protocol(config, truth, args.pairs)
    io.write_intrinsics(out / "intrinsics.json", config.intrinsics_left, config.intrinsics_right)
    io.write_reference(out / "reference.json", truth)
    for k, obs in enumerate(scenes):
        io.write_correspondences(out / f"pair_{k:04d}.txt", obs)
    print(f"wrote {len(scenes)} pairs to {out}", file=sys.stderr)
    return EXIT_OK


def _as_estimate(entry):
    return SimpleNamespace(translation=np.array(entry["translation"]),
                           theta=np.array(entry["theta"]))


def cmd_evaluate(args):
    if args.sweep:
        return _sweep(args)
    if not (args.input and args.reference):
        raise StereoCalibError("evaluate needs --input REPORT and --reference")
    report = io.read_report(args.input[0])
    ref = ReferenceExtrinsics.from_extrinsics(io.read_reference(args.reference))
    pairs = [_as_estimate(p) for p in report["pairs"]]
    glob = _as_estimate(report["global"]) if report.get("global") else pairs[0]
    metrics = evaluate(ref, glob, pairs)
    io.write_report(args.output, metrics.to_dict())
    return EXIT_OK


def _sweep(args):
    """CSV of aggregate errors against noise level or number of pairs."""
    config = _solver_config(args)
    truth = _truth(args)
    ref = ReferenceExtrinsics.from_extrinsics(truth)
    if args.sweep == "noise":
        points = [(s, args.pairs) for s in (0.0, 0.25, 0.5, 1.0, 2.0)]
    else:
        points = [(args.noise_sigma, m) for m in (1, 2, 5, 10, 20, 50, 100)]
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["noise_sigma", "M", "e_t", "e_theta", "sigma_t", "sigma_theta"])
        for sigma, m in points:
            scenes, _ = run_protocol(_scene_config(args, sigma=sigma), truth, m)
            estimates, global_estimate = pipeline.calibrate_sequence(scenes, config)
            r = evaluate(ref, global_estimate, estimates)
            writer.writerow([sigma, m, repr(r.e_t), repr(r.e_theta), repr(r.sigma_t),
                             repr(r.sigma_theta)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_compare(args):
    config = _solver_config(args)
    if args.input:
        _, scenes = _load_scenes(args)
        if not args.reference:
            raise StereoCalibError("compare with --input needs --reference")
        truth = io.read_reference(args.reference)
    else:
        truth = _truth(args)
        scenes, _ = run_protocol(_scene_config(args), truth, args.pairs)
    rows = pipeline.compare(scenes, truth, config)
    print(pipeline.format_comparison(rows), file=sys.stderr)
    report = {
        "tool": "stereocalib",
        "config": config.to_dict(),
        "rows": [{"algorithm": name, **m.to_dict()} for name, m in rows.items()],
    }
    io.write_report(args.output, report)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="stereocalib", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inputs="+"):
        p.add_argument("--input", nargs=inputs, help="correspondence files or directories")
        p.add_argument("--intrinsics", help="intrinsics JSON (default: beside the input)")
        p.add_argument("--output", default="-", help="report path ('-' for stdout)")
        p.add_argument("--config", help="solver settings JSON")
        p.add_argument("--reference", help="reference extrinsics JSON")

    def synth_opts(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--noise-sigma", type=float, default=0.5)
        p.add_argument("--outlier-frac", type=float, default=0.0)
        p.add_argument("--pairs", type=int, default=10, help="number of image pairs M")
        p.add_argument("--n-points", type=int, default=50)
        p.add_argument("--viewpoint", choices=[v.value for v in Viewpoint], default="middle")
        p.add_argument("--angle-deg", type=float, default=5.0)

    p = sub.add_parser("calibrate-pair", help="estimate extrinsics from one image pair")
    common(p)
    p.add_argument("--baseline", action="store_true", help="use the epipolar baseline solver")
    p.set_defaults(func=cmd_calibrate_pair)

    p = sub.add_parser("calibrate-sequence", help="estimate and aggregate over many pairs")
    common(p)
    p.add_argument("--baseline", action="store_true", help="use the epipolar baseline solver")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_calibrate_sequence)

    p = sub.add_parser("synth", help="write a synthetic correspondence sequence")
    p.add_argument("--output", required=True, help="output directory")
    synth_opts(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="metrics of a report, or CSV sweeps")
    common(p, inputs=1)
    p.add_argument("--sweep", choices=["noise", "pairs"])
    synth_opts(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="ours vs epipolar baseline, four metrics each")
    common(p)
    synth_opts(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (StereoCalibError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
