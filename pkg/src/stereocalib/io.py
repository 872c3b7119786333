"""File formats: correspondence text files, intrinsics sidecars, JSON reports.

Correspondence files hold one match per line, ``u_l v_l u_r v_r``
whitespace-separated; ``#`` starts a comment. The intrinsics sidecar is JSON
``{"left": {fx, fy, cx, cy, skew}, "right": {...}}``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__, so3
from .errors import MissingIntrinsics, ParseError
from .rectification import CorrespondenceSet, Extrinsics, Intrinsics


def read_intrinsics(path):
    path = Path(path)
    if not path.is_file():
        raise MissingIntrinsics(f"intrinsics file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from exc
    try:
        return Intrinsics.from_dict(data["left"]), Intrinsics.from_dict(data["right"])
    except (KeyError, TypeError) as exc:
        raise MissingIntrinsics(f"{path}: missing camera field {exc}") from exc


def write_intrinsics(path, left: Intrinsics, right: Intrinsics):
    Path(path).write_text(
        json.dumps({"left": left.to_dict(), "right": right.to_dict()}, indent=2) + "\n",
        encoding="utf-8")


def parse_correspondences(path, intrinsics_path=None, intrinsics=None) -> CorrespondenceSet:
    """Read a correspondence file.

    Intrinsics come from ``intrinsics`` if given, else from the sidecar at
    ``intrinsics_path`` (default: ``intrinsics.json`` beside the file).
    """
    path = Path(path)
    if intrinsics is None:
        intrinsics = read_intrinsics(intrinsics_path or path.with_name("intrinsics.json"))
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            fields = text.split()
            if len(fields) != 4:
                raise ParseError(path, line_no, f"expected 4 numbers, got {len(fields)}")
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise ParseError(path, line_no, f"not a number in {text!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError(path, line_no, "non-finite value")
            rows.append(values)
    if not rows:
        raise ParseError(path, 0, "no correspondences")
    arr = np.array(rows)
    return CorrespondenceSet(arr[:, :2], arr[:, 2:], *intrinsics)


def format_correspondences(obs: CorrespondenceSet) -> str:
    return "".join(
        f"{ul!r} {vl!r} {ur!r} {vr!r}\n"
        for (ul, vl), (ur, vr) in zip(obs.left.tolist(), obs.right.tolist()))


def write_correspondences(path, obs: CorrespondenceSet):
    Path(path).write_text(format_correspondences(obs), encoding="utf-8")


def extrinsics_to_dict(ext: Extrinsics):
    return {
        "rotation_row_major": ext.rotation.reshape(-1).tolist(),
        "translation": ext.translation.tolist(),
        "theta": so3.log_so3(ext.rotation).tolist(),
    }


def extrinsics_from_dict(d) -> Extrinsics:
    R = np.array(d["rotation_row_major"], dtype=float).reshape(3, 3)
    if not so3.is_rotation(R):
        raise ValueError("rotation_row_major is not a rotation matrix")
    return Extrinsics(R, np.array(d["translation"], dtype=float))


def read_reference(path) -> Extrinsics:
    return extrinsics_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_reference(path, ext: Extrinsics):
    Path(path).write_text(json.dumps(extrinsics_to_dict(ext), indent=2) + "\n",
                          encoding="utf-8")


def estimate_to_dict(est, name=None):
    d = {} if name is None else {"name": name}
    d.update({
        "rotation_row_major": np.asarray(est.rotation).reshape(-1).tolist(),
        "translation": np.asarray(est.translation).tolist(),
        "theta": np.asarray(est.theta).tolist(),
        "axis": np.asarray(est.axis).tolist(),
        "angle": float(est.angle),
    })
    if hasattr(est, "diagnostics"):
        d["diagnostics"] = est.diagnostics.to_dict()
    if hasattr(est, "contributing_pairs"):
        d["contributing_pairs"] = est.contributing_pairs
        d["axes_valid"] = est.axes_valid
    return d


def build_report(estimates, names, config, global_estimate=None, metrics=None, **extra):
    report = {
        "tool": "stereocalib",
        "version": __version__,
        "config": config.to_dict(),
        "pairs": [estimate_to_dict(e, n) for e, n in zip(estimates, names)],
        "global": None if global_estimate is None else estimate_to_dict(global_estimate),
        "metrics": None if metrics is None else metrics.to_dict(),
    }
    report.update(extra)
    return report


def write_report(path, report):
    # json emits floats with repr, i.e. shortest round-trip form
    text = json.dumps(report, indent=2, allow_nan=True) + "\n"
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_report(path):
    report = json.loads(Path(path).read_text(encoding="utf-8"))
    for entry in report.get("pairs", []) + ([report["global"]] if report.get("global") else []):
        R = np.array(entry["rotation_row_major"]).reshape(3, 3)
        if not so3.is_rotation(R):
            raise ValueError(f"report entry {entry.get('name')} has an invalid rotation")
    return report
