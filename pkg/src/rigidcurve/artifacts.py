"""JSON artifact schemas and SVG rendering for the pipeline.

Every artifact is a single JSON document with a schema version field
"v": 1.  Numbers are serialized as decimals with 17 significant digits so
that doubles round-trip losslessly and reruns are byte-identical.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import RangeError
from .geometry import Line2
from .observe import FrameObservation
from .perspective import PlanarSceneView
from .scene import CurveParams, FrameImage, MotionScript, Scene
from .solver import FramePose, SolveReport

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if not np.isfinite(v):
        raise RangeError(f"cannot serialize non-finite number {v}")
    return format(v, ".17g")


def dumps(obj) -> str:
    """Deterministic JSON text with fixed float formatting and key order."""
    out = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        out.append(_fmt(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _write(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(np.asarray(obj).tolist() if isinstance(obj, np.ndarray) else obj):
            if i:
                out.append(",")
            _write(v, out)
        out.append("]")
    else:
        raise RangeError(f"cannot serialize {type(obj)!r}")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def read_json(path, expect_version: int = SCHEMA_VERSION):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("v") != expect_version:
        raise RangeError(f"unsupported schema version {doc.get('v')!r} in {path}")
    return doc


# ---------------------------------------------------------------------------
# per-artifact encoders / decoders
# ---------------------------------------------------------------------------


def scene_doc(scene: Scene, n_samples: int) -> dict:
    s = scene.script
    return {
        "v": SCHEMA_VERSION,
        "seed": scene.seed,
        "params": {"c": scene.params.c, "alpha": scene.params.alpha,
                   "beta": scene.params.beta, "phi": scene.params.phi},
        "motion": [{"delta": float(s.deltas[i]), "tau": float(s.taus[i]),
                    "inplane_rot": float(s.inplane_rot[i]),
                    "inplane_shift": [float(s.inplane_shift[i, 0]),
                                      float(s.inplane_shift[i, 1])]}
                   for i in range(len(s))],
        "samples_per_curve": n_samples,
    }


def params_from_doc(doc: dict) -> CurveParams:
    p = doc["params"]
    return CurveParams(c=p["c"], alpha=p["alpha"], beta=p["beta"], phi=p["phi"])


def script_from_doc(doc: dict) -> MotionScript:
    motion = doc["motion"]
    return MotionScript(
        deltas=np.array([m["delta"] for m in motion]),
        taus=np.array([m["tau"] for m in motion]),
        inplane_rot=np.array([m["inplane_rot"] for m in motion]),
        inplane_shift=np.array([m["inplane_shift"] for m in motion]),
    )


def frames_doc(frames) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "frames": [{
            "index": f.index,
            "A": f.A_proj,
            "B": f.B_proj,
            "tanA_dir": f.tangent_dir_at_A_proj,
            "tanB_dir": f.tangent_dir_at_B_proj,
            "curve": f.projected_samples,
        } for f in frames],
    }


def frames_from_doc(doc: dict):
    out = []
    for f in doc["frames"]:
        pts = np.array(f["curve"], dtype=float)
        out.append(FrameImage(projected_samples=pts,
                              A_proj=np.array(f["A"], dtype=float),
                              B_proj=np.array(f["B"], dtype=float),
                              tangent_dir_at_A_proj=np.array(f["tanA_dir"], dtype=float),
                              tangent_dir_at_B_proj=np.array(f["tanB_dir"], dtype=float),
                              index=int(f["index"])))
    return out


def observations_doc(observations) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "observations": [{"index": o.frame_index, "c_prime": o.c_prime,
                          "d_prime": o.d_prime, "e_prime": o.e_prime}
                         for o in observations],
    }


def observations_from_doc(doc: dict):
    return [FrameObservation(c_prime=o["c_prime"], d_prime=o["d_prime"],
                             e_prime=o["e_prime"], tangent_angle_at_A_proj=0.0,
                             tangent_angle_at_B_proj=0.0, frame_index=int(o["index"]))
            for o in doc["observations"]]


def solution_doc(report: SolveReport) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "method": report.method,
        "params": {"c": report.params.c, "alpha": report.params.alpha,
                   "beta": report.params.beta, "phi": report.params.phi},
        "residual_rms": report.residual_rms,
        "per_frame": [{"index": p.frame_index, "delta": p.delta, "tau": p.tau,
                       "branch": p.delta_branch} for p in report.per_frame],
    }


def solution_from_doc(doc: dict) -> SolveReport:
    poses = tuple(FramePose(delta=p["delta"], tau=p["tau"], delta_branch=p["branch"],
                            frame_index=int(p["index"])) for p in doc["per_frame"])
    return SolveReport(params=params_from_doc(doc), per_frame=poses,
                       residual_rms=doc["residual_rms"], iterations=0,
                       method=doc["method"])


def curve3d_doc(recon) -> dict:
    return {"v": SCHEMA_VERSION, "mirror_flag": recon.mirror_flag,
            "points": recon.points}


def pairs_doc(pairs) -> dict:
    return {"v": SCHEMA_VERSION,
            "pairs": [{"i": i, "x1": x1, "x2": x2}
                      for i, (x1, x2) in enumerate(pairs)]}


def view_doc(view: PlanarSceneView) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "A": view.A, "B": view.B, "C": view.C,
        "tangent_at_A": [view.tangent_line_at_A.point, view.tangent_line_at_A.direction],
        "tangent_at_B": [view.tangent_line_at_B.point, view.tangent_line_at_B.direction],
        "curve": view.curve_image,
    }


def view_from_doc(doc: dict) -> PlanarSceneView:
    def line(key):
        p, d = doc[key]
        return Line2(np.array(p, dtype=float), np.array(d, dtype=float))

    return PlanarSceneView(A=np.array(doc["A"], dtype=float),
                           B=np.array(doc["B"], dtype=float),
                           C=np.array(doc["C"], dtype=float),
                           tangent_line_at_A=line("tangent_at_A"),
                           tangent_line_at_B=line("tangent_at_B"),
                           curve_image=np.array(doc["curve"], dtype=float))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def frame_svg(img: FrameImage, size: int = 480) -> str:
    """Standalone SVG plot of one frame: curve, endpoints, tangent ticks."""
    pts = img.projected_samples
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = 0.08 * span
    lo = lo - pad
    scale = size / (span + 2 * pad)

    def to_px(p):
        return ((p[0] - lo[0]) * scale, size - (p[1] - lo[1]) * scale)

    def fmt_pt(p):
        x, y = to_px(p)
        return f"{x:.3f},{y:.3f}"

    poly = " ".join(fmt_pt(p) for p in pts)
    tick = 0.12 * span
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<title>frame {img.index}</title>',
        f'<polyline points="{poly}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for p, d, color in ((img.A_proj, img.tangent_dir_at_A_proj, "crimson"),
                        (img.B_proj, img.tangent_dir_at_B_proj, "royalblue")):
        x1, y1 = to_px(p - tick * d)
        x2, y2 = to_px(p + tick * d)
        parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                     f'stroke="{color}" stroke-width="1"/>')
        cx, cy = to_px(p)
        parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="3" fill="{color}"/>')
    parts.append(f'<text x="8" y="16" font-size="12">frame {img.index}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
