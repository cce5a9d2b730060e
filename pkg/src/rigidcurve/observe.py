"""Conversion of a frame image into the solver's scalar observables.

After normalization A' sits at the origin and B' on the positive x axis.
l1 is the perpendicular to A'B' through A' (the y axis) and l2 the
perpendicular through B'.  D' is the crossing of the projected tangent
line at B' with l1, E' the crossing of the projected tangent line at A'
with l2.

Sign convention: d' is the y coordinate of D'; e' is measured along l2
oriented opposite to l1 (e' = -y of E' relative to B').  The two
constructions are images of each other under the half turn about the chord
midpoint, which is what makes the frame-independent dihedral angle appear
in the solver's equations.  The magnitudes |d'|, |e'| are the segment
lengths AD' and BE'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError
from .geometry import Line2, intersect_lines_2d
from .scene import FrameImage


@dataclass(frozen=True)
class FrameObservation:
    """Measured scalars of one frame."""

    c_prime: float
    d_prime: float
    e_prime: float
    tangent_angle_at_A_proj: float
    tangent_angle_at_B_proj: float
    frame_index: int = 0


def normalize_frame(img: FrameImage) -> FrameImage:
    """Undo in-plane nuisance: translate A' to the origin, rotate B' onto +x."""
    span = img.B_proj - img.A_proj
    norm = np.linalg.norm(span)
    if norm < 1e-12:
        raise DegenerateError("projection collapses A and B to one point")
    ca, sa = span / norm
    R = np.array([[ca, sa], [-sa, ca]])
    pts = (img.projected_samples - img.A_proj) @ R.T
    return FrameImage(projected_samples=pts, A_proj=pts[0], B_proj=pts[-1],
                      tangent_dir_at_A_proj=R @ img.tangent_dir_at_A_proj,
                      tangent_dir_at_B_proj=R @ img.tangent_dir_at_B_proj,
                      index=img.index)


def _line_angle(d: np.ndarray) -> float:
    # direction of an undirected line, folded into [0, pi)
    return float(np.arctan2(d[1], d[0])) % np.pi


def extract_observables(img: FrameImage) -> FrameObservation:
    """Scalar observables (c', d', e') of a frame.

    The image is normalized first, so the caller may pass a raw frame.
    Raises ParallelError when a projected tangent is parallel to the
    corresponding perpendicular (D' or E' at infinity).
    """
    img = normalize_frame(img)
    c_p = float(img.B_proj[0])
    y_axis = np.array([0.0, 1.0])
    l1 = Line2(np.zeros(2), y_axis)
    l2 = Line2(img.B_proj, y_axis)
    D_p = intersect_lines_2d(Line2(img.B_proj, img.tangent_dir_at_B_proj), l1)
    E_p = intersect_lines_2d(Line2(img.A_proj, img.tangent_dir_at_A_proj), l2)
    return FrameObservation(
        c_prime=c_p,
        d_prime=float(D_p[1]),
        e_prime=-float(E_p[1] - img.B_proj[1]),
        tangent_angle_at_A_proj=_line_angle(img.tangent_dir_at_A_proj),
        tangent_angle_at_B_proj=_line_angle(img.tangent_dir_at_B_proj),
        frame_index=img.index,
    )


def extract_all(frames) -> list:
    """Observables for a list of frames, preserving frame indices."""
    return [extract_observables(f) for f in frames]
