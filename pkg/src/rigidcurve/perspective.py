"""Correspondence between two perspective views of a planar curve.

Three traceable points A, B, C plus the tangent lines at A and B give two
constructible points per view: D (the tangent crossing) and E (where line
DC meets line AB).  The double quotient (AE/AY) : (BE/BY), taken with
signed ratios along the line, is a cross-ratio and therefore survives
perspective projection; matching it across views transfers any curve point
from one image to the other without 3D reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (AmbiguityError, CollinearityError, DegenerateError,
                     NoIntersectionError, ParallelError, RangeError)
from .geometry import Line2, cross2, intersect_lines_2d

_REL_TOL = 1e-9


@dataclass(frozen=True)
class PlanarSceneView:
    """One perspective image of a planar curve with traced A, B, C."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    tangent_line_at_A: Line2
    tangent_line_at_B: Line2
    curve_image: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        C = np.asarray(self.C, dtype=float)
        if np.linalg.norm(A - B) < 1e-12:
            raise RangeError("traced points A and B must be distinct")
        for name, point, line in (("A", A, self.tangent_line_at_A),
                                  ("B", B, self.tangent_line_at_B)):
            off = abs(cross2(point - line.point, line.direction))
            if off > _REL_TOL * max(1.0, np.linalg.norm(point - line.point)):
                raise RangeError(f"tangent line at {name} does not pass through {name}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "curve_image", np.asarray(self.curve_image, dtype=float))


@dataclass(frozen=True)
class DerivedPoints:
    D: np.ndarray
    E: np.ndarray


def construct_DE(view: PlanarSceneView) -> DerivedPoints:
    """D = tangent crossing, E = (line AB) crossed with (line DC)."""
    D = intersect_lines_2d(view.tangent_line_at_A, view.tangent_line_at_B)
    if np.linalg.norm(D - view.C) < 1e-12:
        raise DegenerateError("D coincides with C; line DC undefined")
    E = intersect_lines_2d(Line2.through(view.A, view.B), Line2.through(D, view.C))
    return DerivedPoints(D=D, E=E)


def _line_coords(A, B, points):
    span = B - A
    L = float(np.linalg.norm(span))
    if L < 1e-12:
        raise DegenerateError("A and B coincide")
    d = span / L
    scale = max(1.0, L, *(float(np.linalg.norm(p - A)) for p in points))
    for p in points:
        if abs(cross2(p - A, d)) > _REL_TOL * scale:
            raise CollinearityError("points are not collinear within tolerance")
    return L, d, [float((p - A) @ d) for p in points], scale


def double_quotient(A, E, Y, B) -> float:
    """(AE/AY) : (BE/BY) with signed ratios along the common line.

    A true cross-ratio: invariant under any projective map of the line.
    """
    A, E, Y, B = (np.asarray(p, dtype=float) for p in (A, E, Y, B))
    L, _, (tE, tY), scale = _line_coords(A, B, [E, Y])
    if min(abs(tY), abs(tE - L)) < 1e-12 * scale:
        raise DegenerateError("coincident points make the quotient undefined")
    return (tE * (tY - L)) / (tY * (tE - L))


def solve_Y_second(view1_points, view2_line_points, Y1) -> np.ndarray:
    """Point on the second view's AB line with the first view's quotient."""
    A1, E1, B1 = view1_points
    A2, E2, B2 = (np.asarray(p, dtype=float) for p in view2_line_points)
    k = double_quotient(A1, E1, Y1, B1)
    L2, d2, (tE,), scale = _line_coords(A2, B2, [E2])
    den = tE * (1.0 - k) + k * L2
    if abs(den) < 1e-12 * max(1.0, abs(tE), L2):
        raise DegenerateError("matching point lies at infinity")
    return A2 + (tE * L2 / den) * d2


def _polyline_crossings(line: Line2, poly: np.ndarray):
    a = poly[:-1]
    b = poly[1:]
    seg = b - a
    d = line.direction
    den = seg[:, 0] * d[1] - seg[:, 1] * d[0]
    diff = line.point - a
    num = diff[:, 0] * d[1] - diff[:, 1] * d[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    ok = (np.abs(den) > 1e-15) & (t >= -1e-12) & (t <= 1.0 + 1e-12)
    return [a[i] + t[i] * seg[i] for i in np.nonzero(ok)[0]]


def _diameter(view: PlanarSceneView) -> float:
    pts = view.curve_image
    return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


def _correspond(X1, view1, view2, der1, der2, hint):
    X1 = np.asarray(X1, dtype=float)
    tol = 1e-9 * max(1.0, _diameter(view1))
    for traced1, traced2 in ((view1.A, view2.A), (view1.B, view2.B),
                             (view1.C, view2.C)):
        if np.linalg.norm(X1 - traced1) <= tol:
            return np.asarray(traced2, dtype=float).copy()
    if np.linalg.norm(X1 - der1.D) < 1e-12:
        raise DegenerateError("X coincides with the tangent crossing D")
    Y1 = intersect_lines_2d(Line2.through(view1.A, view1.B),
                            Line2.through(der1.D, X1))
    Y2 = solve_Y_second((view1.A, der1.E, view1.B),
                        (view2.A, der2.E, view2.B), Y1)
    if np.linalg.norm(Y2 - der2.D) < 1e-12:
        raise DegenerateError("matched point collapses onto D in view 2")
    crossings = _polyline_crossings(Line2.through(der2.D, Y2), view2.curve_image)
    if not crossings:
        raise NoIntersectionError("transfer line misses the view-2 curve image")
    if hint is None:
        if len(crossings) > 1:
            raise AmbiguityError(f"{len(crossings)} crossings and no continuity seed")
        return crossings[0]
    dist = [float(np.linalg.norm(c - hint)) for c in crossings]
    return crossings[int(np.argmin(dist))]


def correspond_point(X1, view1: PlanarSceneView, view2: PlanarSceneView) -> np.ndarray:
    """View-2 image of the curve point whose view-1 image is X1."""
    der1 = construct_DE(view1)
    der2 = construct_DE(view2)
    return _correspond(X1, view1, view2, der1, der2, None)


def correspond_curve(view1: PlanarSceneView, view2: PlanarSceneView):
    """One (X1, X2) pair per view-1 polyline sample, continuity-seeded.

    Ambiguities resolve to the crossing nearest the previous sample's
    match; the first sample seeds from A in view 2.
    """
    der1 = construct_DE(view1)
    der2 = construct_DE(view2)
    hint = view2.A
    pairs = []
    for k, X1 in enumerate(view1.curve_image):
        try:
            X2 = _correspond(X1, view1, view2, der1, der2, hint)
        except (DegenerateError, ParallelError, NoIntersectionError,
                AmbiguityError) as exc:
            exc.sample_index = k
            exc.args = (f"sample {k}: {exc.args[0]}",)
            raise
        pairs.append((np.asarray(X1, dtype=float).copy(), X2))
        hint = X2
    return pairs


# ---------------------------------------------------------------------------
# Synthetic two-camera fixture
# ---------------------------------------------------------------------------


def _look_at(cam_pos: np.ndarray, target: np.ndarray):
    f = target - cam_pos
    f = f / np.linalg.norm(f)
    up = np.array([0.0, 0.0, 1.0])
    if abs(f @ up) > 0.95:
        up = np.array([0.0, 1.0, 0.0])
    r = np.cross(f, up)
    r /= np.linalg.norm(r)
    u = np.cross(r, f)
    return np.vstack([r, u, f])


def _project(R: np.ndarray, cam_pos: np.ndarray, X: np.ndarray) -> np.ndarray:
    x = (np.atleast_2d(X) - cam_pos) @ R.T
    if (x[:, 2] <= 1e-6).any():
        raise DegenerateError("point behind the camera")
    out = x[:, :2] / x[:, 2:3]
    return out[0] if np.asarray(X).ndim == 1 else out


def _image_tangent_line(R, cam_pos, point3, dir3) -> Line2:
    p = _project(R, cam_pos, point3)
    q = _project(R, cam_pos, point3 + 0.1 * dir3)
    return Line2.through(p, q)


def make_synthetic_view_pair(seed: int, n_samples: int = 64):
    """Planar cubic under two unit-focal pinhole cameras.

    Returns (view1, view2, truth2) where truth2 holds the exact view-2
    projections of every view-1 curve sample, for use as a test oracle.
    """
    rng = np.random.default_rng(seed)
    for _ in range(256):
        # plane through p0 spanned by e1, e2
        p0 = np.array([0.0, 0.0, 4.0]) + rng.normal(0.0, 0.3, 3)
        e1 = rng.normal(size=3)
        e1 /= np.linalg.norm(e1)
        n = rng.normal(size=3)
        e2 = n - (n @ e1) * e1
        e2 /= np.linalg.norm(e2)
        # planar cubic with distinct endpoint tangents
        P = rng.normal(0.0, 1.0, size=(4, 2))
        P[0] = (-1.0, 0.0)
        P[3] = (1.0, 0.0)
        t = np.linspace(0.0, 1.0, n_samples)
        tt = np.vander(t, 4, increasing=True)        # 1, t, t^2, t^3
        coeff = np.array([P[0], 3 * (P[1] - P[0]),
                          3 * (P[2] - 2 * P[1] + P[0]),
                          P[3] - 3 * P[2] + 3 * P[1] - P[0]])
        plane_pts = tt @ coeff
        dcoeff = np.array([coeff[1], 2 * coeff[2], 3 * coeff[3]])
        d0 = np.array([1.0, t[0], t[0] ** 2]) @ dcoeff
        d1 = np.array([1.0, t[-1], t[-1] ** 2]) @ dcoeff
        if min(np.linalg.norm(d0), np.linalg.norm(d1)) < 0.3:
            continue
        if abs(cross2(d0 / np.linalg.norm(d0), d1 / np.linalg.norm(d1))) < 0.2:
            continue
        pts3 = p0 + plane_pts @ np.vstack([e1, e2])
        dA3 = d0 @ np.vstack([e1, e2])
        dB3 = d1 @ np.vstack([e1, e2])
        iC = int(rng.integers(n_samples // 3, 2 * n_samples // 3))
        cams = []
        for k in range(2):
            pos = np.array([(-1.0) ** k * rng.uniform(1.0, 2.0),
                            rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5)])
            cams.append((_look_at(pos, pts3.mean(axis=0)), pos))
        try:
            views = []
            for R, pos in cams:
                img = _project(R, pos, pts3)
                view = PlanarSceneView(
                    A=img[0], B=img[-1], C=img[iC],
                    tangent_line_at_A=_image_tangent_line(R, pos, pts3[0], dA3),
                    tangent_line_at_B=_image_tangent_line(R, pos, pts3[-1], dB3),
                    curve_image=img)
                der = construct_DE(view)
                # keep the constructions well conditioned
                L, d, (tE,), scale = _line_coords(view.A, view.B, [der.E])
                if np.linalg.norm(der.D) > 50 or min(abs(tE), abs(tE - L)) < 0.02 * L:
                    raise DegenerateError("ill conditioned view")
                views.append(view)
        except (ParallelError, DegenerateError, CollinearityError):
            continue
        R2, p2 = cams[1]
        return views[0], views[1], _project(R2, p2, pts3)
    raise RangeError("could not draw a generic two-camera scene")  # pragma: no cover
