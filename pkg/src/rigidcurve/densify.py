"""Reconstruction of non-traceable curve points from two (or more) frames.

Every point and line rigidly attached to the moving curve keeps its
coordinates in the basis (AB, AC, AB x AC), where C = A + (unit tangent at
A).  The vertical ray through an image point of frame 0 is expressed in
that basis, transported to another frame via the recovered pose, projected,
and intersected with that frame's curve image; the depth then follows from
intersecting the two rays in space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguityError, CoplanarError, NoIntersectionError, RangeError
from .observe import normalize_frame
from .scene import CurveParams, canonical_endpoints, canonical_motion_matrix
from .solver import FramePose

COPLANAR_TOL = 1e-9


@dataclass(frozen=True)
class RigidBasis:
    """Affine basis attached to the rigid curve: origin A, axes AB, AC, AB x AC."""

    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.column_stack([self.u, self.v, self.w])

    def to_basis(self, point: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.matrix(), np.asarray(point, dtype=float) - self.origin)

    def from_basis(self, coords: np.ndarray) -> np.ndarray:
        return self.origin + self.matrix() @ np.asarray(coords, dtype=float)

    def dir_to_basis(self, d: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.matrix(), np.asarray(d, dtype=float))

    def dir_from_basis(self, q: np.ndarray) -> np.ndarray:
        return self.matrix() @ np.asarray(q, dtype=float)


@dataclass(frozen=True)
class BasisLine:
    """Line in basis coordinates: f(u) = p + u q."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if np.linalg.norm(q) < 1e-15:
            raise RangeError("basis line direction must be nonzero")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class ReconstructedCurve:
    points: np.ndarray
    source_image_indices: tuple
    mirror_flag: str


def build_basis(A: np.ndarray, B: np.ndarray, C_dir: np.ndarray) -> RigidBasis:
    """Basis from the chord and the unit tangent direction at A."""
    A = np.asarray(A, dtype=float)
    u = np.asarray(B, dtype=float) - A
    v = np.asarray(C_dir, dtype=float)
    w = np.cross(u, v)
    if np.linalg.norm(w) < COPLANAR_TOL * np.linalg.norm(u):
        raise CoplanarError("tangent at A is parallel to the chord AB")
    return RigidBasis(origin=A, u=u, v=v, w=w)


def line_to_basis(point: np.ndarray, direction: np.ndarray, basis: RigidBasis) -> BasisLine:
    return BasisLine(p=basis.to_basis(point), q=basis.dir_to_basis(direction))


def line_from_basis(line: BasisLine, basis: RigidBasis):
    return basis.from_basis(line.p), basis.dir_from_basis(line.q)


def frame_basis(params: CurveParams, pose: FramePose) -> RigidBasis:
    """World-space rigid basis of the curve at a recovered frame pose."""
    _, B, t_A, _ = canonical_endpoints(params)
    R = canonical_motion_matrix(pose.delta, pose.tau)
    return build_basis(np.zeros(3), R @ B, R @ t_A)


def _coplanar_guard(params: CurveParams) -> None:
    d = min(params.phi, abs(params.phi - np.pi), 2 * np.pi - params.phi)
    if d < COPLANAR_TOL:
        raise CoplanarError("chord and endpoint tangents are coplanar")


def _segment_crossings(p: np.ndarray, d: np.ndarray, poly: np.ndarray):
    """All crossings of the line (p, d) with a polyline, exact per segment."""
    a = poly[:-1]
    b = poly[1:]
    seg = b - a
    den = seg[:, 0] * d[1] - seg[:, 1] * d[0]
    diff = p - a
    num = diff[:, 0] * d[1] - diff[:, 1] * d[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    ok = (np.abs(den) > 1e-15) & (t >= -1e-12) & (t <= 1.0 + 1e-12)
    return [a[i] + t[i] * seg[i] for i in np.nonzero(ok)[0]]


def _reconstruct_with_hint(X0, basis0, basis1, polyline1, hint):
    P0 = np.array([X0[0], X0[1], 0.0])
    bl = line_to_basis(P0, np.array([0.0, 0.0, 1.0]), basis0)
    P1, q1 = line_from_basis(bl, basis1)
    d_img = q1[:2]
    if np.linalg.norm(d_img) < 1e-9 * np.linalg.norm(q1):
        raise NoIntersectionError(
            "degenerate motion: the transported ray projects to a point")
    crossings = _segment_crossings(P1[:2], d_img, polyline1)
    if not crossings:
        raise NoIntersectionError("transported line misses the curve image")
    if hint is None:
        if len(crossings) > 1:
            raise AmbiguityError(f"{len(crossings)} crossings and no continuity seed")
        X1 = crossings[0]
    else:
        dist = [float(np.linalg.norm(c - hint)) for c in crossings]
        X1 = crossings[int(np.argmin(dist))]
    # depth: point of the transported ray above/below X1
    t_star = float((X1 - P1[:2]) @ d_img) / float(d_img @ d_img)
    X_w1 = P1 + t_star * q1
    X_w0 = basis0.from_basis(basis1.to_basis(X_w1))
    return X_w0, X1


def reconstruct_point(X0, frame0_pose: FramePose, frame1_pose: FramePose,
                      frame1_image, params: CurveParams) -> np.ndarray:
    """3D point (frame-0 world coordinates) over the image point X0.

    X0 must lie on frame 0's curve image.  Raises CoplanarError for planar
    chord-tangent configurations, NoIntersectionError when the transported
    line misses frame 1's curve, and AmbiguityError when several crossings
    remain and no continuity information is available.
    """
    _coplanar_guard(params)
    basis0 = frame_basis(params, frame0_pose)
    basis1 = frame_basis(params, frame1_pose)
    img1 = normalize_frame(frame1_image)
    X, _ = _reconstruct_with_hint(np.asarray(X0, dtype=float), basis0, basis1,
                                  img1.projected_samples, None)
    return X


def reconstruct_curve(frame_images, poses, params: CurveParams) -> ReconstructedCurve:
    """One 3D point per frame-0 image sample, continuity-seeded in order.

    Ambiguous crossings resolve to the one nearest the previous sample's
    crossing; the first sample seeds from the projection of A.  Per-sample
    failures re-raise with the sample index attached.
    """
    if len(frame_images) < 2 or len(poses) < 2:
        raise RangeError("need at least two frames with recovered poses")
    _coplanar_guard(params)
    img0 = normalize_frame(frame_images[0])
    img1 = normalize_frame(frame_images[1])
    basis0 = frame_basis(params, poses[0])
    basis1 = frame_basis(params, poses[1])
    hint = img1.A_proj
    points = []
    for k, X0 in enumerate(img0.projected_samples):
        try:
            X, hint = _reconstruct_with_hint(X0, basis0, basis1,
                                             img1.projected_samples, hint)
        except (NoIntersectionError, AmbiguityError) as exc:
            exc.sample_index = k
            exc.args = (f"sample {k}: {exc.args[0]}",)
            raise
        points.append(X)
    mirror = "unresolved" if len(frame_images) == 2 else "canonical"
    return ReconstructedCurve(points=np.array(points),
                              source_image_indices=tuple(range(len(points))),
                              mirror_flag=mirror)
