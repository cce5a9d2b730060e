"""Exact 3D/2D primitives: rotations about arbitrary axes, orthogonal
projection onto the frame plane, and 2D line intersection.

Conventions shared by the whole package: 3D points and directions are
``(3,)`` float arrays, image points are ``(2,)`` float arrays, the frame
plane is z = 0 and orthogonal projection drops z.  Angles are radians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParallelError, RangeError

PARALLEL_TOL = 1e-9


def rotation_about_axis(axis_dir: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a unit axis direction."""
    u = np.asarray(axis_dir, dtype=float)
    n = np.linalg.norm(u)
    if abs(n - 1.0) > 1e-9:
        raise RangeError(f"axis direction must be unit, got norm {n}")
    u = u / n
    c, s = np.cos(angle), np.sin(angle)
    ux, uy, uz = u
    K = np.array([[0.0, -uz, uy], [uz, 0.0, -ux], [-uy, ux, 0.0]])
    return c * np.eye(3) + s * K + (1.0 - c) * np.outer(u, u)


def rotate_about_axis(p: np.ndarray, axis_point: np.ndarray, axis_dir: np.ndarray,
                      angle: float) -> np.ndarray:
    """Rotate ``p`` by ``angle`` about the line through ``axis_point`` along
    unit ``axis_dir``.  Points on the axis and angle 0 are valid."""
    R = rotation_about_axis(axis_dir, angle)
    p = np.asarray(p, dtype=float)
    q = np.asarray(axis_point, dtype=float)
    return q + R @ (p - q)


def project_orthogonal(p: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the frame plane z = 0 (drops z).

    Accepts a single point ``(3,)`` or a stack ``(n, 3)``.
    """
    p = np.asarray(p, dtype=float)
    return p[..., :2].copy()


@dataclass(frozen=True)
class Line2:
    """2D line given by a point and a unit direction."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        pt = np.asarray(self.point, dtype=float)
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n < 1e-15:
            raise RangeError("line direction must be nonzero")
        object.__setattr__(self, "point", pt)
        object.__setattr__(self, "direction", d / n)

    @staticmethod
    def through(p: np.ndarray, q: np.ndarray) -> "Line2":
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return Line2(p, q - p)


def cross2(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def intersect_lines_2d(a: Line2, b: Line2) -> np.ndarray:
    """Unique common point of two 2D lines.

    Raises ParallelError when the unit directions are parallel within
    PARALLEL_TOL, which signals a degenerate configuration.
    """
    den = cross2(a.direction, b.direction)
    if abs(den) < PARALLEL_TOL:
        raise ParallelError("lines are parallel within tolerance")
    diff = b.point - a.point
    t = cross2(diff, b.direction) / den
    return a.point + t * a.direction


@dataclass(frozen=True)
class RigidMotion:
    """Proper rigid motion x -> R x + t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        if np.abs(R @ R.T - np.eye(3)).max() > 1e-10:
            raise RangeError("rotation is not orthonormal within 1e-10")
        if abs(np.linalg.det(R) - 1.0) > 1e-10:
            raise RangeError("rotation must have determinant +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def apply(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return p @ self.rotation.T + self.translation

    def apply_dir(self, d: np.ndarray) -> np.ndarray:
        return np.asarray(d, dtype=float) @ self.rotation.T

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        """Motion equal to applying ``other`` first, then ``self``."""
        return RigidMotion(self.rotation @ other.rotation,
                           self.rotation @ other.translation + self.translation)

    @staticmethod
    def identity() -> "RigidMotion":
        return RigidMotion(np.eye(3), np.zeros(3))

    @staticmethod
    def about_axis(axis_point: np.ndarray, axis_dir: np.ndarray, angle: float) -> "RigidMotion":
        R = rotation_about_axis(axis_dir, angle)
        q = np.asarray(axis_point, dtype=float)
        return RigidMotion(R, q - R @ q)
