"""Unit tests for the 3D/2D geometric primitives."""

import numpy as np
import pytest

from rigidcurve.errors import ParallelError, RangeError
from rigidcurve.geometry import (Line2, RigidMotion, intersect_lines_2d,
                                 project_orthogonal, rotate_about_axis,
                                 rotation_about_axis)

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])
O = np.zeros(3)


def test_quarter_turn_about_z():
    p = rotate_about_axis(np.array([0.0, 1.0, 0.0]), O, Z, np.pi / 2)
    assert np.allclose(p, [-1.0, 0.0, 0.0], atol=1e-12)


def test_quarter_turn_about_x():
    p = rotate_about_axis(np.array([0.0, 1.0, 0.0]), O, X, np.pi / 2)
    assert np.allclose(p, [0.0, 0.0, 1.0], atol=1e-12)


def test_zero_angle_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.normal(size=3)
        assert np.allclose(rotate_about_axis(p, rng.normal(size=3), Z, 0.0), p, atol=1e-12)


def test_non_unit_axis_rejected():
    with pytest.raises(RangeError):
        rotate_about_axis(X, O, np.array([0.0, 0.0, 2.0]), 0.3)


def test_distance_to_axis_preserved():
    rng = np.random.default_rng(1)
    for _ in range(200):
        axis_point = rng.normal(size=3)
        axis_dir = rng.normal(size=3)
        axis_dir /= np.linalg.norm(axis_dir)
        p = rng.normal(size=3)
        q = rotate_about_axis(p, axis_point, axis_dir, rng.uniform(-np.pi, np.pi))

        def dist(r):
            v = r - axis_point
            return np.linalg.norm(v - (v @ axis_dir) * axis_dir)

        assert abs(dist(p) - dist(q)) < 1e-12


def test_pairwise_distances_preserved():
    rng = np.random.default_rng(2)
    for _ in range(100):
        axis_point = rng.normal(size=3)
        axis_dir = rng.normal(size=3)
        axis_dir /= np.linalg.norm(axis_dir)
        angle = rng.uniform(-np.pi, np.pi)
        p, q = rng.normal(size=3), rng.normal(size=3)
        rp = rotate_about_axis(p, axis_point, axis_dir, angle)
        rq = rotate_about_axis(q, axis_point, axis_dir, angle)
        assert abs(np.linalg.norm(rp - rq) - np.linalg.norm(p - q)) < 1e-10


def test_rotation_composition_adds_angles():
    rng = np.random.default_rng(3)
    for _ in range(50):
        axis_point = rng.normal(size=3)
        axis_dir = rng.normal(size=3)
        axis_dir /= np.linalg.norm(axis_dir)
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        p = rng.normal(size=3)
        two_step = rotate_about_axis(
            rotate_about_axis(p, axis_point, axis_dir, t1), axis_point, axis_dir, t2)
        one_step = rotate_about_axis(p, axis_point, axis_dir, t1 + t2)
        assert np.allclose(two_step, one_step, atol=1e-10)


def test_projection_drops_z():
    assert np.allclose(project_orthogonal(np.array([1.0, 2.0, 3.0])), [1.0, 2.0])
    assert np.allclose(project_orthogonal(np.array([0.0, 0.0, 5.0])), [0.0, 0.0])


def test_projection_is_linear():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=3), rng.normal(size=3)
    assert np.allclose(project_orthogonal(a + b),
                       project_orthogonal(a) + project_orthogonal(b), atol=1e-14)


def test_projection_ignores_vertical_shift():
    rng = np.random.default_rng(5)
    p = rng.normal(size=3)
    assert np.allclose(project_orthogonal(p), project_orthogonal(p + np.array([0, 0, 7.5])))


def test_axes_cross_at_origin():
    x_axis = Line2(np.zeros(2), np.array([1.0, 0.0]))
    y_axis = Line2(np.zeros(2), np.array([0.0, 1.0]))
    assert np.allclose(intersect_lines_2d(x_axis, y_axis), [0.0, 0.0], atol=1e-14)


def test_diagonal_lines_cross():
    a = Line2(np.zeros(2), np.array([1.0, 1.0]))
    b = Line2(np.array([0.0, 2.0]), np.array([1.0, -1.0]))
    assert np.allclose(intersect_lines_2d(a, b), [1.0, 1.0], atol=1e-12)


def test_parallel_lines_raise():
    a = Line2(np.zeros(2), np.array([1.0, 0.0]))
    b = Line2(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ParallelError):
        intersect_lines_2d(a, b)


def test_line_direction_normalized():
    line = Line2(np.zeros(2), np.array([3.0, 4.0]))
    assert abs(np.linalg.norm(line.direction) - 1.0) < 1e-12
    with pytest.raises(RangeError):
        Line2(np.zeros(2), np.zeros(2))


def test_rigid_motion_validation():
    R = rotation_about_axis(Z, 0.7)
    m = RigidMotion(R, np.array([1.0, 2.0, 3.0]))
    p = np.array([0.5, -0.25, 2.0])
    assert np.allclose(m.apply(p), R @ p + m.translation, atol=1e-14)
    with pytest.raises(RangeError):
        RigidMotion(np.eye(3) * 1.001, np.zeros(3))
    with pytest.raises(RangeError):
        RigidMotion(np.diag([1.0, 1.0, -1.0]), np.zeros(3))  # improper


def test_rigid_motion_compose():
    rng = np.random.default_rng(6)
    a = RigidMotion.about_axis(rng.normal(size=3), np.array([0, 0, 1.0]), 0.4)
    b = RigidMotion.about_axis(rng.normal(size=3), np.array([1.0, 0, 0]), -0.9)
    p = rng.normal(size=3)
    assert np.allclose(a.compose(b).apply(p), a.apply(b.apply(p)), atol=1e-12)
