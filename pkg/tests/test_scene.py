"""Tests for curve generation, invariants, canonical motion and the
derivation trace.

Frozen expected values below were computed from the closed formula chain
AS = c tg(alpha), AS' = AS cos(delta), SS' = AS sin(delta),
AB' = c cos(tau), S'S'' = SS' sin(tau), AD' = AS' AB' / (AB' + S'S''),
independently of the 3D construction that produces the trace.
"""

import numpy as np
import pytest

from rigidcurve.errors import DegenerateError, PreconditionError, RangeError
from rigidcurve.geometry import rotate_about_axis, rotation_about_axis
from rigidcurve.scene import (Curve3, CurveParams, apply_canonical_motion,
                              curve_invariants, derivation_trace, make_scene,
                              make_test_curve, random_params, random_script,
                              render_frame)


def _straight_curve(A, B, t_A, t_B, n=8):
    t = np.linspace(0.0, 1.0, n)[:, None]
    return Curve3(samples=(1 - t) * A + t * B, tangent_at_A=t_A, tangent_at_B=t_B)


def test_chord_length_by_construction():
    params = CurveParams(c=1.0, alpha=np.pi / 4, beta=np.pi / 4, phi=np.pi / 2)
    curve = make_test_curve(1, params)
    assert abs(np.linalg.norm(curve.B - curve.A) - 1.0) < 1e-12


def test_invariants_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(50):
        params = random_params(rng)
        curve = make_test_curve(int(rng.integers(1 << 31)), params)
        got = curve_invariants(curve)
        assert abs(got.c - params.c) < 1e-9
        assert abs(got.alpha - params.alpha) < 1e-9
        assert abs(got.beta - params.beta) < 1e-9
        dphi = abs(got.phi - params.phi)
        assert min(dphi, 2 * np.pi - dphi) < 1e-9


def test_param_ranges_enforced():
    with pytest.raises(RangeError):
        CurveParams(c=1.0, alpha=0.0, beta=0.5, phi=1.0)
    with pytest.raises(RangeError):
        CurveParams(c=-1.0, alpha=0.5, beta=0.5, phi=1.0)
    with pytest.raises(RangeError):
        CurveParams(c=1.0, alpha=0.5, beta=np.pi / 2, phi=1.0)


def test_invariants_worked_example():
    curve = _straight_curve(np.zeros(3), np.array([1.0, 0, 0]),
                            t_A=np.array([1.0, 0, 1.0]) / np.sqrt(2),
                            t_B=np.array([1.0, 1.0, 0]) / np.sqrt(2))
    params = curve_invariants(curve)
    assert abs(params.c - 1.0) < 1e-12
    assert abs(params.alpha - np.pi / 4) < 1e-12
    assert abs(params.beta - np.pi / 4) < 1e-12
    assert abs(params.phi - np.pi / 2) < 1e-12


def test_invariants_rigid_invariance():
    rng = np.random.default_rng(12)
    params = CurveParams(c=1.4, alpha=0.7, beta=0.9, phi=2.2)
    curve = make_test_curve(5, params)
    for _ in range(20):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        R = rotation_about_axis(axis, rng.uniform(-np.pi, np.pi))
        shift = rng.normal(size=3)
        moved = Curve3(curve.samples @ R.T + shift,
                       R @ curve.tangent_at_A, R @ curve.tangent_at_B)
        got = curve_invariants(moved)
        assert abs(got.c - params.c) < 1e-10
        assert abs(got.alpha - params.alpha) < 1e-10
        assert abs(got.beta - params.beta) < 1e-10
        dphi = abs(got.phi - params.phi)
        assert min(dphi, 2 * np.pi - dphi) < 1e-10


def test_tangent_parallel_to_chord_degenerate():
    curve = _straight_curve(np.zeros(3), np.array([1.0, 0, 0]),
                            t_A=np.array([1.0, 0, 0]),
                            t_B=np.array([1.0, 1.0, 0]) / np.sqrt(2))
    with pytest.raises(DegenerateError):
        curve_invariants(curve)


def test_motion_identity():
    curve = make_test_curve(2, CurveParams(c=1.2, alpha=0.5, beta=0.8, phi=1.1))
    moved = apply_canonical_motion(curve, 0.0, 0.0)
    assert np.allclose(moved.samples, curve.samples, atol=1e-12)


def test_motion_shortens_projected_chord():
    params = CurveParams(c=1.7, alpha=0.6, beta=0.4, phi=0.9)
    curve = make_test_curve(3, params)
    for delta, tau in [(0.3, 0.5), (1.2, 1.1), (2.0, 0.2)]:
        moved = apply_canonical_motion(curve, delta, tau)
        img = render_frame(moved)
        assert abs(np.linalg.norm(img.B_proj - img.A_proj) - params.c * np.cos(tau)) < 1e-10


def test_motion_matches_axis_rotation_oracle():
    # oracle: compose the generic axis rotations point by point
    params = CurveParams(c=1.5, alpha=0.6, beta=0.8, phi=1.0)
    curve = make_test_curve(4, params, n_samples=16)
    delta, tau = 0.3, 0.5
    moved = apply_canonical_motion(curve, delta, tau)
    origin = np.zeros(3)
    for p, q in zip(curve.samples, moved.samples):
        step1 = rotate_about_axis(p, origin, np.array([1.0, 0, 0]), delta)
        step2 = rotate_about_axis(step1, origin, np.array([0.0, -1.0, 0]), tau)
        assert np.allclose(q, step2, atol=1e-12)


def test_motion_preserves_invariants():
    params = CurveParams(c=2.0, alpha=0.9, beta=0.3, phi=5.0)
    curve = make_test_curve(6, params)
    moved = apply_canonical_motion(curve, 1.1, 0.7)
    got = curve_invariants(moved)
    assert abs(got.c - params.c) < 1e-10
    assert abs(got.alpha - params.alpha) < 1e-10
    assert abs(got.beta - params.beta) < 1e-10
    dphi = abs(got.phi - params.phi)
    assert min(dphi, 2 * np.pi - dphi) < 1e-10


def test_motion_requires_canonical_pose():
    params = CurveParams(c=1.0, alpha=0.5, beta=0.5, phi=1.0)
    curve = make_test_curve(7, params)
    shifted = Curve3(curve.samples + np.array([0.1, 0.0, 0.0]),
                     curve.tangent_at_A, curve.tangent_at_B)
    with pytest.raises(PreconditionError):
        apply_canonical_motion(shifted, 0.1, 0.1)


def test_trace_simple_values():
    curve = make_test_curve(8, CurveParams(c=1.0, alpha=np.pi / 4, beta=0.5, phi=1.0))
    tr = derivation_trace(curve, 0.4, 0.7)
    assert abs(tr.AS - 1.0) < 1e-12  # AS = c tg(alpha)
    tr0 = derivation_trace(curve, 0.0, 0.7)
    assert abs(tr0.AS_p - tr0.AS) < 1e-12
    assert abs(tr0.SS_p) < 1e-12


def test_trace_frozen_values():
    curve = make_test_curve(9, CurveParams(c=1.5, alpha=0.6, beta=0.8, phi=1.0))
    tr = derivation_trace(curve, 0.4, 0.7)
    assert abs(tr.AS - 1.0262052125125385) < 1e-12
    assert abs(tr.AS_p - 0.94519759308774065) < 1e-12
    assert abs(tr.SS_p - 0.39962313272512917) < 1e-12
    assert abs(tr.AB_p - 1.1472632809267327) < 1e-12
    assert abs(tr.S_pS_pp - 0.25744429033086352) < 1e-12
    assert abs(tr.AD_p - 0.77196885242034186) < 1e-12
    assert abs(tr.D_pS_p - 0.1732287406673988) < 1e-12


def test_trace_relations_randomized():
    rng = np.random.default_rng(13)
    for _ in range(100):
        params = random_params(rng)
        curve = make_test_curve(int(rng.integers(1 << 31)), params, n_samples=8)
        delta = rng.uniform(0.05, np.pi - 0.05)
        tau = rng.uniform(0.05, np.pi / 2 - 0.05)
        tr = derivation_trace(curve, delta, tau)
        assert abs(tr.AS / params.c - np.tan(params.alpha)) < 1e-9
        assert abs(tr.AS_p / tr.AS - np.cos(delta)) < 1e-9
        assert abs(tr.SS_p / tr.AS - np.sin(delta)) < 1e-9
        assert abs(tr.AB_p / params.c - np.cos(tau)) < 1e-9
        assert abs(tr.S_pS_pp / tr.SS_p - np.sin(tau)) < 1e-9
        assert abs(tr.AS_p - (tr.AD_p + tr.D_pS_p)) < 1e-9
        assert abs(tr.AD_p / tr.D_pS_p - tr.AB_p / tr.S_pS_pp) < 1e-9


def test_trace_degenerate_tangent():
    curve = _straight_curve(np.zeros(3), np.array([1.0, 0, 0]),
                            t_A=np.array([1.0, 0, 1.0]) / np.sqrt(2),
                            t_B=np.array([0.0, 1.0, 0]))
    with pytest.raises(DegenerateError):
        derivation_trace(curve, 0.3, 0.4)


def test_render_in_plane_curve():
    params = CurveParams(c=1.0, alpha=0.4, beta=0.6, phi=1.3)
    curve = make_test_curve(10, params)
    img = render_frame(curve)
    assert np.allclose(img.projected_samples, curve.samples[:, :2], atol=1e-14)
    assert np.allclose(img.A_proj, [0, 0], atol=1e-14)


def test_render_vertical_tangent_degenerate():
    curve = _straight_curve(np.zeros(3), np.array([1.0, 0, 0]),
                            t_A=np.array([0.0, 0, 1.0]),
                            t_B=np.array([1.0, 1.0, 0]) / np.sqrt(2))
    with pytest.raises(DegenerateError):
        render_frame(curve)


def test_scene_generation_is_deterministic():
    a = make_scene(99, n_frames=4)
    b = make_scene(99, n_frames=4)
    assert a.params == b.params
    for fa, fb in zip(a.frames, b.frames):
        assert np.array_equal(fa.projected_samples, fb.projected_samples)


def test_script_respects_margins():
    rng = np.random.default_rng(14)
    params = random_params(rng)
    script = random_script(rng, params, 40)
    assert (script.deltas >= 0.05).all() and (script.deltas <= np.pi - 0.05).all()
    assert (script.taus >= 0.05).all() and (script.taus <= np.pi / 2 - 0.05).all()
    combined = (script.deltas + params.phi) % (2 * np.pi)
    assert (combined >= 0.05).all() and (combined <= np.pi - 0.05).all()
