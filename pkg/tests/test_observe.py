"""Tests for frame normalization and observable extraction.

Frozen triple below computed from the independent closed forms
d' = c tg(a) cos(d) cos(t) / (cos(t) + tg(a) sin(d) sin(t)) and its A-side
mirror with delta + phi, at (c, alpha, beta, phi, delta, tau) =
(1.5, 0.6, 0.8, 1.0, 0.4, 0.7).
"""

import numpy as np
import pytest

from rigidcurve.errors import DegenerateError, ParallelError
from rigidcurve.observe import extract_observables, normalize_frame
from rigidcurve.scene import (CurveParams, FrameImage, apply_canonical_motion,
                              apply_nuisance, closed_form_observables,
                              derivation_trace, make_test_curve, render_frame)

PARAMS = CurveParams(c=1.5, alpha=0.6, beta=0.8, phi=1.0)


def _frame(params, delta, tau, seed=21):
    curve = make_test_curve(seed, params)
    return render_frame(apply_canonical_motion(curve, delta, tau))


def test_normalize_canonical_image_unchanged():
    img = _frame(PARAMS, 0.4, 0.7)
    norm = normalize_frame(img)
    assert np.allclose(norm.projected_samples, img.projected_samples, atol=1e-12)


def test_normalize_undoes_translation():
    img = _frame(PARAMS, 0.4, 0.7)
    moved = apply_nuisance(img, 0.0, np.array([3.0, 4.0]))
    norm = normalize_frame(moved)
    assert np.allclose(norm.projected_samples, img.projected_samples, atol=1e-10)


def test_collapsed_chord_degenerate():
    pts = np.tile(np.array([1.0, 2.0]), (8, 1))
    img = FrameImage(projected_samples=pts, A_proj=pts[0], B_proj=pts[-1],
                     tangent_dir_at_A_proj=np.array([1.0, 0]),
                     tangent_dir_at_B_proj=np.array([0.0, 1.0]))
    with pytest.raises(DegenerateError):
        normalize_frame(img)


def test_in_plane_curve_observables():
    params = CurveParams(c=1.0, alpha=np.pi / 4, beta=0.6, phi=1.2)
    img = _frame(params, 0.0, 1e-9)
    obs = extract_observables(img)
    assert abs(obs.c_prime - 1.0) < 1e-8
    assert abs(abs(obs.d_prime) - 1.0) < 1e-7  # |d'| = c tg(alpha)


def test_projected_tangent_parallel_to_l1():
    img = _frame(PARAMS, 0.4, 0.7)
    bad = FrameImage(projected_samples=img.projected_samples, A_proj=img.A_proj,
                     B_proj=img.B_proj,
                     tangent_dir_at_A_proj=img.tangent_dir_at_A_proj,
                     tangent_dir_at_B_proj=np.array([0.0, 1.0]))
    with pytest.raises(ParallelError):
        extract_observables(bad)


def test_observables_frozen_triple():
    obs = extract_observables(_frame(PARAMS, 0.4, 0.7))
    assert abs(obs.c_prime - 1.1472632809267327) < 1e-12
    assert abs(obs.d_prime - 0.77196885242034197) < 1e-12
    assert abs(obs.e_prime - 0.14154119316220776) < 1e-12


def test_observables_match_closed_forms():
    rng = np.random.default_rng(22)
    from rigidcurve.scene import random_params, random_script

    for _ in range(25):
        params = random_params(rng)
        script = random_script(rng, params, 1)
        delta, tau = float(script.deltas[0]), float(script.taus[0])
        obs = extract_observables(_frame(params, delta, tau, seed=int(rng.integers(1 << 31))))
        c_cf, d_cf, e_cf = closed_form_observables(params, delta, tau)
        assert abs(obs.c_prime - c_cf) < 1e-10
        assert abs(obs.d_prime - d_cf) < 1e-10
        assert abs(obs.e_prime - e_cf) < 1e-10


def test_observables_match_trace():
    curve = make_test_curve(23, PARAMS)
    tr = derivation_trace(curve, 0.4, 0.7)
    obs = extract_observables(_frame(PARAMS, 0.4, 0.7, seed=23))
    assert abs(abs(obs.d_prime) - abs(tr.AD_p)) < 1e-9
    assert abs(obs.c_prime - tr.AB_p) < 1e-10


def test_chord_shortening():
    obs = extract_observables(_frame(PARAMS, 0.9, 0.55))
    assert abs(obs.c_prime - PARAMS.c * np.cos(0.55)) < 1e-10


def test_isometry_invariance():
    rng = np.random.default_rng(24)
    img = _frame(PARAMS, 0.8, 0.9)
    ref = extract_observables(img)
    for _ in range(20):
        moved = apply_nuisance(img, float(rng.uniform(-np.pi, np.pi)),
                               rng.normal(0, 2, 2))
        got = extract_observables(moved)
        assert abs(got.c_prime - ref.c_prime) < 1e-10
        assert abs(got.d_prime - ref.d_prime) < 1e-10
        assert abs(got.e_prime - ref.e_prime) < 1e-10


def test_rotated_image_same_observables():
    img = _frame(PARAMS, 0.5, 0.6)
    ref = extract_observables(img)
    got = extract_observables(apply_nuisance(img, 1.1, np.zeros(2)))
    assert abs(got.d_prime - ref.d_prime) < 1e-10
    assert abs(got.e_prime - ref.e_prime) < 1e-10
