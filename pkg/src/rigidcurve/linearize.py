"""Linearized global estimation by monomial substitution.

Eliminating the per-frame rotation from the two frame equations (by the
resultant of their half-angle quadratic forms) turns each frame into one
polynomial constraint.  With the chord length c fixed, the per-frame radical
sqrt(c^2 - c'^2) is a number, and the constraint is exactly linear in seven
monomials of the remaining unknowns

    a = tg(alpha), b = tg(beta), w = cos(phi), s = sin(phi):

    a^2, b^2, a b w, a^2 b^2, a^2 b^2 w^2, a b s, a^2 b^2 w s.

Substituting one fresh unknown per monomial gives a homogeneous linear
system; its null vector (least squares over superfluous frames) yields the
monomial values up to one common scale, and the variables are recovered
from ratios of monomials via logarithms.  The chord length is found by a
1-D scan: the system's smallest singular value vanishes exactly at the
true c and stays bounded away from zero elsewhere.

This two-stage shape is forced: treating c's powers as additional monomial
unknowns makes the coefficient functions of any one-shot polynomialization
linearly dependent across frames (rank 18 with 57 monomials, in exact
arithmetic), so no full linear solve can pin them.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import RankDeficientError, UnderdeterminedError
from .scene import CurveParams
from .solver import SolveReport, SolverConfig, recover_frame_pose, residual_eq12, _pack
from .errors import BranchConflictError, DomainError, RangeError

#: exponents of (a, b, w, s) for the seven monomial unknowns
MONOMIALS = ((2, 0, 0, 0), (0, 2, 0, 0), (1, 1, 1, 0), (2, 2, 0, 0),
             (2, 2, 2, 0), (1, 1, 0, 1), (2, 2, 1, 1))

_IDX = {e: i for i, e in enumerate(MONOMIALS)}


def monomial_count() -> int:
    """Number of distinct monomial unknowns of the linearized system."""
    return len(MONOMIALS)


def _poly_mul(p, q):
    out = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0.0) + v1 * v2
    return out


def _poly_sub(p, q):
    out = dict(p)
    for e, v in q.items():
        out[e] = out.get(e, 0.0) - v
    return out


def _reduce_s2(p):
    # sin^2(phi) -> 1 - cos^2(phi)
    while True:
        hot = [e for e in p if e[3] >= 2]
        if not hot:
            return p
        out = {}
        for e, v in p.items():
            if e[3] >= 2:
                lo = (e[0], e[1], e[2], e[3] - 2)
                hi = (e[0], e[1], e[2] + 2, e[3] - 2)
                out[lo] = out.get(lo, 0.0) + v
                out[hi] = out.get(hi, 0.0) - v
            else:
                out[e] = out.get(e, 0.0) + v
        p = out


def frame_rows(cp: np.ndarray, dp: np.ndarray, ep: np.ndarray, c: float) -> np.ndarray:
    """Coefficient rows of the per-frame constraint for a candidate c.

    Vectorized over frames: each dictionary value is a length-F array and
    the result has shape (F, 7) with columns ordered as MONOMIALS.
    """
    rho = np.sqrt(c * c - cp * cp)
    one = (0, 0, 0, 0)
    a_ = (1, 0, 0, 0)
    bw = (0, 1, 1, 0)
    bs = (0, 1, 0, 1)
    A1 = {a_: cp * c, one: dp * cp}
    B1 = {a_: 2 * dp * rho}
    C1 = {one: dp * cp, a_: -cp * c}
    A2 = {one: ep * cp, bs: -ep * rho, bw: cp * c}
    B2 = {bw: 2 * ep * rho, bs: 2 * cp * c}
    C2 = {one: ep * cp, bs: ep * rho, bw: -cp * c}
    AC = _poly_sub(_poly_mul(A1, C2), _poly_mul(A2, C1))
    AB = _poly_sub(_poly_mul(A1, B2), _poly_mul(A2, B1))
    BC = _poly_sub(_poly_mul(B1, C2), _poly_mul(B2, C1))
    res = _reduce_s2(_poly_sub(_poly_mul(AC, AC), _poly_mul(AB, BC)))
    rows = np.zeros((cp.size, len(MONOMIALS)))
    top = max(float(np.abs(v).max()) for v in res.values())
    for e, v in res.items():
        i = _IDX.get(e)
        if i is None:
            if float(np.abs(v).max()) > 1e-9 * top:  # pragma: no cover
                raise AssertionError(f"unexpected monomial {e}")
            continue
        rows[:, i] = v
    return rows


def _svd_at(obs: dict, c: float):
    M = frame_rows(obs["c"], obs["d"], obs["e"], c)
    M /= np.linalg.norm(M, axis=1, keepdims=True)
    col = np.linalg.norm(M, axis=0)
    col[col == 0] = 1.0
    _, sv, Vt = np.linalg.svd(M / col, full_matrices=False)
    return sv, Vt[-1] / col


def _scan_chord(obs: dict, cfg: SolverConfig):
    max_cp = float(obs["c"].max())
    grid = max_cp * (1.0 + np.geomspace(1e-6, 4.0, 140))
    scores = np.array([_svd_at(obs, g)[0][-1] for g in grid])
    i0 = int(np.argmin(scores))
    lo = grid[max(0, i0 - 1)]
    hi = grid[min(grid.size - 1, i0 + 1)]
    res = minimize_scalar(lambda cc: _svd_at(obs, cc)[0][-1],
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13})
    c_hat = float(res.x)
    contrast = float(scores.max() / max(scores.min(), 1e-300))
    return c_hat, grid, scores, contrast


def linearized_solve(observations, config: SolverConfig = None) -> SolveReport:
    """Global parameters by the monomial-substitution linear method.

    Raises UnderdeterminedError when there are fewer frames than monomial
    unknowns and RankDeficientError on degenerate motion (constant tau,
    repeated frames, or any motion leaving the null vector ambiguous).
    """
    cfg = config or SolverConfig()
    observations = list(observations)
    if len(observations) < monomial_count():
        raise UnderdeterminedError(
            f"need at least {monomial_count()} frames (one per monomial), "
            f"got {len(observations)}")
    obs = _pack(observations)
    scale = float(np.abs(obs["c"]).max())
    if float(np.ptp(obs["c"])) < 1e-12 * scale:
        raise RankDeficientError("degenerate motion: constant tau across frames")

    c_hat, grid, scores, contrast = _scan_chord(obs, cfg)
    sv, x = _svd_at(obs, c_hat)
    smin, s2 = float(sv[-1] / sv[0]), float(sv[-2] / sv[0])
    if s2 < 1e-8:
        raise RankDeficientError(
            f"null space is not one-dimensional (sigma ratios {smin:g}, {s2:g})")

    m = dict(zip(MONOMIALS, x))
    ref = m[(2, 2, 0, 0)]                      # a^2 b^2
    if abs(ref) < 1e-9 * float(np.abs(x).max()):
        raise RankDeficientError("reference monomial a^2 b^2 vanishes")
    r_a2 = ref / m[(0, 2, 0, 0)]
    r_b2 = ref / m[(2, 0, 0, 0)]
    if r_a2 <= 0 or r_b2 <= 0:
        raise RankDeficientError("inconsistent monomial signs in the null vector")
    a = float(np.exp(0.5 * np.log(r_a2)))
    b = float(np.exp(0.5 * np.log(r_b2)))
    w = float(m[(1, 1, 1, 0)] / ref) * a * b
    s = float(m[(1, 1, 0, 1)] / ref) * a * b
    pyth_gap = abs(w * w + s * s - 1.0)
    norm = float(np.hypot(w, s))
    if norm < 1e-9:
        raise RankDeficientError("cos(phi), sin(phi) monomials vanish jointly")
    phi = float(np.arctan2(s / norm, w / norm)) % (2 * np.pi)
    params = CurveParams(c=c_hat, alpha=float(np.arctan(a)), beta=float(np.arctan(b)),
                         phi=phi)

    residuals = []
    per_frame = []
    pose_failures = 0
    for o in observations:
        try:
            residuals.append(residual_eq12(o, params))
        except (DomainError, RangeError):
            residuals.append(np.pi)
        try:
            per_frame.append(recover_frame_pose(o, params, tol=1e-4))
        except (BranchConflictError, DomainError, RangeError):
            pose_failures += 1
            per_frame.append(None)
    rms = float(np.sqrt(np.mean(np.square(residuals))))
    if rms > 1e-4:
        raise RankDeficientError(
            f"linear solution inconsistent with the frame equations (rms {rms:g}); "
            "motion is degenerate or observations are not in general position")
    per_frame = tuple(p for p in per_frame if p is not None)
    return SolveReport(
        params=params, per_frame=per_frame, residual_rms=rms, iterations=grid.size,
        method="linearized",
        diagnostics={
            "monomial_count": monomial_count(),
            "sigma_min_ratio": smin,
            "sigma_second_ratio": s2,
            "scan_contrast": contrast,
            "pythagoras_gap": pyth_gap,
            "pose_failures": pose_failures,
        })
