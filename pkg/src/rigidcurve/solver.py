"""The per-frame equation system and global parameter estimation.

Per frame, with observables (c', d', e') and candidate invariants
(c, alpha, beta, phi), the auxiliary terms are

    q1 = c' c tg(alpha),  p1 = d' c tg(alpha) sin(arccos(c'/c)),
    q2 = c' c tg(beta),   p2 = e' c tg(beta)  sin(arccos(c'/c)),
    omega_j = atan2(p_j, q_j),

and the system reads

    p1 sin(delta)        = q1 cos(delta)        - d'c'
    p2 sin(delta + phi)  = q2 cos(delta + phi)  - e'c'

whose per-frame unknown delta cancels in the frame-independent constraint

    arccos(e'c'/hyp2) - arccos(d'c'/hyp1) = phi + omega2 - omega1.

d' and e' enter the formulas signed (the signs carry the delta branch); the
auxiliary angles are therefore computed with atan2 so the cosine identities
hold on the whole generated motion range.  The magnitudes |d'|, |e'| are
the unsigned segment lengths of the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (BranchConflictError, DomainError, InsufficientFramesError,
                     NoConvergenceError, PoleError, RangeError)
from .observe import FrameObservation
from .scene import CurveParams

CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class AuxTerms:
    """Frame terms mixing observables with the global unknowns."""

    q1: float
    p1: float
    q2: float
    p2: float
    omega1: float
    omega2: float


@dataclass(frozen=True)
class FramePose:
    """Recovered per-frame motion with branch bookkeeping.

    depth_sign marks which global mirror the pose describes; the solver
    always reports the canonical representative ("front"), the mirrored
    world ("back") projects identically and is not distinguishable from
    orthographic images.
    """

    delta: float
    tau: float
    delta_branch: str = "plus"
    depth_sign: str = "front"
    frame_index: int = 0


@dataclass(frozen=True)
class SolveReport:
    params: CurveParams
    per_frame: tuple
    residual_rms: float
    iterations: int
    method: str
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 200
    lambda0: float = 1e-3
    lambda_down: float = 0.5
    lambda_up: float = 4.0
    fd_step: float = 1e-7
    n_phi_starts: int = 16
    c_grid_exponents: tuple = (6, 5, 4, 3, 2, 1, 0, -1, -2)
    noise_tol: float = None
    pose_tol: float = 1e-6

    @property
    def effective_tol(self) -> float:
        return self.tol if self.noise_tol is None else self.noise_tol


def aux_terms(obs: FrameObservation, params: CurveParams) -> AuxTerms:
    """Auxiliary frame terms; requires c > c' so arccos(c'/c) exists."""
    c = params.c
    if c <= obs.c_prime:
        raise RangeError(f"c = {c} must exceed c' = {obs.c_prime}")
    sigma = np.sqrt(1.0 - (obs.c_prime / c) ** 2)
    ta, tb = np.tan(params.alpha), np.tan(params.beta)
    q1 = obs.c_prime * c * ta
    p1 = obs.d_prime * c * ta * sigma
    q2 = obs.c_prime * c * tb
    p2 = obs.e_prime * c * tb * sigma
    return AuxTerms(q1=q1, p1=p1, q2=q2, p2=p2,
                    omega1=float(np.arctan2(p1, q1)), omega2=float(np.arctan2(p2, q2)))


def residual_eq8(obs: FrameObservation, params: CurveParams, delta: float):
    """Residuals of the two per-frame equations at a candidate delta.

    Returns (residual for the B-side equation, residual for the A-side
    mirror equation); both vanish at the true delta of a noise-free frame.
    """
    t = aux_terms(obs, params)
    r_b = t.p1 * np.sin(delta) - (t.q1 * np.cos(delta) - obs.d_prime * obs.c_prime)
    r_a = (t.p2 * np.sin(delta + params.phi)
           - (t.q2 * np.cos(delta + params.phi) - obs.e_prime * obs.c_prime))
    return float(r_b), float(r_a)


def _fold(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def _arccos_arg(num: float, p: float, q: float) -> float:
    arg = num / np.hypot(p, q)
    if abs(arg) > 1.0 + CLAMP_TOL:
        raise DomainError(f"arccos argument {arg} out of range; inconsistent parameters")
    return float(np.clip(arg, -1.0, 1.0))


def residual_eq12(obs: FrameObservation, params: CurveParams) -> float:
    """Frame-independent residual, folded into (-pi, pi].

    Zero at the true parameters of a noise-free frame.  Raises DomainError
    when an arccos argument exceeds 1 by more than the clamp tolerance.
    """
    t = aux_terms(obs, params)
    a1 = np.arccos(_arccos_arg(obs.d_prime * obs.c_prime, t.p1, t.q1))
    a2 = np.arccos(_arccos_arg(obs.e_prime * obs.c_prime, t.p2, t.q2))
    return float(_fold(a2 - a1 - (params.phi + t.omega2 - t.omega1)))


def residual_quasi_poly(obs: FrameObservation, params: CurveParams) -> float:
    """Quasi-polynomial form of the frame constraint, relative-scaled.

    With s1, s2 the squared tangents of the two arccos terms and
    y = tg^2(phi + omega2 - omega1), evaluates

        s2^2 + s1^2 + y^2 + y^2 s2^2 s1^2 - 2 s1 s2 - 2 y s2 - 2 y s2^2 s1
        - 2 y s1 - 2 y s2 s1^2 - 2 y^2 s2 s1 - 8 y s2 s1

    divided by the magnitude of its largest term.  Vanishes wherever the
    folded angle residual vanishes.  Raises PoleError at the tangent pole.
    """
    t = aux_terms(obs, params)
    big_phi = _fold(params.phi + t.omega2 - t.omega1)
    if abs(abs(big_phi) - np.pi / 2) < 1e-9:
        raise PoleError("phi + omega2 - omega1 at the tangent pole")
    a1 = np.arccos(_arccos_arg(obs.d_prime * obs.c_prime, t.p1, t.q1))
    a2 = np.arccos(_arccos_arg(obs.e_prime * obs.c_prime, t.p2, t.q2))
    s1 = np.tan(a1) ** 2
    s2 = np.tan(a2) ** 2
    y = np.tan(big_phi) ** 2
    terms = np.array([s2**2, s1**2, y**2, y**2 * s2**2 * s1**2, -2 * s1 * s2,
                      -2 * y * s2, -2 * y * s2**2 * s1, -2 * y * s1,
                      -2 * y * s2 * s1**2, -2 * y**2 * s2 * s1, -8 * y * s2 * s1])
    scale = max(1.0, float(np.abs(terms).max()))
    return float(terms.sum() / scale)


def recover_frame_pose(obs: FrameObservation, params: CurveParams,
                       tol: float = 1e-6) -> FramePose:
    """Per-frame motion from observables and known global parameters.

    tau = arccos(c'/c) always; delta has two arccos branches and the one
    consistent with the A-side equation is returned.  Raises
    BranchConflictError when neither branch is consistent (wrong params).
    """
    t = aux_terms(obs, params)
    tau = float(np.arccos(np.clip(obs.c_prime / params.c, -1.0, 1.0)))
    a1 = np.arccos(_arccos_arg(obs.d_prime * obs.c_prime, t.p1, t.q1))
    rhs2 = _arccos_arg(obs.e_prime * obs.c_prime, t.p2, t.q2)
    best = None
    for branch, a in (("plus", a1), ("minus", -a1)):
        delta = (a - t.omega1) % (2 * np.pi)
        err = abs(np.cos(delta + params.phi + t.omega2) - rhs2)
        if err <= tol and (best is None or err < best[2]):
            best = (branch, delta, err)
    if best is None:
        raise BranchConflictError("no delta branch satisfies the A-side equation")
    return FramePose(delta=float(best[1]), tau=tau, delta_branch=best[0],
                     depth_sign="front", frame_index=obs.frame_index)


# ---------------------------------------------------------------------------
# Global nonlinear estimation
# ---------------------------------------------------------------------------


def _pack(observations) -> dict:
    return {
        "c": np.array([o.c_prime for o in observations]),
        "d": np.array([o.d_prime for o in observations]),
        "e": np.array([o.e_prime for o in observations]),
    }


def _residual_vector(x: np.ndarray, obs: dict) -> np.ndarray:
    """Vectorized folded residuals with a smooth-ish out-of-domain penalty."""
    c, alpha, beta, phi = x
    cp, dp, ep = obs["c"], obs["d"], obs["e"]
    sigma = np.sqrt(np.maximum(0.0, 1.0 - (cp / c) ** 2))
    ta, tb = np.tan(alpha), np.tan(beta)
    q1, p1 = cp * c * ta, dp * c * ta * sigma
    q2, p2 = cp * c * tb, ep * c * tb * sigma
    w1 = np.arctan2(p1, q1)
    w2 = np.arctan2(p2, q2)
    g1 = dp * cp / np.hypot(p1, q1)
    g2 = ep * cp / np.hypot(p2, q2)
    pen = (np.maximum(0.0, np.abs(g1) - 1.0) + np.maximum(0.0, np.abs(g2) - 1.0))
    a1 = np.arccos(np.clip(g1, -1.0, 1.0))
    a2 = np.arccos(np.clip(g2, -1.0, 1.0))
    r = _fold(a2 - a1 - (phi + w2 - w1))
    return np.where(pen > 0.0, np.pi + pen, r)


def _project_box(x: np.ndarray, c_min: float) -> np.ndarray:
    eps = 1e-9
    x = x.copy()
    x[0] = max(x[0], c_min)
    x[1] = min(max(x[1], eps), np.pi / 2 - eps)
    x[2] = min(max(x[2], eps), np.pi / 2 - eps)
    return x


def _levenberg(x0: np.ndarray, obs: dict, cfg: SolverConfig, c_min: float):
    """Damped least squares on the folded frame residuals."""
    x = _project_box(x0, c_min)
    r = _residual_vector(x, obs)
    cost = float(r @ r)
    lam = cfg.lambda0
    n_iter = 0
    for n_iter in range(1, cfg.max_iter + 1):
        J = np.empty((r.size, 4))
        for j in range(4):
            h = cfg.fd_step * max(1.0, abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            xp, xm = _project_box(xp, c_min), _project_box(xm, c_min)
            dj = xp[j] - xm[j]
            if dj == 0.0:
                J[:, j] = 0.0
            else:
                J[:, j] = (_residual_vector(xp, obs) - _residual_vector(xm, obs)) / dj
        g = J.T @ r
        A = J.T @ J
        improved = False
        for _ in range(24):
            try:
                step = np.linalg.solve(A + lam * np.diag(np.maximum(np.diag(A), 1e-12)), -g)
            except np.linalg.LinAlgError:
                step = -g / max(lam, 1e-12)
            x_new = _project_box(x + step, c_min)
            r_new = _residual_vector(x_new, obs)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam * cfg.lambda_down, 1e-14)
                improved = True
                break
            lam *= cfg.lambda_up
            if lam > 1e14:
                break
        rms = np.sqrt(cost / r.size)
        if rms <= cfg.effective_tol or not improved:
            break
    return x, np.sqrt(cost / r.size), n_iter


def solve_global(observations, config: SolverConfig = None) -> SolveReport:
    """Estimate (c, alpha, beta, phi) from at least four frames.

    Multi-start damped least squares over the folded frame residuals:
    phi on a regular grid, c on a grid above the largest projected chord,
    alpha = beta = pi/4.  Starts run in a fixed order and the first one
    reaching the tolerance wins, which keeps the result independent of
    any parallel evaluation strategy.
    """
    cfg = config or SolverConfig()
    observations = list(observations)
    if len(observations) < 4:
        raise InsufficientFramesError(
            f"insufficient frames (need 4), got {len(observations)}")
    if any(o.c_prime <= 0 for o in observations):
        raise RangeError("all c' must be positive")
    obs = _pack(observations)
    max_cp = float(obs["c"].max())
    c_min = max_cp * (1.0 + 1e-12)
    best = None
    total_iter = 0
    for k in range(cfg.n_phi_starts):
        phi0 = 2 * np.pi * k / cfg.n_phi_starts
        for j in cfg.c_grid_exponents:
            x0 = np.array([max_cp * (1.0 + 2.0 ** (-j)), np.pi / 4, np.pi / 4, phi0])
            x, rms, it = _levenberg(x0, obs, cfg, c_min)
            total_iter += it
            if best is None or rms < best[1]:
                best = (x, rms)
            if rms <= cfg.effective_tol:
                break
        if best[1] <= cfg.effective_tol:
            break
    x, rms = best
    params = CurveParams(c=float(x[0]), alpha=float(x[1]), beta=float(x[2]),
                         phi=float(x[3]) % (2 * np.pi))
    per_frame = []
    pose_failures = 0
    for o in observations:
        try:
            per_frame.append(recover_frame_pose(o, params, tol=max(cfg.pose_tol, 10 * rms)))
        except (BranchConflictError, DomainError, RangeError):
            pose_failures += 1
            per_frame.append(FramePose(delta=float("nan"), tau=float("nan"),
                                       delta_branch="plus", depth_sign="front",
                                       frame_index=o.frame_index))
    report = SolveReport(params=params, per_frame=tuple(per_frame),
                         residual_rms=float(rms), iterations=total_iter,
                         method="nonlinear",
                         diagnostics={"pose_failures": pose_failures,
                                      "max_c_prime": max_cp})
    if rms > cfg.effective_tol:
        raise NoConvergenceError(
            f"no start reached tolerance {cfg.effective_tol:g}; best rms {rms:g}",
            report=report)
    return report
