"""Synthetic rigid 3D curves, the canonical two-rotation per-frame motion,
and rendered orthographic frames with projected endpoint tangents.

Canonical pose: endpoint A at the origin, the chord AB along +x, and the
tangent line at B lying in the frame plane z = 0.  The per-frame motion is a
rotation by delta about the chord AB followed by a rotation by tau about the
in-plane line l1 (the y-axis), in the sense that lifts B toward +z.

Orientation conventions (these make the whole equation system close exactly;
see the solver module):

* tangent directions are compared after normalizing them "forward", i.e.
  with positive component along AB;
* the dihedral angle phi is the signed angle, about the AB direction, from
  the forward B-tangent's normal component to the forward A-tangent's
  normal component, folded into [0, 2pi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, PreconditionError, RangeError
from .geometry import Line2, intersect_lines_2d, project_orthogonal, rotation_about_axis

_CANON_TOL = 1e-9


@dataclass(frozen=True)
class CurveParams:
    """Global curve invariants, fixed through all frames."""

    c: float
    alpha: float
    beta: float
    phi: float

    def __post_init__(self):
        if not (self.c > 0):
            raise RangeError(f"c must be positive, got {self.c}")
        for name, val in (("alpha", self.alpha), ("beta", self.beta)):
            if not (0.0 < val < np.pi / 2):
                raise RangeError(f"{name} must lie in (0, pi/2), got {val}")
        if not (0.0 <= self.phi < 2 * np.pi):
            raise RangeError(f"phi must lie in [0, 2pi), got {self.phi}")

    def as_array(self) -> np.ndarray:
        return np.array([self.c, self.alpha, self.beta, self.phi])


@dataclass(frozen=True)
class Curve3:
    """Rigid 3D curve: ordered samples plus exact endpoint tangents.

    A is the first sample, B the last.  Tangents are unit vectors along the
    tangent lines at A and B (orientation is not significant).
    """

    samples: np.ndarray
    tangent_at_A: np.ndarray
    tangent_at_B: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3 or s.shape[0] < 8:
            raise RangeError("samples must be an (n>=8, 3) array")
        if np.linalg.norm(s[0] - s[-1]) < 1e-12:
            raise RangeError("endpoints A and B must be distinct")
        if (np.linalg.norm(np.diff(s, axis=0), axis=1) < 1e-15).any():
            raise RangeError("consecutive samples must be distinct")
        tA = np.asarray(self.tangent_at_A, dtype=float)
        tB = np.asarray(self.tangent_at_B, dtype=float)
        for t in (tA, tB):
            if abs(np.linalg.norm(t) - 1.0) > 1e-9:
                raise RangeError("endpoint tangents must be unit vectors")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "tangent_at_A", tA)
        object.__setattr__(self, "tangent_at_B", tB)

    @property
    def A(self) -> np.ndarray:
        return self.samples[0]

    @property
    def B(self) -> np.ndarray:
        return self.samples[-1]


@dataclass(frozen=True)
class MotionScript:
    """Per-frame motion angles plus optional in-plane nuisance."""

    deltas: np.ndarray
    taus: np.ndarray
    inplane_rot: np.ndarray = None
    inplane_shift: np.ndarray = None

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.deltas, dtype=float))
        t = np.atleast_1d(np.asarray(self.taus, dtype=float))
        if d.shape != t.shape or d.size < 1:
            raise RangeError("deltas and taus must be equal-length, nonempty")
        rot = self.inplane_rot
        shift = self.inplane_shift
        rot = np.zeros_like(d) if rot is None else np.asarray(rot, dtype=float)
        shift = np.zeros((d.size, 2)) if shift is None else np.asarray(shift, dtype=float)
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "taus", t)
        object.__setattr__(self, "inplane_rot", rot)
        object.__setattr__(self, "inplane_shift", shift)

    def __len__(self) -> int:
        return self.deltas.size


@dataclass(frozen=True)
class FrameImage:
    """One orthographic frame: projected samples and tangent directions."""

    projected_samples: np.ndarray
    A_proj: np.ndarray
    B_proj: np.ndarray
    tangent_dir_at_A_proj: np.ndarray
    tangent_dir_at_B_proj: np.ndarray
    index: int = 0


@dataclass(frozen=True)
class DerivationTrace:
    """Signed segment coordinates of the auxiliary construction.

    AS, SS_p, S_pS_pp and AB_p are nonnegative lengths; AS_p, AD_p and
    D_pS_p are signed coordinates along l1, oriented toward the initial
    position of S.
    """

    AS: float
    AS_p: float
    SS_p: float
    S_pS_pp: float
    AD_p: float
    D_pS_p: float
    AB_p: float


def _rot_about_chord(delta: float) -> np.ndarray:
    return rotation_about_axis(np.array([1.0, 0.0, 0.0]), delta)


def _rot_about_l1(tau: float) -> np.ndarray:
    # about the y-axis, in the sense lifting +x toward +z
    return rotation_about_axis(np.array([0.0, -1.0, 0.0]), tau)


def canonical_motion_matrix(delta: float, tau: float) -> np.ndarray:
    """Rotation matrix of the canonical motion (delta about AB, tau about l1)."""
    return _rot_about_l1(tau) @ _rot_about_chord(delta)


def canonical_endpoints(params: CurveParams):
    """Canonical A, B and forward endpoint tangent directions for params."""
    c, al, be, ph = params.c, params.alpha, params.beta, params.phi
    A = np.zeros(3)
    B = np.array([c, 0.0, 0.0])
    t_B = np.array([np.cos(al), -np.sin(al), 0.0])
    t_A = np.array([np.cos(be), -np.sin(be) * np.cos(ph), -np.sin(be) * np.sin(ph)])
    return A, B, t_A, t_B


def make_test_curve(seed: int, params: CurveParams, n_samples: int = 64) -> Curve3:
    """Deterministic smooth test curve realizing the given invariants.

    A cubic Hermite arc between the canonical endpoints (with exact endpoint
    tangents) plus a random polynomial wiggle that vanishes to second order
    at both ends, so the invariants are exact by construction.
    """
    if n_samples < 8:
        raise RangeError("need at least 8 samples")
    A, B, t_A, t_B = canonical_endpoints(params)
    rng = np.random.default_rng(seed)
    c = params.c
    t = np.linspace(0.0, 1.0, n_samples)
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    m_A = 1.2 * c * t_A
    m_B = 1.2 * c * t_B
    base = (np.outer(h00, A) + np.outer(h10, m_A)
            + np.outer(h01, B) + np.outer(h11, m_B))
    for _ in range(32):
        coef = rng.normal(0.0, 0.08 * c, size=(4, 3))
        poly = coef[0] + np.outer(t, coef[1]) + np.outer(t**2, coef[2]) + np.outer(t**3, coef[3])
        bump = (t**2 * (1 - t) ** 2)[:, None]
        samples = base + bump * poly
        if (np.linalg.norm(np.diff(samples, axis=0), axis=1) > 1e-12).all():
            return Curve3(samples, t_A, t_B)
    raise RangeError("could not generate distinct samples")  # pragma: no cover


def _forward(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    return t if float(t @ u) > 0 else -t


def curve_invariants(curve: Curve3) -> CurveParams:
    """Chord length, chord-tangent angles and the dihedral angle.

    Independent of any rigid motion applied to the curve and of the stored
    tangent orientations.  Raises DegenerateError if a tangent is parallel
    to the chord.
    """
    A, B = curve.A, curve.B
    c = float(np.linalg.norm(B - A))
    u = (B - A) / c
    t_B = curve.tangent_at_B / np.linalg.norm(curve.tangent_at_B)
    t_A = curve.tangent_at_A / np.linalg.norm(curve.tangent_at_A)
    alpha = float(np.arccos(np.clip(abs(t_B @ u), 0.0, 1.0)))
    beta = float(np.arccos(np.clip(abs(t_A @ u), 0.0, 1.0)))
    for name, ang in (("B", alpha), ("A", beta)):
        if ang < 1e-9:
            raise DegenerateError(f"tangent at {name} is parallel to the chord")
    TB = _forward(t_B, u)
    TA = _forward(t_A, u)
    wB = TB - (TB @ u) * u
    wA = TA - (TA @ u) * u
    wB /= np.linalg.norm(wB)
    wA /= np.linalg.norm(wA)
    phi = float(np.arctan2(u @ np.cross(wB, wA), wB @ wA)) % (2 * np.pi)
    return CurveParams(c=c, alpha=alpha, beta=beta, phi=phi)


def _check_canonical(curve: Curve3) -> None:
    A, B = curve.A, curve.B
    scale = max(1.0, float(np.linalg.norm(B)))
    if np.linalg.norm(A) > _CANON_TOL * scale:
        raise PreconditionError("A must sit at the origin")
    if B[0] <= 0 or max(abs(B[1]), abs(B[2])) > _CANON_TOL * scale:
        raise PreconditionError("B must lie on the positive x axis")
    if abs(curve.tangent_at_B[2]) > _CANON_TOL:
        raise PreconditionError("tangent at B must lie in the frame plane")


def apply_canonical_motion(curve: Curve3, delta: float, tau: float) -> Curve3:
    """Rotate a canonically positioned curve by delta about AB, then by tau
    about l1.  A stays at the origin (it lies on both axes)."""
    _check_canonical(curve)
    R = canonical_motion_matrix(delta, tau)
    return Curve3(curve.samples @ R.T, R @ curve.tangent_at_A, R @ curve.tangent_at_B)


def render_frame(curve: Curve3, index: int = 0) -> FrameImage:
    """Project the curve and its endpoint tangent directions onto z = 0."""
    pts = project_orthogonal(curve.samples)
    dirs = []
    for name, t3 in (("A", curve.tangent_at_A), ("B", curve.tangent_at_B)):
        d = t3[:2]
        n = np.linalg.norm(d)
        if n < 1e-12:
            raise DegenerateError(f"tangent at {name} is perpendicular to the frame plane")
        dirs.append(d / n)
    return FrameImage(projected_samples=pts, A_proj=pts[0], B_proj=pts[-1],
                      tangent_dir_at_A_proj=dirs[0], tangent_dir_at_B_proj=dirs[1],
                      index=index)


def derivation_trace(curve: Curve3, delta: float, tau: float) -> DerivationTrace:
    """Explicit construction of S, S', S'' and D' with all segment values.

    The curve must be canonically positioned.  The tangent line at B must
    cross the plane p1 (x = 0); otherwise S is undefined.
    """
    _check_canonical(curve)
    if not (0.0 < tau < np.pi / 2):
        raise RangeError(f"tau must lie in (0, pi/2), got {tau}")
    B = curve.B
    t_B = curve.tangent_at_B
    if abs(t_B[0]) < 1e-9:
        raise DegenerateError("tangent at B is parallel to the plane p1")
    S0 = B - (B[0] / t_B[0]) * t_B           # tangent line at B crossed with x = 0
    AS = float(np.linalg.norm(S0))
    e_hat = S0 / AS                            # l1 orientation, toward initial S
    R_delta = _rot_about_chord(delta)
    S = R_delta @ S0
    AS_p = float(S @ e_hat)                    # S' = projection of S onto l1
    SS_p = abs(S[2])
    M = _rot_about_l1(tau)
    S_m = M @ S
    B_m = M @ B
    S_pp = project_orthogonal(S_m)
    B_p = project_orthogonal(B_m)
    S_p2 = np.array([0.0, S[1]])
    S_pS_pp = float(np.linalg.norm(S_pp - S_p2))
    AB_p = float(np.linalg.norm(B_p))
    D_p = intersect_lines_2d(Line2.through(B_p, S_pp), Line2(np.zeros(2), e_hat[:2]))
    AD_p = float(D_p @ e_hat[:2])
    return DerivationTrace(AS=AS, AS_p=AS_p, SS_p=SS_p, S_pS_pp=S_pS_pp,
                           AD_p=AD_p, D_pS_p=AS_p - AD_p, AB_p=AB_p)


def closed_form_observables(params: CurveParams, delta: float, tau: float):
    """Noise-free (c', d', e') of a canonical frame, by the closed formulas.

    Used as an independent cross-check of the rendered-image extraction.
    """
    c, al, be, ph = params.c, params.alpha, params.beta, params.phi
    ct, st = np.cos(tau), np.sin(tau)
    ta, tb = np.tan(al), np.tan(be)
    c_p = c * ct
    d_p = c * ta * np.cos(delta) * ct / (ct + ta * np.sin(delta) * st)
    e_p = c * tb * np.cos(delta + ph) * ct / (ct + tb * np.sin(delta + ph) * st)
    return c_p, d_p, e_p


# ---------------------------------------------------------------------------
# Randomized scene generation
# ---------------------------------------------------------------------------

#: margins used by generated scripts: motion angles stay this far away from
#: the degenerate boundaries deferred by the construction.
SCRIPT_MARGIN = 0.05
POLE_MARGIN = 0.02


@dataclass(frozen=True)
class Scene:
    """A generated curve, its motion script and the rendered frames."""

    seed: int
    params: CurveParams
    curve: Curve3
    script: MotionScript
    frames: list = field(default_factory=list)
    noise_sigma: float = 0.0


def random_params(rng: np.random.Generator, c_range=(0.8, 2.2),
                  angle_margin: float = 0.2, phi_margin: float = 0.15) -> CurveParams:
    """Random generic curve invariants.

    phi keeps clear of 0 and pi (planar chord-tangent configurations) and of
    values that would leave no admissible delta window (see random_script).
    """
    c = float(rng.uniform(*c_range))
    alpha = float(rng.uniform(angle_margin, np.pi / 2 - angle_margin))
    beta = float(rng.uniform(angle_margin, np.pi / 2 - angle_margin))
    for _ in range(256):
        phi = float(rng.uniform(0.0, 2 * np.pi))
        dist_planar = min(phi, abs(phi - np.pi), 2 * np.pi - phi)
        window = np.pi - (phi % np.pi)
        if dist_planar >= phi_margin and window >= 3 * SCRIPT_MARGIN + 0.1:
            return CurveParams(c=c, alpha=alpha, beta=beta, phi=phi)
    raise RangeError("could not draw generic phi")  # pragma: no cover


def _fold(x: float) -> float:
    return (x + np.pi) % (2 * np.pi) - np.pi


def _script_angles_ok(params: CurveParams, delta: float, tau: float) -> bool:
    m = SCRIPT_MARGIN
    if not (m <= delta <= np.pi - m):
        return False
    if not (m <= (delta + params.phi) % (2 * np.pi) <= np.pi - m):
        return False
    # keep clear of the tangent pole of the quasi-polynomial residual
    c_p, d_p, e_p = closed_form_observables(params, delta, tau)
    sigma = np.sqrt(max(0.0, 1.0 - (c_p / params.c) ** 2))
    w1 = np.arctan2(d_p * sigma, c_p)
    w2 = np.arctan2(e_p * sigma, c_p)
    big_phi = _fold(params.phi + w2 - w1)
    return abs(abs(big_phi) - np.pi / 2) > POLE_MARGIN


def random_script(rng: np.random.Generator, params: CurveParams, n_frames: int,
                  nuisance: bool = False) -> MotionScript:
    """Random generic per-frame motion.

    tau stays in [0.05, pi/2 - 0.05]; delta is drawn so that both delta and
    delta + phi (mod 2pi) stay in [0.05, pi - 0.05], which keeps every frame
    in the regime where the auxiliary construction is principal.
    """
    deltas, taus = [], []
    for _ in range(n_frames):
        for _ in range(1024):
            tau = float(rng.uniform(SCRIPT_MARGIN, np.pi / 2 - SCRIPT_MARGIN))
            delta = float(rng.uniform(SCRIPT_MARGIN, np.pi - SCRIPT_MARGIN))
            if _script_angles_ok(params, delta, tau):
                break
        else:  # pragma: no cover
            raise RangeError("could not draw admissible frame angles")
        deltas.append(delta)
        taus.append(tau)
    if nuisance:
        rot = rng.uniform(-np.pi, np.pi, size=n_frames)
        shift = rng.normal(0.0, 0.5 * params.c, size=(n_frames, 2))
    else:
        rot = np.zeros(n_frames)
        shift = np.zeros((n_frames, 2))
    return MotionScript(deltas=np.array(deltas), taus=np.array(taus),
                        inplane_rot=rot, inplane_shift=shift)


def _rot2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_nuisance(img: FrameImage, theta: float, shift: np.ndarray) -> FrameImage:
    """In-plane isometry of the whole frame (rotation then translation)."""
    R = _rot2(theta)
    shift = np.asarray(shift, dtype=float)
    pts = img.projected_samples @ R.T + shift
    return FrameImage(projected_samples=pts, A_proj=pts[0], B_proj=pts[-1],
                      tangent_dir_at_A_proj=R @ img.tangent_dir_at_A_proj,
                      tangent_dir_at_B_proj=R @ img.tangent_dir_at_B_proj,
                      index=img.index)


def perturb_frame(img: FrameImage, sigma: float, rng: np.random.Generator) -> FrameImage:
    """Gaussian noise on projected sample coordinates and tangent angles."""
    if sigma <= 0:
        return img
    pts = img.projected_samples + rng.normal(0.0, sigma, size=img.projected_samples.shape)
    dirs = []
    for d in (img.tangent_dir_at_A_proj, img.tangent_dir_at_B_proj):
        dirs.append(_rot2(float(rng.normal(0.0, sigma))) @ d)
    return FrameImage(projected_samples=pts, A_proj=pts[0], B_proj=pts[-1],
                      tangent_dir_at_A_proj=dirs[0], tangent_dir_at_B_proj=dirs[1],
                      index=img.index)


def make_scene(seed: int, n_frames: int, n_samples: int = 64,
               noise_sigma: float = 0.0, nuisance: bool = False,
               params: CurveParams = None) -> Scene:
    """Full deterministic synthetic scene: curve, script and rendered frames."""
    rng = np.random.default_rng(seed)
    if params is None:
        params = random_params(rng)
    curve = make_test_curve(seed, params, n_samples=n_samples)
    script = random_script(rng, params, n_frames, nuisance=nuisance)
    frames = []
    for i in range(n_frames):
        moved = apply_canonical_motion(curve, float(script.deltas[i]), float(script.taus[i]))
        img = render_frame(moved, index=i)
        img = apply_nuisance(img, float(script.inplane_rot[i]), script.inplane_shift[i])
        img = perturb_frame(img, noise_sigma, rng)
        frames.append(img)
    return Scene(seed=seed, params=params, curve=curve, script=script,
                 frames=frames, noise_sigma=noise_sigma)
