"""Rigid 3D curve reconstruction from multiframe orthogonal projections.

Two traceable endpoints plus projected tangent directions determine the
curve's chord length, the chord-tangent angles and the dihedral angle
between the endpoint tangent planes; per-frame motion and non-traceable
points follow.  A separate module handles correspondence between two
perspective views of planar curves via the cross-ratio double quotient.
"""

from .errors import (AmbiguityError, BranchConflictError, CollinearityError,
                     CoplanarError, DegenerateError, DomainError,
                     InsufficientFramesError, NoConvergenceError,
                     NoIntersectionError, ParallelError, PoleError,
                     PreconditionError, RangeError, RankDeficientError,
                     RigidCurveError, UnderdeterminedError)
from .geometry import (Line2, RigidMotion, intersect_lines_2d, project_orthogonal,
                       rotate_about_axis)
from .scene import (Curve3, CurveParams, FrameImage, MotionScript, Scene,
                    apply_canonical_motion, curve_invariants, derivation_trace,
                    make_scene, make_test_curve, render_frame)
from .observe import FrameObservation, extract_observables, normalize_frame
from .solver import (AuxTerms, FramePose, SolveReport, SolverConfig, aux_terms,
                     recover_frame_pose, residual_eq8, residual_eq12,
                     residual_quasi_poly, solve_global)
from .linearize import linearized_solve, monomial_count
from .densify import (BasisLine, ReconstructedCurve, RigidBasis, build_basis,
                      line_from_basis, line_to_basis, reconstruct_curve,
                      reconstruct_point)
from .perspective import (DerivedPoints, PlanarSceneView, construct_DE,
                          correspond_curve, correspond_point, double_quotient,
                          make_synthetic_view_pair, solve_Y_second)

__version__ = "0.1.0"
