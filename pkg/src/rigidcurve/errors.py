"""Exception types shared across the package."""


class RigidCurveError(Exception):
    """Base class for all library errors."""


class ParallelError(RigidCurveError):
    """Two lines that should intersect are (numerically) parallel."""


class DegenerateError(RigidCurveError):
    """A construction is undefined for the given configuration."""


class RangeError(RigidCurveError, ValueError):
    """A parameter lies outside its admissible range."""


class PreconditionError(RigidCurveError):
    """An operation was called on input violating its stated precondition."""


class DomainError(RigidCurveError):
    """An inverse-trig argument is out of domain beyond numerical tolerance."""


class PoleError(RigidCurveError):
    """Evaluation requested at a tangent pole."""


class BranchConflictError(RigidCurveError):
    """Neither arccos branch satisfies the consistency equation."""


class InsufficientFramesError(RigidCurveError):
    """Fewer frames than the solver minimum."""


class NoConvergenceError(RigidCurveError):
    """All optimizer starts finished above tolerance.

    The best candidate report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnderdeterminedError(RigidCurveError):
    """Too few frames for the linearized monomial system."""


class RankDeficientError(RigidCurveError):
    """The linearized system is rank deficient (degenerate motion)."""


class CoplanarError(RigidCurveError):
    """Chord and endpoint tangents are coplanar; densification impossible."""


class NoIntersectionError(RigidCurveError):
    """A transported line misses the target curve image."""


class AmbiguityError(RigidCurveError):
    """Multiple crossings survive continuity filtering."""


class CollinearityError(RigidCurveError):
    """Points required to be collinear are not."""
