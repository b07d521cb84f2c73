"""Error taxonomy shared across the package.

Exact-side errors signal contract violations (bad input shapes, points off
the cubic, degenerate spans); numeric-side errors signal convergence or
path-tracking failures that callers are expected to catch and retry.
"""


class CubicLinesError(Exception):
    """Base class for all package-specific errors."""


# --- exact algebra -------------------------------------------------------

class DimensionMismatch(CubicLinesError):
    """Operands have incompatible variable counts or shapes."""


class ZeroForm(CubicLinesError):
    """A binary form that must be nonzero vanished identically."""


class IrrationalResult(CubicLinesError):
    """An exact root/factor does not live in Q(omega)."""


# --- geometry ------------------------------------------------------------

class DegenerateLine(CubicLinesError):
    """Spanning rows are dependent: not an actual line/plane."""


class NotOnCubic(CubicLinesError):
    """A point or line that must lie on the cubic does not."""


class SingularPoint(CubicLinesError):
    """The gradient vanishes where a smooth point was required."""


class NotSecondType(CubicLinesError):
    """A second-type line was required (pencil-rank gradient restriction)."""


class PlaneInCubic(CubicLinesError):
    """The plane lies entirely inside the cubic; no residual line exists."""


class NotTangent(CubicLinesError):
    """The plane is not tangent along the line (no doubled component)."""


class AmbiguousTangent(CubicLinesError):
    """More than one tangent plane exists; refusing to pick one."""


class NonIsolated(CubicLinesError):
    """A fiber expected to be finite is positive-dimensional."""


class FlexPoint(CubicLinesError):
    """Tangent-line residual is undefined: the point is a flex."""


class PointOnCurve(CubicLinesError):
    """Tangency construction needs an external point, got one on the curve."""


class ParamsOffCurve(CubicLinesError):
    """Ruling parameters do not satisfy the component's curve equations."""


class DegeneratePoint(CubicLinesError):
    """A construction's genericity precondition failed for this point."""


class NonGenericPoint(CubicLinesError):
    """A sampled point hit a positive-codimension bad locus; resample."""


# --- numerics ------------------------------------------------------------

class NoConvergence(CubicLinesError):
    """Newton iteration failed to reach the residual tolerance."""


class SingularJacobian(CubicLinesError):
    """Jacobian (numerically) singular during a corrector solve."""


class PathFailure(CubicLinesError):
    """Continuation could not cross a segment even at the minimum step."""


class PathCrossing(CubicLinesError):
    """Two tracked solutions collided during continuation."""


class UnexpectedFiber(CubicLinesError):
    """A solved fiber does not have the shape the construction promised."""


class DegreeMismatch(CubicLinesError):
    """Permutations of different degrees were mixed."""
