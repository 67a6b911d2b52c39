"""Exception types shared across the toolkit."""


class PolytopeError(Exception):
    """Base class for all geometry, counting and I/O failures."""


class DegenerateInput(PolytopeError):
    """Input points or planes do not span a full-dimensional body."""


class Empty(PolytopeError):
    """Halfspace intersection has no interior."""


class Unbounded(PolytopeError):
    """Halfspace intersection is not bounded."""


class OnBifurcationSet(PolytopeError):
    """Query point is within tolerance of an active-region boundary.

    Callers that need a count anyway should perturb the point
    (see ``normals.perturb_to_generic``).
    """


class FailedPerturbation(PolytopeError):
    """No generic point was found near the query point."""


class InvariantViolation(PolytopeError):
    """A structural invariant failed; indicates a kernel bug or a tolerance breakdown."""


class TooManyChambers(PolytopeError):
    """Chamber decomposition exceeded the configured cell cap."""


class NonTransversal(PolytopeError):
    """Audit segment meets two sheets closer than tolerance apart."""


class NonSimpleVertex(PolytopeError):
    """Vertex has more than three incident edges."""


class Borderline(PolytopeError):
    """A classification quantity sits within tolerance of its threshold."""


class NotSimple(PolytopeError):
    """Polytope has a non-simple vertex."""


class NotGeneric(PolytopeError):
    """Polytope has a right dihedral or planar angle within tolerance."""


class RejectionLimit(PolytopeError):
    """Random generator exhausted its rejection budget."""


class ParseError(PolytopeError):
    """Malformed input file.  Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(PolytopeError):
    """Input parsed but failed geometric validation."""
