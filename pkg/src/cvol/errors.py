"""Exception hierarchy.

Every failure raised by the library derives from :class:`CvolError`, so the
CLI can report any of them uniformly.  The subclasses name the stage that
failed.
"""


class CvolError(Exception):
    """Base class for all library errors."""


class DomainError(CvolError, ValueError):
    """A special function was evaluated outside its domain."""


class DegenerateSimplexError(DomainError):
    """Two vertices of an ideal simplex coincide."""


class FlatteningError(CvolError):
    """Log-parameters do not define an integral flattening."""


class InconsistentInputError(CvolError, ValueError):
    """Inputs that must describe the same object disagree."""


class TriangulationError(CvolError, ValueError):
    """Malformed triangulation data; ``location`` points into the input."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ParseError(TriangulationError):
    """The input is not valid JSON or does not follow the schema."""


class GluingError(TriangulationError):
    """A face pairing is not a valid involution."""


class OrderingError(TriangulationError):
    """A face pairing does not respect the vertex orderings."""


class OrientationError(TriangulationError):
    """Orientation signs are inconsistent with the face pairings."""


class CuspError(TriangulationError):
    """A vertex link is not the link of a non-trivial end."""


class SolverError(CvolError):
    """Newton iteration failed to converge; ``residual`` is the best one seen."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message)


class DegenerateSolutionError(SolverError):
    """The solver converged to a shape in ``{0, 1, inf}``."""


class FieldError(CvolError, ValueError):
    """Bad number-field description or ambiguous root approximation."""


class EquationError(CvolError):
    """Shapes do not satisfy the gluing equations."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message)


class HolonomyError(CvolError):
    """Cusp development does not close up: holonomy is not parabolic."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message)


class CocycleError(CvolError):
    """Long-edge labels disagree between corners of the same edge class."""


class CosetError(CvolError, ValueError):
    """Two decorations lie in the same Borel coset."""


class InvariantError(CvolError):
    """An invariant check failed inside the volume pipeline."""

    def __init__(self, check: str, residual: float, tolerance: float):
        self.check = check
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"invariant '{check}' failed: residual {residual:.3e} exceeds {tolerance:.1e}"
        )
