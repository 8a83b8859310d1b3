"""Exception taxonomy.

Two families matter to callers (and to the CLI exit codes): precondition
violations (bad grids, malformed files, wrong problem class for a solver)
and solver failures (CFL violations, singular directions, residual bounds
not met).  Everything derives from VltError so `except VltError` catches
all library-raised conditions.
"""


class VltError(Exception):
    """Base class for all library errors."""


class PreconditionError(VltError):
    """Input violates a documented precondition (CLI exit code 2)."""


class GridError(PreconditionError):
    """Invalid grid, mismatched grids, or non-finite field values."""


class GeometryError(PreconditionError):
    """Invalid direction, V-line geometry, or star geometry."""


class FieldFormatError(PreconditionError):
    """Malformed grid/sinogram file; message carries row/column location."""


class ClassificationError(PreconditionError):
    """Problem kind does not match the solver (or is degenerate)."""


class SolverFailure(VltError):
    """Numerical solve could not proceed or did not meet its contract (CLI exit code 3)."""


class CFLError(SolverFailure):
    """Explicit marching scheme violates its stability bound."""


class SingularDirectionError(SolverFailure):
    """Direction hits a singular set of the star inversion (kind 1 or 2)."""

    def __init__(self, message, kind):
        super().__init__(message)
        self.kind = int(kind)


class SolveError(SolverFailure):
    """Linear solve finished but the residual contract is not met."""
