"""Exception hierarchy shared by every module; the CLI maps these to exit codes."""


class FaceIterError(Exception):
    """Base class for all errors raised by this package."""


class InputError(FaceIterError, ValueError):
    """Malformed or contract-violating input (CLI exit code 1)."""


class SizeGuardError(FaceIterError):
    """An exponential oracle or enumeration refused to run (CLI exit code 2)."""


class ConsistencyError(FaceIterError):
    """An internal invariant failed, e.g. an incomplete ray set (CLI exit code 3)."""


class GradednessError(ConsistencyError):
    """The graded cover-relation builder met a lattice that is not graded."""


class StructureError(FaceIterError):
    """A family of sets does not form a lattice under containment."""
