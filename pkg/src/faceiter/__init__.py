"""Face iteration for finite locally branched lattices given by coatom incidences."""
from .atomset import AtomSet
from .errors import (
    ConsistencyError,
    FaceIterError,
    GradednessError,
    InputError,
    SizeGuardError,
    StructureError,
)
from .iterator import (
    FaceIterator,
    FaceRecord,
    IterStats,
    face_iterator,
    inclusion_maximals,
    split_tasks,
    split_work,
)
from .lattice_io import (
    LatticeInput,
    ValidationReport,
    complex_inputs,
    dualize,
    far_face_mode,
    parse,
    render,
    validate,
)

__all__ = [
    "AtomSet",
    "ConsistencyError",
    "FaceIterError",
    "FaceIterator",
    "FaceRecord",
    "GradednessError",
    "InputError",
    "IterStats",
    "LatticeInput",
    "SizeGuardError",
    "StructureError",
    "ValidationReport",
    "complex_inputs",
    "dualize",
    "face_iterator",
    "far_face_mode",
    "inclusion_maximals",
    "parse",
    "render",
    "split_tasks",
    "split_work",
    "validate",
]
