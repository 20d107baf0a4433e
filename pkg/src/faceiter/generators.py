"""Vertex-facet incidences of the benchmark families and the worked examples.

All polytope generators return coatoms in lexicographic order and emit the
top; the empty face arises as an intersection for every polytope here.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .atomset import AtomSet, lex_sorted
from .errors import InputError
from .lattice_io import LatticeInput, complex_inputs, far_face_mode

FAMILIES = {
    "simplex": 1,
    "hypercube": 1,
    "cross_polytope": 1,
    "cyclic": 2,
    "rp2": 0,
    "uniform_matroid": 2,
    "example_2_7_left": 0,
    "tight_span_example": 0,
    "complex_example": 0,
}

RP2_FACETS = [
    (1, 2, 4), (1, 2, 6), (1, 3, 4), (1, 3, 5), (1, 5, 6),
    (2, 3, 5), (2, 3, 6), (2, 4, 5), (3, 4, 6), (4, 5, 6),
]

# atom labels of the three-quadrant complex
W, N, E, S, O = 1, 2, 3, 4, 5
COMPLEX_LABELS = {W: "W", N: "N", E: "E", S: "S", O: "O"}


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) != FAMILIES[self.family]:
            raise InputError(
                f"{self.family} takes {FAMILIES[self.family]} parameter(s), got {len(self.params)}"
            )


def _from_sets(n: int, sets, **kw) -> LatticeInput:
    coatoms = lex_sorted([AtomSet.from_indices(n, s) for s in sets])
    return LatticeInput(n, tuple(coatoms), **kw)


def simplex(d: int) -> LatticeInput:
    if d < 1:
        raise InputError("simplex needs d >= 1")
    return _from_sets(d + 1, combinations(range(1, d + 2), d))


def hypercube(d: int) -> LatticeInput:
    """Vertex ``v`` in {0,1}^d is atom ``1 + sum(v_i 2^i)``."""
    if d < 1:
        raise InputError("hypercube needs d >= 1")
    facets = []
    for i in range(d):
        for bit in (0, 1):
            facets.append([v + 1 for v in range(2 ** d) if (v >> i) & 1 == bit])
    return _from_sets(2 ** d, facets)


def cross_polytope(d: int) -> LatticeInput:
    """Atom ``2i-1`` is ``+e_i`` and atom ``2i`` is ``-e_i``."""
    if d < 1:
        raise InputError("cross_polytope needs d >= 1")
    facets = [[2 * i + 1 + s for i, s in enumerate(signs)] for signs in product((0, 1), repeat=d)]
    return _from_sets(2 * d, facets)


def gale_facets(d: int, n: int) -> list[tuple[int, ...]]:
    """d-subsets of 1..n satisfying Gale's evenness condition."""
    out = []
    for s in combinations(range(1, n + 1), d):
        members = set(s)
        outside = [v for v in range(1, n + 1) if v not in members]
        ok = True
        for i, j in zip(outside, outside[1:]):
            if sum(1 for v in s if i < v < j) % 2:
                ok = False
                break
        if ok:
            out.append(s)
    return out


def cyclic(d: int, n: int) -> LatticeInput:
    if not (2 <= d < n):
        raise InputError("cyclic polytope needs n > d >= 2")
    return _from_sets(n, gale_facets(d, n))


def rp2() -> LatticeInput:
    return _from_sets(6, RP2_FACETS)


def uniform_matroid(r: int, n: int) -> LatticeInput:
    """Lattice of flats of U_{r,n}; its hyperplanes are the (r-1)-subsets."""
    if not (1 <= r <= n):
        raise InputError("uniform_matroid needs 1 <= r <= n")
    return _from_sets(n, combinations(range(1, n + 1), r - 1))


def example_2_7_left() -> LatticeInput:
    """The non-graded locally branched lattice: atom 1 sits on the long chain."""
    return LatticeInput.build(4, [[1], [2, 3], [2, 4], [3, 4]])


def tight_span_example() -> LatticeInput:
    return LatticeInput.build(
        6,
        [[1, 2, 3, 4], [1, 2, 5, 6], [1, 3, 6], [2, 4, 5]],
        ignored_sets=[[3, 4, 5, 6]],
        ignored_atoms=[3, 4, 5, 6],
        emit_top=False,
    )


def complex_cells() -> list[LatticeInput]:
    """The three quadrants as polyhedra, each closed by a far edge."""
    cells = []
    for a, b in ((W, N), (N, E), (S, E)):
        closed = _from_sets(5, [[a, O], [b, O], [a, b]])
        cells.append(far_face_mode(closed, AtomSet.from_indices(5, [a, b])))
    return cells


def complex_example() -> list[LatticeInput]:
    return complex_inputs(complex_cells())


def generate(spec: GeneratorSpec):
    """A :class:`LatticeInput`, or a list of them for ``complex_example``."""
    f = {
        "simplex": simplex,
        "hypercube": hypercube,
        "cross_polytope": cross_polytope,
        "cyclic": cyclic,
        "rp2": rp2,
        "uniform_matroid": uniform_matroid,
        "example_2_7_left": example_2_7_left,
        "tight_span_example": tight_span_example,
        "complex_example": complex_example,
    }[spec.family]
    return f(*spec.params)
