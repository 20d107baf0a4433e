"""Iterator input: construction, validation, transforms and (de)serialization.

Two on-disk formats are supported, both with 1-based atom indices.

JSON::

    {"n_atoms": 4, "coatoms": [[1, 2], [1, 4]], "ignored_sets": [[3, 4]],
     "ignored_atoms": [], "emit_top": true, "top": [1, 2, 3, 4]}

``top`` is optional and designates a top face other than the union of the
coatoms (used for cells of a complex).

Plain text: the first line is ``n_atoms``; every further non-empty line is a
coatom given as space-separated indices.  A line starting with ``!`` is an
ignored set, a line starting with ``~`` lists the ignored atoms.  The token
``{}`` alone denotes the empty set.  Two option lines are understood:
``@no-top`` (do not emit the top) and ``@top i j ...`` (designated top).
Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .atomset import AtomSet, lex_sorted
from .errors import InputError


@dataclass(frozen=True)
class LatticeInput:
    """Everything the face iterator consumes."""

    n_atoms: int
    coatoms: tuple[AtomSet, ...]
    ignored_sets: tuple[AtomSet, ...] = ()
    ignored_atoms: AtomSet | None = None
    emit_top: bool = True
    top: AtomSet | None = None

    def __post_init__(self):
        if not isinstance(self.n_atoms, int) or self.n_atoms < 1:
            raise InputError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        object.__setattr__(self, "coatoms", tuple(self.coatoms))
        object.__setattr__(self, "ignored_sets", tuple(self.ignored_sets))
        if self.ignored_atoms is None:
            object.__setattr__(self, "ignored_atoms", AtomSet.empty(self.n_atoms))

    @classmethod
    def build(
        cls,
        n_atoms: int,
        coatoms: Iterable[Iterable[int]],
        ignored_sets: Iterable[Iterable[int]] = (),
        ignored_atoms: Iterable[int] = (),
        emit_top: bool = True,
        top: Iterable[int] | None = None,
    ) -> "LatticeInput":
        """Construct from 1-based index lists."""
        mk = lambda idx: AtomSet.from_indices(n_atoms, idx)  # noqa: E731
        return cls(
            n_atoms,
            tuple(mk(c) for c in coatoms),
            tuple(mk(s) for s in ignored_sets),
            mk(ignored_atoms),
            emit_top,
            None if top is None else mk(top),
        )

    def top_face(self) -> AtomSet:
        """The designated top, or the union of the coatoms."""
        if self.top is not None:
            return self.top
        mask = 0
        for c in self.coatoms:
            mask |= c.mask
        return AtomSet(self.n_atoms, mask)

    def lex_sorted(self) -> "LatticeInput":
        """Coatoms in lexicographic order of their atom indices."""
        return replace(self, coatoms=tuple(lex_sorted(self.coatoms)))

    def with_top(self, emit: bool) -> "LatticeInput":
        return replace(self, emit_top=emit)

    def as_lists(self) -> dict:
        d = {
            "n_atoms": self.n_atoms,
            "coatoms": [list(c.indices()) for c in self.coatoms],
            "ignored_sets": [list(s.indices()) for s in self.ignored_sets],
            "ignored_atoms": list(self.ignored_atoms.indices()),
            "emit_top": self.emit_top,
        }
        if self.top is not None:
            d["top"] = list(self.top.indices())
        return d


@dataclass
class ValidationReport:
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        out = [f"error {code}: {msg}" for code, msg in self.errors]
        out += [f"warning {code}: {msg}" for code, msg in self.warnings]
        return out or ["ok"]


def _nested_pairs(distinct: list[tuple[int, int]], n: int) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` of distinct masks with mask_i inside mask_j."""
    if len(distinct) <= 256:
        return [
            (i, j) for mi, i in distinct for mj, j in distinct if i != j and mi & ~mj == 0
        ]
    import numpy as np

    nbytes = 8 * max(1, -(-n // 64))
    words = np.array(
        [np.frombuffer(m.to_bytes(nbytes, "little"), dtype="<u8") for m, _ in distinct]
    )
    out = []
    for a in range(len(distinct)):
        inside = ~(words[a] & ~words).any(axis=1)
        inside[a] = False
        out += [(distinct[a][1], distinct[b][1]) for b in np.flatnonzero(inside)]
    return out


def validate(inp: LatticeInput) -> ValidationReport:
    """Check the iterator's input contract without modifying anything."""
    rep = ValidationReport()
    n = inp.n_atoms
    named = [("coatom", i, c) for i, c in enumerate(inp.coatoms)]
    named += [("ignored_set", i, s) for i, s in enumerate(inp.ignored_sets)]
    named.append(("ignored_atoms", 0, inp.ignored_atoms))
    if inp.top is not None:
        named.append(("top", 0, inp.top))
    bad_capacity = False
    for kind, i, s in named:
        if s.capacity != n:
            rep.errors.append(("capacity", f"{kind} #{i} has capacity {s.capacity}, expected {n}"))
            bad_capacity = True
    if bad_capacity:
        return rep

    seen: dict[int, int] = {}
    for i, c in enumerate(inp.coatoms):
        if c.mask in seen:
            rep.errors.append(("duplicate_coatom", f"coatom #{i} {c!r} repeats coatom #{seen[c.mask]}"))
        else:
            seen[c.mask] = i
    for i, j in _nested_pairs(list(seen.items()), n):
        rep.errors.append(
            ("nested_coatoms", f"coatom #{i} {inp.coatoms[i]!r} is contained in coatom #{j} {inp.coatoms[j]!r}")
        )
    for i, c in enumerate(inp.coatoms):
        for k, y in enumerate(inp.ignored_sets):
            if c.mask & ~y.mask == 0:
                rep.errors.append(
                    ("coatom_in_ignored", f"coatom #{i} {c!r} is contained in ignored set #{k} {y!r}")
                )
                break

    covered = 0
    for c in inp.coatoms:
        covered |= c.mask
    for a in range(1, n + 1):
        if not covered >> (a - 1) & 1:
            rep.warnings.append(("unused_atom", f"atom {a} lies in no coatom"))
    return rep


def require_valid(inp: LatticeInput) -> LatticeInput:
    rep = validate(inp)
    if not rep.ok:
        raise InputError("invalid input: " + "; ".join(m for _, m in rep.errors))
    return inp


def fix(inp: LatticeInput) -> LatticeInput:
    """Opt-in repair: drop duplicate, nested and ignored-contained coatoms."""
    from .iterator import inclusion_maximals

    kept = [c for c in inclusion_maximals(inp.coatoms) if not c.is_subset_of_any(inp.ignored_sets)]
    return replace(inp, coatoms=tuple(kept))


def dualize(inp: LatticeInput) -> LatticeInput:
    """Transpose the incidences so the iterator runs on the opposite lattice.

    The old coatoms (followed by the old ignored sets, which must themselves
    be coatoms) become the new atoms; the old atoms become the new coatoms.
    The atoms coming from old ignored sets are ignored atoms of the result.
    """
    if inp.ignored_atoms:
        raise InputError("dualize requires empty ignored_atoms")
    if inp.top is not None:
        raise InputError("dualize requires the top to be the union of the coatoms")
    sets = list(inp.coatoms) + list(inp.ignored_sets)
    for k, y in enumerate(inp.ignored_sets):
        for s in sets:
            if s is not y and y.mask & ~s.mask == 0:
                raise InputError(f"ignored set #{k} {y!r} is not a coatom (contained in {s!r})")
    m = len(sets)
    if m == 0:
        raise InputError("dualize needs at least one coatom")
    new_coatoms = []
    for j in range(inp.n_atoms):
        mask = 0
        for i, s in enumerate(sets):
            if s.mask >> j & 1:
                mask |= 1 << i
        if not mask:
            raise InputError(f"atom {j + 1} lies in no coatom; its dual would be empty")
        new_coatoms.append(AtomSet(m, mask))
    k0 = len(inp.coatoms)
    ignored_atoms = AtomSet(m, ((1 << m) - 1) ^ ((1 << k0) - 1))
    return LatticeInput(m, tuple(new_coatoms), (), ignored_atoms, inp.emit_top)


def far_face_mode(inp: LatticeInput, far_face: AtomSet) -> LatticeInput:
    """Ignore every face inside ``far_face`` (the facet at infinity of a polyhedron)."""
    if far_face.capacity != inp.n_atoms:
        raise InputError(f"far face capacity {far_face.capacity} != n_atoms {inp.n_atoms}")
    coatoms = tuple(c for c in inp.coatoms if not c.is_subset(far_face))
    return replace(inp, coatoms=coatoms, ignored_sets=inp.ignored_sets + (far_face,))


def complex_inputs(cells: Sequence[LatticeInput]) -> list[LatticeInput]:
    """Inputs visiting a union of lattices (a polyhedral complex) exactly once.

    Cell ``k`` ignores the tops of cells ``1..k-1`` ahead of its own ignored
    sets, drops coatoms lying in them, and emits its own top.
    """
    if not cells:
        return []
    n = cells[0].n_atoms
    for k, c in enumerate(cells):
        if c.n_atoms != n:
            raise InputError(f"cell #{k} has {c.n_atoms} atoms, expected {n}")
    out = []
    tops: list[AtomSet] = []
    for cell in cells:
        top = cell.top_face()
        ignored = tuple(tops) + cell.ignored_sets
        coatoms = tuple(c for c in cell.coatoms if not c.is_subset_of_any(ignored))
        out.append(replace(cell, coatoms=coatoms, ignored_sets=ignored, emit_top=True, top=top))
        tops.append(top)
    return out


# --- serialization ---------------------------------------------------------

def _indices(obj, where: str) -> list[int]:
    if not isinstance(obj, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in obj):
        raise InputError(f"{where}: expected a list of integers")
    return obj


def _from_json(text: str) -> LatticeInput:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "n_atoms" not in doc or "coatoms" not in doc:
        raise InputError("JSON input needs an object with 'n_atoms' and 'coatoms'")
    n = doc["n_atoms"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("'n_atoms' must be a positive integer")
    coatoms = doc["coatoms"]
    if not isinstance(coatoms, list):
        raise InputError("'coatoms' must be a list")
    top = doc.get("top")
    emit_top = doc.get("emit_top", True)
    if not isinstance(emit_top, bool):
        raise InputError("'emit_top' must be a boolean")
    return LatticeInput.build(
        n,
        [_indices(c, f"coatoms[{i}]") for i, c in enumerate(coatoms)],
        [_indices(c, f"ignored_sets[{i}]") for i, c in enumerate(doc.get("ignored_sets", []))],
        _indices(doc.get("ignored_atoms", []), "ignored_atoms"),
        emit_top,
        None if top is None else _indices(top, "top"),
    )


def _text_indices(body: str, lineno: int, col0: int, n: int) -> list[int]:
    if body.strip() == "{}":
        return []
    out = []
    col = col0
    for tok in body.split(" "):
        if tok:
            try:
                v = int(tok)
            except ValueError:
                raise InputError(f"line {lineno}, column {col}: not an integer: {tok!r}") from None
            if v < 1 or v > n:
                raise InputError(f"line {lineno}, column {col}: atom index {v} out of range 1..{n}")
            out.append(v)
        col += len(tok) + 1
    return out


def _from_text(text: str) -> LatticeInput:
    lines = text.splitlines()
    header = None
    coatoms, ignored_sets, ignored_atoms = [], [], []
    emit_top, top = True, None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.replace("\t", " ").rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if header is None:
            try:
                header = int(line)
            except ValueError:
                raise InputError(f"line {lineno}, column 1: expected the atom count, got {line!r}") from None
            if header < 1:
                raise InputError(f"line {lineno}, column 1: atom count must be positive")
            continue
        if line.startswith("!"):
            ignored_sets.append(_text_indices(line[1:], lineno, 2, header))
        elif line.startswith("~"):
            ignored_atoms.extend(_text_indices(line[1:], lineno, 2, header))
        elif line.startswith("@"):
            word, _, rest = line[1:].partition(" ")
            if word == "no-top":
                emit_top = False
            elif word == "top":
                top = _text_indices(rest, lineno, len(word) + 3, header)
            else:
                raise InputError(f"line {lineno}, column 2: unknown option {word!r}")
        else:
            coatoms.append(_text_indices(line, lineno, 1, header))
    if header is None:
        raise InputError("line 1, column 1: empty input")
    return LatticeInput.build(header, coatoms, ignored_sets, ignored_atoms, emit_top, top)


def detect_format(text: str) -> str:
    return "json" if text.lstrip().startswith("{") else "text"


def parse(text: str | bytes, fmt: str = "auto", check: bool = True) -> LatticeInput:
    """Parse an input document; with ``check`` the result must validate."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if fmt == "auto":
        fmt = detect_format(text)
    if fmt == "json":
        inp = _from_json(text)
    elif fmt == "text":
        inp = _from_text(text)
    else:
        raise InputError(f"unknown format {fmt!r}")
    if check:
        require_valid(inp)
    return inp


def _text_set(s: AtomSet) -> str:
    return " ".join(map(str, s.indices())) if s else "{}"


def render(inp: LatticeInput, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(inp.as_lists())
    if fmt != "text":
        raise InputError(f"unknown format {fmt!r}")
    out = [str(inp.n_atoms)]
    if not inp.emit_top:
        out.append("@no-top")
    if inp.top is not None:
        out.append("@top " + _text_set(inp.top))
    out += [_text_set(c) for c in inp.coatoms]
    out += ["! " + _text_set(s) for s in inp.ignored_sets]
    if inp.ignored_atoms:
        out.append("~ " + _text_set(inp.ignored_atoms))
    return "\n".join(out) + "\n"
