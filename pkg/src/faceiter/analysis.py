"""f-vectors, cover relations, brute-force oracles and lattice verifiers.

Levels are always depth buckets of an iterator run, listed top-down (the
artificial top, depth -1, first), and each level is sorted lexicographically
by atom indices.  Global face ids number the faces level by level in that
order.
"""
from __future__ import annotations

import json
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .atomset import AtomSet
from .errors import GradednessError, InputError, SizeGuardError, StructureError
from .iterator import FaceIterator, _maximal_masks
from .lattice_io import LatticeInput, dualize, require_valid


# --- f-vector -----------------------------------------------------------------

@dataclass(frozen=True)
class FVector:
    """Face counts per level, top-down.

    ``includes_top`` / ``includes_empty`` record the conventions of the run;
    ``graded`` is the caller's assumption that depth buckets are rank levels.
    """

    counts: tuple[int, ...]
    includes_top: bool
    includes_empty: bool
    graded: bool = True

    def bottom_up(self) -> tuple[int, ...]:
        return self.counts[::-1]

    def total(self) -> int:
        return sum(self.counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * f for k, f in enumerate(self.bottom_up()))

    def __str__(self) -> str:
        return " ".join(map(str, self.counts))


def _depth_counts_python(inp: LatticeInput):
    it = FaceIterator(inp)
    counts: dict[int, int] = defaultdict(int)
    empty = False
    for rec in it:
        counts[rec.depth] += 1
        empty |= not rec.atoms
    return dict(counts), it.stats, empty


def depth_counts(inp: LatticeInput, engine: str = "auto"):
    """``({depth: count}, IterStats, empty_emitted)`` for one run."""
    if engine == "python":
        return _depth_counts_python(inp)
    if engine not in ("auto", "kernel"):
        raise InputError(f"unknown engine {engine!r}")
    from ._kernel import count_by_depth

    return count_by_depth(inp)


def _dual_is_cheaper(inp: LatticeInput) -> bool:
    return (
        len(inp.coatoms) > inp.n_atoms
        and inp.emit_top
        and inp.top is None
        and not inp.ignored_sets
        and not inp.ignored_atoms
    )


def f_vector(
    inp: LatticeInput,
    dual: bool | None = None,
    engine: str = "auto",
    graded: bool = True,
) -> FVector:
    """Level counts of the faces the iterator visits, reported top-down.

    With ``dual=None`` the opposite lattice is iterated whenever it has fewer
    coatoms (runtime grows with the coatom count) and the input allows it.
    """
    require_valid(inp)
    if dual is None:
        dual = _dual_is_cheaper(inp)
    if dual:
        d = dualize(inp).with_top(True)
        counts, _, empty = depth_counts(d, engine)
        levels = [counts[k] for k in sorted(counts)]
        # dual top <-> primal empty face, dual empty face <-> primal top
        return FVector(tuple(reversed(levels)), empty, -1 in counts, graded)
    counts, _, empty = depth_counts(inp, engine)
    levels = [counts[k] for k in sorted(counts)]
    return FVector(tuple(levels), -1 in counts, empty, graded)


# --- brute-force oracle -----------------------------------------------------------

def meet_closure(masks: Sequence[int], max_faces: int | None = None) -> set[int]:
    """All intersections of non-empty subfamilies of ``masks``."""
    faces = set(masks)
    frontier = list(faces)
    while frontier:
        nxt = []
        for f in frontier:
            for c in masks:
                x = f & c
                if x not in faces:
                    faces.add(x)
                    nxt.append(x)
        if max_faces is not None and len(faces) > max_faces:
            raise SizeGuardError(f"meet closure exceeds {max_faces} faces")
        frontier = nxt
    return faces


def brute_force_faces(
    inp: LatticeInput, max_atoms: int = 16, max_coatoms: int = 12
) -> set[AtomSet]:
    """The iterator's contract evaluated by exhaustive closure.

    Meet-closure of the coatoms (plus the top when ``emit_top``), minus every
    set inside an ignored set or meeting the ignored atoms.
    """
    if inp.n_atoms > max_atoms or len(inp.coatoms) > max_coatoms:
        raise SizeGuardError(
            f"brute force limited to {max_atoms} atoms and {max_coatoms} coatoms"
        )
    masks = meet_closure([c.mask for c in inp.coatoms])
    if inp.emit_top:
        masks.add(inp.top_face().mask)
    ia = inp.ignored_atoms.mask
    ign = [s.mask for s in inp.ignored_sets]
    keep = {
        x for x in masks if not x & ia and not any(x & ~y == 0 for y in ign)
    }
    return {AtomSet(inp.n_atoms, x) for x in keep}


# --- Hasse diagrams -------------------------------------------------------------

@dataclass
class HasseDiagram:
    """Faces grouped by level (top-down) and cover pairs ``(lower_id, upper_id)``."""

    levels: list[list[AtomSet]]
    depths: list[int]
    edges: list[tuple[int, int]] = field(default_factory=list)

    def faces(self) -> list[AtomSet]:
        return [f for lvl in self.levels for f in lvl]

    def locate(self, face_id: int) -> tuple[int, int]:
        for k, lvl in enumerate(self.levels):
            if face_id < len(lvl):
                return k, face_id
            face_id -= len(lvl)
        raise IndexError(face_id)

    def edge_sets(self) -> set[tuple[AtomSet, AtomSet]]:
        flat = self.faces()
        return {(flat[u], flat[v]) for u, v in self.edges}

    def to_text(self) -> str:
        lines = ["levels " + " ".join(str(len(l)) for l in self.levels)]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "levels": [[list(f.indices()) for f in lvl] for lvl in self.levels],
                "depths": self.depths,
                "edges": [list(e) for e in self.edges],
            }
        )


def _sorted_levels(inp: LatticeInput, max_faces: int | None = None):
    buckets: dict[int, list[AtomSet]] = defaultdict(list)
    count = 0
    for rec in FaceIterator(inp):
        buckets[rec.depth].append(rec.atoms)
        count += 1
        if max_faces is not None and count > max_faces:
            raise SizeGuardError(f"more than {max_faces} faces")
    depths = sorted(buckets)
    levels = [sorted(buckets[d], key=AtomSet.sort_key) for d in depths]
    return levels, depths


def _offsets(levels) -> list[int]:
    out, acc = [], 0
    for lvl in levels:
        out.append(acc)
        acc += len(lvl)
    return out


def cover_relations_graded(inp: LatticeInput) -> HasseDiagram:
    """Covers of a graded lattice: each face meets every coatom and the
    results are looked up (binary search) in the level right below it."""
    levels, depths = _sorted_levels(inp)
    offs = _offsets(levels)
    keys = [[f.sort_key() for f in lvl] for lvl in levels]
    where = {f.mask: k for k, lvl in enumerate(levels) for f in lvl}
    coatoms = [c.mask for c in inp.coatoms]
    n = inp.n_atoms
    edges = []
    for k, lvl in enumerate(levels):
        below = keys[k + 1] if k + 1 < len(levels) else []
        for i, p in enumerate(lvl):
            found = set()
            strays = set()
            for c in coatoms:
                x = p.mask & c
                if x == p.mask:
                    continue
                key = AtomSet(n, x).sort_key()
                j = bisect_left(below, key)
                if j < len(below) and below[j] == key:
                    found.add((j, x))
                elif x in where:
                    strays.add(x)
            for x in strays:
                if not any(x & ~y == 0 for _, y in found):
                    raise GradednessError(
                        f"{AtomSet(n, x)!r} lies below {p!r} but not on the next level"
                    )
            for j, _ in sorted(found):
                edges.append((offs[k + 1] + j, offs[k] + i))
    return HasseDiagram(levels, depths, sorted(edges))


def cover_relations_ungraded(inp: LatticeInput, max_faces: int = 10**6) -> HasseDiagram:
    """Covers of any input: the maximal proper intersections with coatoms."""
    levels, depths = _sorted_levels(inp, max_faces)
    ids = {f.mask: i for i, f in enumerate(f for lvl in levels for f in lvl)}
    coatoms = [c.mask for c in inp.coatoms]
    edges = []
    for p, pid in ids.items():
        below = list(dict.fromkeys(p & c for c in coatoms if p & c != p))
        for x in _maximal_masks(below):
            if x in ids:
                edges.append((ids[x], pid))
    return HasseDiagram(levels, depths, sorted(edges))


# --- order-theoretic verifiers ---------------------------------------------------

def _as_masks(faces: Iterable) -> list[int]:
    out = set()
    for f in faces:
        if isinstance(f, AtomSet):
            out.add(f.mask)
        elif isinstance(f, int):
            out.add(f)
        else:
            m = 0
            for i in f:
                m |= 1 << (i - 1)
            out.add(m)
    return sorted(out, key=lambda m: (m.bit_count(), m))


class ContainmentPoset:
    """A finite family of sets ordered by inclusion, with bitset relations.

    Element ``k``'s strict up-set and down-set are integers over element
    indices, which keeps interval and cover computations cheap.
    """

    MAX_ELEMENTS = 4096

    def __init__(self, faces: Iterable):
        self.masks = _as_masks(faces)
        size = len(self.masks)
        if size > self.MAX_ELEMENTS:
            raise SizeGuardError(f"poset verifiers limited to {self.MAX_ELEMENTS} elements")
        self.up = [0] * size
        self.down = [0] * size
        for i, x in enumerate(self.masks):
            for j, y in enumerate(self.masks):
                if i != j and x & ~y == 0:
                    self.up[i] |= 1 << j
                    self.down[j] |= 1 << i
        self.cover_up = []
        for i in range(size):
            above = self.up[i]
            reach = 0
            rest = above
            while rest:
                low = rest & -rest
                reach |= self.up[low.bit_length() - 1]
                rest ^= low
            self.cover_up.append(above & ~reach)

    def __len__(self) -> int:
        return len(self.masks)

    @staticmethod
    def _members(bits: int) -> list[int]:
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def _least(self, bits: int) -> int | None:
        # element of `bits` below every other member of `bits`
        for k in self._members(bits):
            if bits & ~(self.up[k] | 1 << k) == 0:
                return k
        return None

    def _greatest(self, bits: int) -> int | None:
        for k in self._members(bits):
            if bits & ~(self.down[k] | 1 << k) == 0:
                return k
        return None

    def join(self, elems: Iterable[int], within: int) -> int | None:
        """Least upper bound inside the sub-poset ``within`` (a bitset)."""
        ub = within
        for e in elems:
            ub &= self.up[e] | 1 << e
        return self._least(ub)

    def meet(self, elems: Iterable[int], within: int) -> int | None:
        lb = within
        for e in elems:
            lb &= self.down[e] | 1 << e
        return self._greatest(lb)

    def interval(self, p: int, q: int) -> int:
        return (self.up[p] | 1 << p) & (self.down[q] | 1 << q)

    def full(self) -> int:
        return (1 << len(self.masks)) - 1

    def check_lattice(self, within: int | None = None) -> None:
        within = self.full() if within is None else within
        elems = self._members(within)
        for i, a in enumerate(elems):
            for b in elems[i + 1:]:
                if self.join((a, b), within) is None or self.meet((a, b), within) is None:
                    raise StructureError(
                        f"{self._fmt(a)} and {self._fmt(b)} lack a join or a meet"
                    )
        if elems and (self._least(within) is None or self._greatest(within) is None):
            raise StructureError("no bottom or no top")

    def _fmt(self, k: int) -> str:
        from .atomset import mask_indices

        return "{" + ",".join(map(str, mask_indices(self.masks[k]))) + "}"

    def _atomic(self, within: int) -> bool:
        bottom = self._least(within)
        atoms = [a for a in self._members(self.cover_up[bottom] & within)]
        for p in self._members(within):
            below = [a for a in atoms if within >> a & 1 and (self.down[p] | 1 << p) >> a & 1]
            j = self.join(below, within) if below else bottom
            if j != p:
                return False
        return True

    def _coatomic(self, within: int) -> bool:
        top = self._greatest(within)
        coatoms = [c for c in self._members(within) if c != top and self.cover_up[c] >> top & 1]
        for p in self._members(within):
            above = [c for c in coatoms if (self.up[p] | 1 << p) >> c & 1]
            mt = self.meet(above, within) if above else top
            if mt != p:
                return False
        return True

    def is_atomic(self, within: int | None = None) -> bool:
        within = self.full() if within is None else within
        self.check_lattice(within)
        return self._atomic(within)

    def is_coatomic(self, within: int | None = None) -> bool:
        within = self.full() if within is None else within
        self.check_lattice(within)
        return self._coatomic(within)

    def is_locally_branched(self) -> bool:
        for a in range(len(self.masks)):
            for b in self._members(self.cover_up[a]):
                for c in self._members(self.cover_up[b]):
                    open_iv = self.up[a] & self.down[c]
                    if open_iv.bit_count() < 2:
                        return False
        return True

    def intervals(self):
        for p in range(len(self.masks)):
            for q in self._members(self.up[p] | 1 << p):
                yield p, q

    def every_interval_atomic(self) -> bool:
        self.check_lattice()
        return all(self._atomic(self.interval(p, q)) for p, q in self.intervals())

    def every_interval_coatomic(self) -> bool:
        self.check_lattice()
        return all(self._coatomic(self.interval(p, q)) for p, q in self.intervals())

    def covers(self) -> set[tuple[int, int]]:
        """Cover pairs as ``(lower_mask, upper_mask)``."""
        return {
            (self.masks[i], self.masks[j])
            for i in range(len(self.masks))
            for j in self._members(self.cover_up[i])
        }

    def rank_function(self) -> dict[int, int] | None:
        """Ranks by mask if the poset is graded, else ``None``."""
        order = sorted(range(len(self.masks)), key=lambda k: self.down[k].bit_count())
        rank: dict[int, int] = {}
        for k in order:
            lowers = [i for i in self._members(self.down[k]) if self.cover_up[i] >> k & 1]
            rs = {rank[i] + 1 for i in lowers}
            if len(rs) > 1:
                return None
            rank[k] = rs.pop() if rs else 0
        return {self.masks[k]: r for k, r in rank.items()}


def is_locally_branched(faces: Iterable) -> bool:
    return ContainmentPoset(faces).is_locally_branched()


def is_atomic(faces: Iterable) -> bool:
    return ContainmentPoset(faces).is_atomic()


def is_coatomic(faces: Iterable) -> bool:
    return ContainmentPoset(faces).is_coatomic()


def branching_equivalence(faces: Iterable) -> tuple[bool, bool, bool]:
    """(locally branched, every interval atomic, every interval coatomic);
    for a lattice the three agree."""
    P = ContainmentPoset(faces)
    return P.is_locally_branched(), P.every_interval_atomic(), P.every_interval_coatomic()


def hasse_oracle(faces: Iterable) -> set[tuple[AtomSet, AtomSet]]:
    """Transitive reduction of inclusion, computed without the iterator."""
    faces = list(faces)
    n = faces[0].capacity if faces else 0
    return {
        (AtomSet(n, lo), AtomSet(n, hi)) for lo, hi in ContainmentPoset(faces).covers()
    }
