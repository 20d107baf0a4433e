"""The Kunz cone and its bad faces.

The cone lives in R^(m-1) and is cut out by ``x_i + x_j >= x_((i+j) mod m)``
for ``1 <= i <= j <= m-1`` with ``i + j != m``.  Its extreme rays are the
atoms and its facets the coatoms of the face lattice handed to the iterator.

For a face F with tight inequalities T, ``e(F) - 1`` counts the variables
that are never a right-hand side in T and ``t(F)`` the variables that never
appear on a left-hand side of T.  F is *bad* when it passes none of the
enabled Wilf criteria (``2e >= m``, ``e > t``, optionally ``3e >= m``).

The unit group of Z/mZ acts by ``x_i -> x_(u i)``; it permutes rays and
facets and preserves e and t, so only one face per orbit needs checking.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .atomset import AtomSet, mask_indices
from .errors import ConsistencyError, InputError, SizeGuardError
from .exact import dot, nullspace, primitive, rank
from .iterator import FaceIterator, _descent
from .lattice_io import LatticeInput

log = logging.getLogger(__name__)

DEFAULT_MAX_M = 9


@dataclass(frozen=True)
class KunzInequality:
    """``x_i + x_j >= x_rhs`` with ``rhs = (i + j) mod m``."""

    i: int
    j: int
    rhs: int

    def form(self, m: int) -> tuple[int, ...]:
        v = [0] * (m - 1)
        v[self.i - 1] += 1
        v[self.j - 1] += 1
        v[self.rhs - 1] -= 1
        return tuple(v)

    def value(self, x: Sequence[int]) -> int:
        return x[self.i - 1] + x[self.j - 1] - x[self.rhs - 1]

    def __str__(self) -> str:
        return f"{self.i},{self.j}"


def kunz_inequalities(m: int) -> list[KunzInequality]:
    if not isinstance(m, int) or m < 3:
        raise InputError(f"the Kunz cone needs m >= 3, got {m!r}")
    return [
        KunzInequality(i, j, (i + j) % m)
        for i in range(1, m)
        for j in range(i, m)
        if i + j != m
    ]


def units(m: int) -> list[int]:
    return [u for u in range(1, m) if gcd(u, m) == 1]


def act_on_vector(u: int, m: int, x: Sequence[int]) -> tuple[int, ...]:
    """Image of ``x`` under index multiplication: coordinate i moves to u*i mod m."""
    y = [0] * (m - 1)
    for i in range(1, m):
        y[(u * i) % m - 1] = x[i - 1]
    return tuple(y)


def act_on_inequality(u: int, m: int, q: KunzInequality) -> KunzInequality:
    a, b = sorted(((u * q.i) % m, (u * q.j) % m))
    return KunzInequality(a, b, (u * q.rhs) % m)


# --- ray enumeration ---------------------------------------------------------

def _check_guard(m: int, max_m: int | None) -> None:
    limit = DEFAULT_MAX_M if max_m is None else max_m
    if m > limit:
        raise SizeGuardError(
            f"internal ray enumeration is limited to m <= {limit}; "
            "supply a ray file instead (CLI: --rays FILE)"
        )


def rays_by_rank(m: int, max_m: int | None = None) -> list[tuple[int, ...]]:
    """Every (d-1)-subset of inequalities with a 1-dimensional solution space
    contributes its generator if the generator is feasible."""
    _check_guard(m, max_m)
    ineqs = kunz_inequalities(m)
    forms = [q.form(m) for q in ineqs]
    d = m - 1
    found = set()
    for sub in combinations(forms, d - 1):
        ns = nullspace(list(sub), d)
        if len(ns) != 1:
            continue
        v = ns[0]
        for cand in (v, tuple(-t for t in v)):
            if all(dot(f, cand) >= 0 for f in forms):
                found.add(primitive(cand))
                break
    return sorted(found)


def rays_by_double_description(m: int, max_m: int | None = None) -> list[tuple[int, ...]]:
    """Incremental double description with the combinatorial adjacency test."""
    _check_guard(m, max_m)
    forms = [q.form(m) for q in kunz_inequalities(m)]
    d = m - 1
    basis: list[int] = []
    for k, f in enumerate(forms):
        if rank([forms[b] for b in basis] + [f], d) > len(basis):
            basis.append(k)
        if len(basis) == d:
            break
    if len(basis) < d:
        raise ConsistencyError("the cone is not pointed")
    # simplicial start: ray k is tight on every basis row except row k
    rays: list[tuple[tuple[int, ...], int]] = []
    for k, b in enumerate(basis):
        others = [forms[c] for c in basis if c != b]
        v = nullspace(others, d)[0]
        if dot(forms[b], v) < 0:
            v = tuple(-t for t in v)
        zero = 0
        for c in basis:
            if c != b:
                zero |= 1 << c
        rays.append((primitive(v), zero))
    for k, h in enumerate(forms):
        if k in basis:
            continue
        pos, neg, keep = [], [], []
        for r, z in rays:
            s = dot(h, r)
            if s > 0:
                pos.append((r, z, s))
                keep.append((r, z))
            elif s < 0:
                neg.append((r, z, s))
            else:
                keep.append((r, z | 1 << k))
        zero_sets = [z for _, z in rays]
        new = []
        for p, zp, sp in pos:
            for q, zq, sq in neg:
                common = zp & zq
                if common.bit_count() < d - 2:
                    continue
                adjacent = True
                for z in zero_sets:
                    if z != zp and z != zq and common & ~z == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                v = primitive(tuple(sp * b - sq * a for a, b in zip(p, q)))
                new.append((v, common | 1 << k))
        rays = keep + new
    return sorted(r for r, _ in rays)


def enumerate_rays(
    m: int, method: str = "dd", max_m: int | None = None
) -> list[tuple[int, ...]]:
    """Extreme rays of the Kunz cone, primitive and lexicographically sorted."""
    if method == "dd":
        rays = rays_by_double_description(m, max_m)
    elif method == "rank":
        rays = rays_by_rank(m, max_m)
    else:
        raise InputError(f"unknown ray method {method!r}")
    verify_rays(m, rays)
    return rays


def verify_rays(m: int, rays: Sequence[Sequence[int]]) -> None:
    """Feasible, primitive, nonzero, first nonzero coordinate positive,
    no duplicates, and closed under the unit action."""
    ineqs = kunz_inequalities(m)
    seen = set()
    for r in rays:
        r = tuple(r)
        if len(r) != m - 1:
            raise ConsistencyError(f"ray {r} has {len(r)} coordinates, expected {m - 1}")
        if not any(r):
            raise ConsistencyError("zero ray")
        if primitive(r) != r:
            raise ConsistencyError(f"ray {r} is not primitive")
        if next(x for x in r if x) < 0:
            raise ConsistencyError(f"ray {r} has a negative leading coordinate")
        for q in ineqs:
            if q.value(r) < 0:
                raise ConsistencyError(f"ray {r} violates x_{q.i} + x_{q.j} >= x_{q.rhs}")
        if r in seen:
            raise ConsistencyError(f"duplicate ray {r}")
        seen.add(r)
    for u in units(m):
        for r in rays:
            if act_on_vector(u, m, r) not in seen:
                raise ConsistencyError(
                    f"image of {tuple(r)} under unit {u} is missing: ray set incomplete"
                )


# --- ray files ----------------------------------------------------------------

def write_ray_file(path, m: int, rays: Sequence[Sequence[int]]) -> None:
    lines = [f"m {m} rays {len(rays)}"] + [" ".join(map(str, r)) for r in rays]
    Path(path).write_text("\n".join(lines) + "\n")


def read_ray_file(path) -> tuple[int, list[tuple[int, ...]]]:
    text = Path(path).read_text().splitlines()
    rows = [l for l in text if l.strip()]
    if not rows:
        raise InputError(f"{path}: empty ray file")
    head = rows[0].split()
    if len(head) != 4 or head[0] != "m" or head[2] != "rays":
        raise InputError(f"{path}: line 1: expected 'm <m> rays <count>'")
    try:
        m, count = int(head[1]), int(head[3])
        rays = [tuple(int(t) for t in l.split()) for l in rows[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(rays) != count:
        raise InputError(f"{path}: header announces {count} rays, found {len(rays)}")
    for k, r in enumerate(rays, start=2):
        if len(r) != m - 1:
            raise InputError(f"{path}: line {k}: expected {m - 1} integers")
    return m, sorted(rays)


# --- the cone as iterator input ---------------------------------------------------

@dataclass
class KunzCone:
    m: int
    inequalities: list[KunzInequality]
    rays: list[tuple[int, ...]]
    tight: list[int]                 # per inequality: mask of rays it is tight on
    facets: list[int]                # distinct inclusion-maximal tight masks
    facet_inequalities: list[list[int]]
    warnings: list[str] = field(default_factory=list)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def lattice_input(self, emit_top: bool = True) -> LatticeInput:
        n = self.n_rays
        return LatticeInput(n, tuple(AtomSet(n, f) for f in self.facets), emit_top=emit_top)


def build_cone(
    m: int, rays: Sequence[Sequence[int]] | None = None, method: str = "dd",
    max_m: int | None = None,
) -> KunzCone:
    ineqs = kunz_inequalities(m)
    if rays is None:
        rays = enumerate_rays(m, method, max_m)
    else:
        rays = sorted(tuple(r) for r in rays)
        verify_rays(m, rays)
    tight = []
    for q in ineqs:
        mask = 0
        for k, r in enumerate(rays):
            if q.value(r) == 0:
                mask |= 1 << k
        tight.append(mask)
    order: dict[int, list[int]] = {}
    for k, t in enumerate(tight):
        order.setdefault(t, []).append(k)
    distinct = list(order)
    warnings = []
    facets, owners = [], []
    for t in distinct:
        if any(t != s and t & ~s == 0 for s in distinct):
            names = ", ".join(str(ineqs[k]) for k in order[t])
            warnings.append(f"inequality ({names}) does not define a facet; dropped")
            continue
        facets.append(t)
        owners.append(order[t])
    for w in warnings:
        log.warning(w)
    return KunzCone(m, ineqs, list(rays), tight, facets, owners, warnings)


def kunz_input(m: int, rays=None, **kw):
    """``(LatticeInput, rays, inequalities)`` for the face lattice of C_m."""
    cone = build_cone(m, rays, **kw)
    return cone.lattice_input(), cone.rays, cone.inequalities


def tight_inequalities(face: int, cone: KunzCone) -> list[int]:
    return [k for k, t in enumerate(cone.tight) if face & ~t == 0]


def e_t_of_tight(m: int, ineqs: Sequence[KunzInequality]) -> tuple[int, int]:
    rhs = {q.rhs for q in ineqs}
    lhs = {q.i for q in ineqs} | {q.j for q in ineqs}
    return 1 + (m - 1 - len(rhs)), m - 1 - len(lhs)


def face_e_t(face_rays: AtomSet | int, cone: KunzCone) -> tuple[int, int]:
    face = face_rays.mask if isinstance(face_rays, AtomSet) else face_rays
    return e_t_of_tight(cone.m, [cone.inequalities[k] for k in tight_inequalities(face, cone)])


@dataclass(frozen=True)
class Filters:
    use_2e_ge_m: bool = True
    use_e_gt_t: bool = True
    use_3e_ge_m: bool = False

    def is_bad(self, m: int, e: int, t: int) -> bool:
        if self.use_2e_ge_m and 2 * e >= m:
            return False
        if self.use_e_gt_t and e > t:
            return False
        if self.use_3e_ge_m and 3 * e >= m:
            return False
        return True


# --- symmetry -----------------------------------------------------------------------

@dataclass
class OrbitTable:
    units: list[int]
    ray_perm: dict[int, list[int]]      # unit -> image index of each ray
    facet_perm: dict[int, list[int]]    # unit -> image index of each facet
    facet_orbit_id: list[int]

    def image(self, u: int, face: int) -> int:
        perm = self.ray_perm[u]
        out = 0
        while face:
            low = face & -face
            out |= 1 << perm[low.bit_length() - 1]
            face ^= low
        return out

    def canonical(self, face: int) -> tuple[int, ...]:
        """Lexicographically least sorted-ray-index tuple over the orbit."""
        return min(mask_indices(self.image(u, face)) for u in self.units)

    def orbits(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for f, o in enumerate(self.facet_orbit_id):
            groups.setdefault(o, []).append(f)
        return [groups[k] for k in sorted(groups)]


def orbits(cone: KunzCone) -> OrbitTable:
    m = cone.m
    index = {r: k for k, r in enumerate(cone.rays)}
    fidx = {f: k for k, f in enumerate(cone.facets)}
    us = units(m)
    ray_perm, facet_perm = {}, {}
    for u in us:
        perm = []
        for r in cone.rays:
            img = act_on_vector(u, m, r)
            if img not in index:
                raise ConsistencyError(f"unit {u} maps ray {r} outside the ray list")
            perm.append(index[img])
        ray_perm[u] = perm
    table = OrbitTable(us, ray_perm, {}, [])
    for u in us:
        fp = []
        for f in cone.facets:
            img = table.image(u, f)
            if img not in fidx:
                raise ConsistencyError(f"unit {u} maps a facet to a non-facet")
            fp.append(fidx[img])
        facet_perm[u] = fp
    table.facet_perm = facet_perm
    orbit_id = [-1] * len(cone.facets)
    nxt = 0
    for f in range(len(cone.facets)):
        if orbit_id[f] < 0:
            for u in us:
                orbit_id[facet_perm[u][f]] = nxt
            nxt += 1
    table.facet_orbit_id = orbit_id
    return table


# --- bad orbits ------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusRecord:
    rays: tuple[int, ...]          # canonical representative, 1-based ray ids
    tight: tuple[KunzInequality, ...]
    e: int
    t: int

    def line(self) -> str:
        tight = ";".join(str(q) for q in self.tight)
        return f"e={self.e} t={self.t} tight={tight} rays={','.join(map(str, self.rays))}"


def symmetric_tasks(cone: KunzCone) -> list[tuple[int, LatticeInput]]:
    """One ``(facet, descent input)`` per facet orbit.

    Facets are taken in lexicographic order; the first facet met of every
    orbit is processed and afterwards its whole orbit joins the ignored sets.
    """
    table = orbits(cone)
    n = cone.n_rays
    order = sorted(range(len(cone.facets)), key=lambda f: mask_indices(cone.facets[f]))
    coatoms = [cone.facets[f] for f in order]
    owner = {cone.facets[f]: f for f in order}
    ignored: list[int] = []
    tasks = []
    while coatoms:
        a = coatoms[0]
        new = _descent(a, coatoms, ignored)
        tasks.append(
            (a, LatticeInput(n, tuple(AtomSet(n, c) for c in new),
                             tuple(AtomSet(n, y) for y in ignored), emit_top=False))
        )
        orbit = table.facet_orbit_id[owner[a]]
        members = {cone.facets[f] for f, o in enumerate(table.facet_orbit_id) if o == orbit}
        ignored.extend(sorted(members, key=mask_indices))
        coatoms = [c for c in coatoms if c not in members]
    return tasks


def _visit(face: int, cone: KunzCone, table: OrbitTable, filters: Filters, seen: dict):
    e, t = face_e_t(face, cone)
    if not filters.is_bad(cone.m, e, t):
        return
    key = table.canonical(face)
    if key in seen:
        return
    rep = 0
    for i in key:
        rep |= 1 << (i - 1)
    tight = tuple(cone.inequalities[k] for k in tight_inequalities(rep, cone))
    seen[key] = CensusRecord(key, tight, e, t)


def _bad_in_task(args) -> dict:
    head, task, cone, table, filters = args
    seen: dict[tuple[int, ...], CensusRecord] = {}
    _visit(head, cone, table, filters, seen)
    for rec in FaceIterator(task, check=False):
        _visit(rec.atoms.mask, cone, table, filters, seen)
    return seen


def count_bad_orbits(
    m: int, filters: Filters | None = None, cone: KunzCone | None = None,
    workers: int = 1, **cone_kw,
) -> tuple[int, list[CensusRecord]]:
    """Number of bad orbits of faces of C_m, with one census record per orbit.

    The per-orbit facet tasks are independent; with ``workers > 1`` they run
    in a process pool and their canonical records are merged.
    """
    filters = filters or Filters()
    cone = cone or build_cone(m, **cone_kw)
    table = orbits(cone)
    n = cone.n_rays
    seen: dict[tuple[int, ...], CensusRecord] = {}
    _visit((1 << n) - 1, cone, table, filters, seen)
    jobs = [(head, task, cone, table, filters) for head, task in symmetric_tasks(cone)]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_bad_in_task, jobs))
    else:
        parts = [_bad_in_task(j) for j in jobs]
    for part in parts:
        for key, rec in part.items():
            seen.setdefault(key, rec)
    census = sorted(seen.values(), key=lambda r: r.rays)
    return len(census), census


def count_bad_orbits_oracle(
    m: int, filters: Filters | None = None, rays=None, max_faces: int = 2 * 10**6,
) -> int:
    """Bad-orbit count by exhaustive closure, without iterator or pruning.

    Tight sets are evaluated on the ray coordinates and orbits are formed by
    acting on coordinate vectors, so nothing here shares code paths with
    :func:`count_bad_orbits` beyond ray enumeration.
    """
    from .analysis import meet_closure

    filters = filters or Filters()
    ineqs = kunz_inequalities(m)
    rays = enumerate_rays(m) if rays is None else sorted(tuple(r) for r in rays)
    # facets: inclusion-maximal distinct zero sets of the inequalities
    zsets = {frozenset(k for k, r in enumerate(rays) if q.value(r) == 0) for q in ineqs}
    facets = [z for z in zsets if not any(z < w for w in zsets)]
    masks = [sum(1 << k for k in z) for z in facets]
    faces = meet_closure(masks, max_faces)
    faces.add((1 << len(rays)) - 1)
    bad_orbits = set()
    for face in faces:
        members = [rays[i - 1] for i in mask_indices(face)]
        tight = [q for q in ineqs if all(q.value(r) == 0 for r in members)]
        e, t = e_t_of_tight(m, tight)
        if not filters.is_bad(m, e, t):
            continue
        orbit = frozenset(
            frozenset(act_on_vector(u, m, r) for r in members) for u in units(m)
        )
        bad_orbits.add(orbit)
    return len(bad_orbits)


def write_census(path, records: Iterable[CensusRecord]) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.line() + "\n")
