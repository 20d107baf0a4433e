"""Depth-first iteration over the elements of a locally branched lattice.

The lattice is given as a meet semi-sublattice of the boolean lattice by its
coatoms.  The recursion of the algorithm is unrolled into an explicit frame
stack so iteration is pull-based and can be suspended between faces:

* a frame owns its coatom list and its entry point into one shared
  ignored-set stack (the recursive ``ignored_sets.copy()`` becomes "truncate
  back to my base length when I am done");
* the second recursive call of the algorithm is a tail call and is executed
  as the next loop turn of the same frame;
* a descent whose new coatom list is empty is counted as a call but never
  materialized on the stack.

``IterStats.phi`` counts the initial call plus every descent, so with no
ignored atoms it equals the number of emitted faces plus one (the lattice's
cardinality when top and bottom are both emitted).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .atomset import AtomSet
from .errors import InputError
from .lattice_io import LatticeInput, require_valid

TOP_DEPTH = -1


@dataclass(frozen=True)
class FaceRecord:
    """An emitted face and the recursion depth it was emitted at.

    The artificial top is not produced by the recursion and carries depth -1.
    """

    atoms: AtomSet
    depth: int


@dataclass
class IterStats:
    n: int
    m: int
    alpha: int
    phi: int = 0
    max_depth: int = 0
    peak_frames: int = 0
    emitted: int = 0

    def merge(self, other: "IterStats", depth_offset: int = 0) -> None:
        self.phi += other.phi
        self.max_depth = max(self.max_depth, other.max_depth + depth_offset)
        self.peak_frames = max(self.peak_frames, other.peak_frames + depth_offset)
        self.emitted += other.emitted

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _maximal_masks(masks: Sequence[int]) -> list[int]:
    # x survives unless strictly inside some y, or equal to an earlier y
    out = []
    for i, x in enumerate(masks):
        for j, y in enumerate(masks):
            if j != i and x & ~y == 0 and (x != y or j < i):
                break
        else:
            out.append(x)
    return out


def inclusion_maximals(sets: Sequence[AtomSet]) -> list[AtomSet]:
    """Maximal elements under inclusion, first occurrences, original order."""
    if not sets:
        return []
    n = sets[0].capacity
    for s in sets:
        if s.capacity != n:
            raise InputError(f"capacity mismatch: {s.capacity} vs {n}")
    return [AtomSet(n, x) for x in _maximal_masks([s.mask for s in sets])]


def _alpha(inp: LatticeInput) -> int:
    ia = inp.ignored_atoms.mask
    return sum((s.mask | ia).bit_count() for s in inp.coatoms + inp.ignored_sets)


def _top_record(inp: LatticeInput) -> FaceRecord | None:
    if not inp.emit_top:
        return None
    top = inp.top_face()
    if top.mask & inp.ignored_atoms.mask:
        return None
    if top.is_subset_of_any(inp.ignored_sets):
        return None
    if top in inp.coatoms:
        # a lone coatom is already the top; emitting both would repeat it
        return None
    return FaceRecord(top, TOP_DEPTH)


class _Frame:
    __slots__ = ("coatoms", "depth", "base", "pending")

    def __init__(self, coatoms: list[int], depth: int, base: int):
        self.coatoms = coatoms
        self.depth = depth
        self.base = base
        self.pending = None


def _descent(a: int, coatoms: list[int], ignored: list[int]) -> list[int]:
    new = []
    for k in range(1, len(coatoms)):
        x = a & coatoms[k]
        for y in ignored:
            if x & ~y == 0:
                break
        else:
            new.append(x)
    return _maximal_masks(new)


class FaceIterator:
    """Stream of :class:`FaceRecord` for one input.

    Nothing is computed until the first record is requested.  ``stats`` is
    updated as iteration proceeds and final once the stream is exhausted;
    ``live_frames`` is the current height of the frame stack.
    """

    def __init__(self, inp: LatticeInput, check: bool = True):
        if check:
            require_valid(inp)
        self.input = inp
        self.stats = IterStats(inp.n_atoms, len(inp.coatoms), _alpha(inp))
        self.live_frames = 0
        self._gen = self._run()

    def __iter__(self) -> "FaceIterator":
        return self

    def __next__(self) -> FaceRecord:
        return next(self._gen)

    def _run(self) -> Iterator[FaceRecord]:
        inp = self.input
        st = self.stats
        n = inp.n_atoms
        ia = inp.ignored_atoms.mask
        top = _top_record(inp)
        if top is not None:
            st.emitted += 1
            yield top

        ignored = [s.mask for s in inp.ignored_sets]
        stack = [_Frame([c.mask for c in inp.coatoms], 0, len(ignored))]
        st.phi = 1
        st.peak_frames = self.live_frames = 1
        while stack:
            fr = stack[-1]
            a = fr.pending
            if a is not None:
                # back from the descent below a: drop coatoms inside a, ignore a
                fr.pending = None
                aI = a | ia
                fr.coatoms = [x for x in fr.coatoms if x & ~aI]
                ignored.append(aI)
                continue
            if not fr.coatoms:
                stack.pop()
                del ignored[fr.base:]
                self.live_frames = len(stack)
                continue
            a = fr.coatoms[0]
            fr.pending = a
            if not a & ia:
                st.emitted += 1
                yield FaceRecord(AtomSet(n, a), fr.depth)
            new = _descent(a, fr.coatoms, ignored)
            st.phi += 1
            if fr.depth + 1 > st.max_depth:
                st.max_depth = fr.depth + 1
            if new:
                stack.append(_Frame(new, fr.depth + 1, len(ignored)))
                self.live_frames = len(stack)
                if self.live_frames > st.peak_frames:
                    st.peak_frames = self.live_frames


def face_iterator(inp: LatticeInput, check: bool = True) -> FaceIterator:
    return FaceIterator(inp, check)


def run(inp: LatticeInput) -> tuple[list[FaceRecord], IterStats]:
    """Materialize a whole run; convenient for tests and small inputs."""
    it = FaceIterator(inp)
    faces = list(it)
    return faces, it.stats


# --- work splitting ----------------------------------------------------------

@dataclass(frozen=True)
class WorkTask:
    """One independent unit of a split run.

    ``heads`` are emitted by the driver before the task runs; the task's own
    records are shifted by ``depth_offset`` to match the sequential depths.
    """

    input: LatticeInput
    heads: tuple[FaceRecord, ...] = ()
    depth_offset: int = 0


def split_tasks(inp: LatticeInput, max_tasks: int) -> list[WorkTask]:
    """Split at the top-level loop: one task per leading coatom plus a remainder.

    Task ``j < k`` is the descent below the ``j``-th top-level coatom,
    with the ignored sets that the sequential run would carry at that point.
    The last task is the top-level loop resumed after ``k-1`` coatoms.
    """
    if not isinstance(max_tasks, int) or max_tasks < 1:
        raise InputError(f"max_tasks must be a positive integer, got {max_tasks!r}")
    require_valid(inp)
    if max_tasks == 1 or len(inp.coatoms) <= 1:
        return [WorkTask(inp)]
    n = inp.n_atoms
    ia = inp.ignored_atoms.mask
    coatoms = [c.mask for c in inp.coatoms]
    ignored = [s.mask for s in inp.ignored_sets]
    top = _top_record(inp)
    pre = (top,) if top is not None else ()

    def mk(cs: list[int], ig: list[int]) -> LatticeInput:
        return LatticeInput(
            n, tuple(AtomSet(n, c) for c in cs), tuple(AtomSet(n, y) for y in ig),
            inp.ignored_atoms, emit_top=False,
        )

    tasks = []
    while coatoms and len(tasks) < max_tasks - 1:
        a = coatoms[0]
        heads = pre + ((FaceRecord(AtomSet(n, a), 0),) if not a & ia else ())
        pre = ()
        tasks.append(WorkTask(mk(_descent(a, coatoms, ignored), ignored), heads, 1))
        aI = a | ia
        coatoms = [x for x in coatoms if x & ~aI]
        ignored.append(aI)
    if coatoms:
        tasks.append(WorkTask(mk(coatoms, ignored), pre, 0))
    return tasks


def split_work(inp: LatticeInput, max_tasks: int) -> list[LatticeInput]:
    return [t.input for t in split_tasks(inp, max_tasks)]


def _run_task(task: WorkTask) -> tuple[list[tuple[int, int]], IterStats]:
    it = FaceIterator(task.input, check=False)
    return [(r.atoms.mask, r.depth) for r in it], it.stats


def run_tasks(
    inp: LatticeInput, tasks: Sequence[WorkTask], workers: int = 1
) -> tuple[list[FaceRecord], IterStats]:
    """Run split tasks (in worker processes when ``workers > 1``) and merge.

    Records come back in task order; the stats are those of the equivalent
    sequential run (``phi`` sums exactly because every task's first call is a
    call of the sequential run).
    """
    total = IterStats(inp.n_atoms, len(inp.coatoms), _alpha(inp))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    n = inp.n_atoms
    out: list[FaceRecord] = []
    has_remainder = False
    for task, (recs, st) in zip(tasks, results):
        out.extend(task.heads)
        total.emitted += len(task.heads)
        out.extend(FaceRecord(AtomSet(n, m), d + task.depth_offset) for m, d in recs)
        total.merge(st, task.depth_offset)
        has_remainder |= task.depth_offset == 0
    if not has_remainder:
        total.phi += 1
    return out, total


def parallel_run(inp: LatticeInput, n_tasks: int, workers: int | None = None):
    """Split into ``n_tasks`` and run them; ``workers`` defaults to ``n_tasks``
    capped at the CPU count."""
    tasks = split_tasks(inp, n_tasks)
    if workers is None:
        workers = min(n_tasks, os.cpu_count() or 1)
    return run_tasks(inp, tasks, workers)
