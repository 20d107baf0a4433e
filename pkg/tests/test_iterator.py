from collections import Counter

import pytest

from _instances import brute_force_faces, random_cases
from faceiter._kernel import count_by_depth
from faceiter.atomset import AtomSet
from faceiter.errors import InputError
from faceiter.generators import (
    complex_example,
    hypercube,
    rp2,
    simplex,
    tight_span_example,
)
from faceiter.iterator import (
    TOP_DEPTH,
    FaceIterator,
    inclusion_maximals,
    parallel_run,
    run,
    run_tasks,
    split_tasks,
    split_work,
)
from faceiter.lattice_io import LatticeInput, far_face_mode

SQUARE = LatticeInput.build(4, [[1, 2], [1, 4], [2, 3], [3, 4]])


def ids(records):
    return [r.atoms.indices() for r in records]


def test_square_trace():
    recs, st = run(SQUARE)
    assert ids(recs) == [
        (1, 2, 3, 4), (1, 2), (1,), (), (2,), (1, 4), (4,), (2, 3), (3,), (3, 4)
    ]
    assert [r.depth for r in recs] == [TOP_DEPTH, 0, 1, 2, 1, 0, 1, 0, 1, 0]
    assert st.phi == 10 and st.max_depth == 3 and st.emitted == 10


def test_square_without_top():
    recs, _ = run(SQUARE.with_top(False))
    assert len(recs) == 9 and ids(recs)[0] == (1, 2)


def test_rp2_groups():
    recs, st = run(rp2())
    got = ids(recs)[1:]
    groups = [
        [(1, 2, 4), (1, 2), (1,), (), (2,), (1, 4), (4,), (2, 4)],
        [(1, 2, 6), (1, 6), (6,), (2, 6)],
        [(1, 3, 4), (1, 3), (3,), (3, 4)],
        [(1, 3, 5), (1, 5), (5,), (3, 5)],
        [(1, 5, 6), (5, 6)],
        [(2, 3, 5), (2, 3), (2, 5)],
        [(2, 3, 6), (3, 6)],
        [(2, 4, 5), (4, 5)],
        [(3, 4, 6), (4, 6)],
        [(4, 5, 6)],
    ]
    assert got == [f for g in groups for f in g]
    assert len(got) == 32


def test_tight_span():
    assert ids(run(tight_span_example())[0]) == [(1, 2), (1,), (2,)]


def test_complex_correct_application():
    out = []
    for cell in complex_example():
        out += ids(run(cell)[0])
    W, N, E, S, O = 1, 2, 3, 4, 5
    expect = [{W, N, O}, {W, O}, {O}, {N, O}, {N, E, O}, {E, O}, {S, E, O}, {S, O}]
    assert [set(x) for x in out] == expect


def test_far_face_orthant():
    orth = far_face_mode(SQUARE, AtomSet.from_indices(4, [3, 4]))
    got = set(ids(run(orth)[0]))
    assert got == {(1, 2, 3, 4), (1, 2), (1, 4), (2, 3), (1,), (2,)}


def test_ignored_atoms_suppress_faces():
    inp = LatticeInput.build(4, [[1, 2], [1, 4], [2, 3], [3, 4]], ignored_atoms=[3])
    got = set(ids(run(inp)[0]))
    assert got == {(1, 2), (1, 4), (1,), (2,), (4,), ()}


def test_stream_is_lazy_and_memory_bounded():
    inp = hypercube(8)
    it = FaceIterator(inp)
    first = [next(it) for _ in range(3)]
    assert first[0].depth == TOP_DEPTH
    peak = 0
    for _ in it:
        peak = max(peak, it.live_frames)
    assert peak <= 9
    assert it.stats.peak_frames <= 9


def test_inclusion_maximals():
    s = [AtomSet.from_indices(4, x) for x in ([1], [1, 2], [1, 2], [3], [])]
    assert [x.indices() for x in inclusion_maximals(s)] == [(1, 2), (3,)]


def test_invalid_input_refused():
    with pytest.raises(InputError):
        list(FaceIterator(LatticeInput.build(3, [[1, 2], [1]])))


def test_exactly_once_on_random_inputs():
    for inp in random_cases(11, 200):
        faces = [r.atoms for r in FaceIterator(inp)]
        assert len(faces) == len(set(faces))
        assert set(faces) == brute_force_faces(inp)


def test_depths_are_levels_for_polytopes():
    recs, _ = run(simplex(4))
    for r in recs:
        if r.depth >= 0:
            assert len(r.atoms) == 4 - r.depth


# --- splitting ---------------------------------------------------------------------

def test_split_square_four_tasks():
    tasks = split_tasks(SQUARE, 4)
    assert len(tasks) == 4
    recs, st = run_tasks(SQUARE, tasks)
    seq, sst = run(SQUARE)
    assert recs == seq
    assert st.phi == sst.phi and st.max_depth == sst.max_depth


@pytest.mark.parametrize("k", [1, 2, 3, 8, 50])
def test_split_matches_sequential(k):
    for inp in list(random_cases(5, 40)) + [rp2(), hypercube(4)]:
        seq, sst = run(inp)
        recs, st = run_tasks(inp, split_tasks(inp, k))
        assert recs == seq
        assert st.phi == sst.phi and st.emitted == sst.emitted


def test_split_work_inputs_and_errors():
    assert len(split_work(rp2(), 3)) == 3
    with pytest.raises(InputError):
        split_tasks(rp2(), 0)


def test_parallel_run_with_workers():
    inp = hypercube(5)
    recs, st = parallel_run(inp, 3, workers=2)
    seq, sst = run(inp)
    assert Counter(recs) == Counter(seq)
    assert st.phi == sst.phi


# --- compiled counter ------------------------------------------------------------

def test_kernel_agrees_with_iterator():
    for inp in list(random_cases(3, 300)) + [hypercube(6), rp2()]:
        recs, st = run(inp)
        counts, kst, empty = count_by_depth(inp)
        assert counts == dict(Counter(r.depth for r in recs))
        assert kst.as_dict() == st.as_dict()
        assert empty == any(not r.atoms for r in recs)


def test_kernel_wide_masks():
    inp = hypercube(7)  # 128 atoms, two words
    recs, st = run(inp)
    counts, kst, _ = count_by_depth(inp)
    assert counts == dict(Counter(r.depth for r in recs))
    assert kst.phi == st.phi
