import random
from math import comb

import pytest

from _instances import base_instances, random_lattice
from faceiter.analysis import (
    ContainmentPoset,
    brute_force_faces,
    branching_equivalence,
    cover_relations_graded,
    cover_relations_ungraded,
    f_vector,
    hasse_oracle,
    is_atomic,
    is_coatomic,
    is_locally_branched,
)
from faceiter.atomset import AtomSet
from faceiter.errors import GradednessError, SizeGuardError, StructureError
from faceiter.generators import (
    cross_polytope,
    cyclic,
    example_2_7_left,
    hypercube,
    rp2,
    simplex,
    tight_span_example,
)
from faceiter.lattice_io import LatticeInput, dualize

SQUARE = LatticeInput.build(4, [[1, 2], [1, 4], [2, 3], [3, 4]])


def sets(n, lists):
    return [AtomSet.from_indices(n, x) for x in lists]


def test_fvector_examples():
    assert f_vector(SQUARE).counts == (1, 4, 4, 1)
    fv = f_vector(rp2())
    assert fv.counts == (1, 10, 15, 6, 1)
    assert fv.includes_top and fv.includes_empty
    assert str(fv) == "1 10 15 6 1"
    assert fv.euler_characteristic() == 1 - 6 + 15 - 10 + 1


@pytest.mark.parametrize("d", range(1, 9))
def test_fvector_closed_forms(d):
    s = f_vector(simplex(d)).bottom_up()
    assert s == (1,) + tuple(comb(d + 1, k + 1) for k in range(d)) + (1,)
    h = f_vector(hypercube(d)).bottom_up()
    assert h == (1,) + tuple(2 ** (d - k) * comb(d, k) for k in range(d)) + (1,)
    c = f_vector(cross_polytope(d)).bottom_up()
    assert c == h[::-1]
    for fv in (s, h, c):
        assert sum((-1) ** k * f for k, f in enumerate(fv)) == 0


def test_fvector_dual_and_engines_agree():
    for inp in [hypercube(4), cross_polytope(4), cyclic(4, 8), rp2()]:
        direct = f_vector(inp, dual=False)
        assert f_vector(inp, dual=True).counts == direct.counts
        assert f_vector(inp, engine="python").counts == direct.counts
        assert f_vector(dualize(inp)).counts == direct.counts[::-1]


def test_fvector_without_top():
    assert f_vector(SQUARE.with_top(False)).counts == (4, 4, 1)
    assert not f_vector(SQUARE.with_top(False)).includes_top


def test_brute_force_examples():
    assert len(brute_force_faces(SQUARE)) == 10
    assert brute_force_faces(tight_span_example()) == set(sets(6, [[1, 2], [1], [2]]))
    assert brute_force_faces(LatticeInput(3, (), emit_top=False)) == set()
    with pytest.raises(SizeGuardError):
        brute_force_faces(hypercube(5))


def test_hasse_square():
    g = cover_relations_graded(SQUARE)
    assert len(g.edges) == 16
    assert g.to_text().splitlines()[0] == "levels 1 4 4 1"
    assert g.edge_sets() == cover_relations_ungraded(SQUARE).edge_sets()
    assert g.edge_sets() == hasse_oracle(brute_force_faces(SQUARE))


def test_hasse_simplex_and_chains():
    assert len(cover_relations_graded(simplex(3)).edges) == sum(
        (k + 1) * comb(4, k + 1) for k in range(4)
    )
    # a single coatom never produces the empty face by intersection
    chain = LatticeInput.build(2, [[1]], top=[1, 2])
    assert len(cover_relations_ungraded(chain).edges) == 1
    chain = LatticeInput.build(3, [[1, 2], [2, 3]], top=[1, 2, 3])
    assert len(cover_relations_ungraded(chain).edges) == 4
    # a lone coatom is the top itself: one element, no covers
    alone = cover_relations_graded(LatticeInput.build(1, [[1]]))
    assert len(alone.faces()) == 1 and alone.edges == []


def test_hasse_graded_vs_ungraded_on_polytopes():
    inputs = [simplex(d) for d in range(1, 7)] + [hypercube(d) for d in range(1, 6)]
    inputs += [cross_polytope(d) for d in range(1, 6)] + [cyclic(4, 8), rp2()]
    for inp in inputs:
        g = cover_relations_graded(inp)
        u = cover_relations_ungraded(inp)
        assert g.edge_sets() == u.edge_sets()
        assert len(set(g.edges)) == len(g.edges)


def test_example_2_7_left():
    inp = example_2_7_left()
    u = cover_relations_ungraded(inp)
    faces = u.faces()
    assert len(faces) == 9
    expect = {
        ((), (1,)), ((1,), (1, 2, 3, 4)),
        ((2, 3), (1, 2, 3, 4)), ((2, 4), (1, 2, 3, 4)), ((3, 4), (1, 2, 3, 4)),
        ((2,), (2, 3)), ((3,), (2, 3)), ((2,), (2, 4)), ((4,), (2, 4)),
        ((3,), (3, 4)), ((4,), (3, 4)), ((), (2,)), ((), (3,)), ((), (4,)),
    }
    assert {(a.indices(), b.indices()) for a, b in u.edge_sets()} == expect
    assert u.edge_sets() == hasse_oracle(brute_force_faces(inp))
    with pytest.raises(GradednessError):
        cover_relations_graded(inp)
    poset = ContainmentPoset(brute_force_faces(inp))
    assert poset.is_locally_branched() and poset.rank_function() is None


def test_right_hand_drawing_not_locally_branched():
    # atoms 1-4 (lower row), middle row pairs, upper row triples; the drawing
    # is encoded by atom sets (it is not a lattice as drawn: {1} and {3} have
    # two minimal upper bounds)
    faces = sets(4, [[], [1], [2], [3], [4], [1, 2], [2, 3], [3, 4], [1, 4],
                     [1, 2, 4], [1, 2, 3], [2, 3, 4], [1, 3, 4], [1, 2, 3, 4]])
    assert not is_locally_branched(faces)
    with pytest.raises(StructureError):
        is_atomic(faces)


def test_orthant_neither_atomic_nor_coatomic():
    faces = sets(4, [[], [1], [1, 2], [1, 4], [1, 2, 3, 4]])
    assert not is_atomic(faces)
    assert not is_coatomic(faces)
    assert not is_locally_branched(faces)


def test_boolean_and_square():
    b4 = [AtomSet(4, m) for m in range(16)]
    assert is_atomic(b4) and is_coatomic(b4) and is_locally_branched(b4)
    sq = brute_force_faces(SQUARE)
    assert is_atomic(sq) and is_coatomic(sq) and is_locally_branched(sq)


def test_branching_equivalence_on_random_lattices():
    rng = random.Random(24)
    seen = {True: 0, False: 0}
    for _ in range(120):
        n, fam = random_lattice(rng, max_atoms=8)
        faces = [AtomSet(n, m) for m in fam]
        lb, at, co = branching_equivalence(faces)
        assert lb == at == co
        seen[lb] += 1
    assert seen[True] and seen[False]


def test_rank_function_on_polytopes():
    for inp in base_instances(random.Random(0))[:10]:
        faces = brute_force_faces(inp)
        ranks = ContainmentPoset(faces).rank_function()
        if ranks is not None:
            assert ranks[0] == 0
