import json

import pytest
from hypothesis import given, strategies as st

from faceiter.atomset import AtomSet
from faceiter.errors import InputError
from faceiter.generators import hypercube, rp2, tight_span_example
from faceiter.lattice_io import (
    LatticeInput,
    complex_inputs,
    dualize,
    far_face_mode,
    fix,
    parse,
    render,
    require_valid,
    validate,
)

SQUARE = LatticeInput.build(4, [[1, 2], [1, 4], [2, 3], [3, 4]])


def codes(report):
    return [c for c, _ in report.errors]


def test_square_is_valid():
    assert validate(SQUARE).ok
    assert validate(SQUARE).lines() == ["ok"]


def test_validation_errors():
    assert codes(validate(LatticeInput.build(4, [[1, 2], [1, 2]]))) == ["duplicate_coatom"]
    assert codes(validate(LatticeInput.build(4, [[1, 2], [1]]))) == ["nested_coatoms"]
    rep = validate(LatticeInput.build(4, [[1, 2], [3, 4]], ignored_sets=[[1, 2, 3]]))
    assert codes(rep) == ["coatom_in_ignored"]
    mixed = LatticeInput(4, (AtomSet.from_indices(4, [1]), AtomSet.from_indices(5, [2])))
    assert codes(validate(mixed)) == ["capacity"]
    warn = validate(LatticeInput.build(5, [[1, 2], [2, 3]]))
    assert warn.ok and [c for c, _ in warn.warnings] == ["unused_atom"] * 2
    with pytest.raises(InputError):
        require_valid(LatticeInput.build(4, [[1, 2], [1]]))


def test_fix_is_opt_in():
    bad = LatticeInput.build(4, [[1, 2], [1], [1, 2], [3, 4]], ignored_sets=[[3, 4]])
    assert not validate(bad).ok
    fixed = fix(bad)
    assert [c.indices() for c in fixed.coatoms] == [(1, 2)]
    assert validate(fixed).ok


def test_dualize():
    d = dualize(SQUARE)
    assert d.n_atoms == 4 and len(d.coatoms) == 4
    assert all(len(c) == 2 for c in d.coatoms)
    r = dualize(rp2())
    assert r.n_atoms == 10 and len(r.coatoms) == 6
    assert dualize(dualize(SQUARE)).coatoms == SQUARE.coatoms
    with pytest.raises(InputError):
        dualize(tight_span_example())


def test_far_face_mode():
    orth = far_face_mode(SQUARE, AtomSet.from_indices(4, [3, 4]))
    assert [c.indices() for c in orth.coatoms] == [(1, 2), (1, 4), (2, 3)]
    assert orth.ignored_sets == (AtomSet.from_indices(4, [3, 4]),)


def test_complex_inputs_ignore_earlier_tops():
    cells = [LatticeInput.build(3, [[1, 2], [2, 3]]), LatticeInput.build(3, [[2, 3], [1, 3]])]
    out = complex_inputs(cells)
    assert out[1].ignored_sets[0] == AtomSet.from_indices(3, [1, 2, 3])
    assert out[1].coatoms == ()


def test_parse_formats():
    assert parse("4\n1 2\n1 4\n2 3\n3 4\n") == SQUARE
    assert parse(json.dumps(SQUARE.as_lists())) == SQUARE
    t = parse("# tight span\n6\n@no-top\n1 2 3 4\n1 2 5 6\n1 3 6\n2 4 5\n! 3 4 5 6\n~ 3 4 5 6\n")
    assert t == tight_span_example()
    e = parse("2\n{}\n", check=False)
    assert e.coatoms == (AtomSet.empty(2),)


def test_parse_errors_locate_problem():
    with pytest.raises(InputError, match="line 3, column 3"):
        parse("3\n1 2\n1 5\n")
    with pytest.raises(InputError, match="line 2"):
        parse("3\n1 x\n")
    with pytest.raises(InputError, match="line 1"):
        parse('{"n_atoms": 3,')
    with pytest.raises(InputError):
        parse('{"n_atoms": 3, "coatoms": [[1, "a"]]}')
    with pytest.raises(InputError, match="contained in coatom"):
        parse("3\n1 2\n1\n")


inputs = st.integers(1, 8).flatmap(
    lambda n: st.builds(
        lambda cs, ig, ia, top: LatticeInput.build(n, cs, ig, ia, top),
        st.lists(st.sets(st.integers(1, n)), max_size=5),
        st.lists(st.sets(st.integers(1, n)), max_size=3),
        st.sets(st.integers(1, n)),
        st.booleans(),
    )
)


@given(inputs, st.sampled_from(["json", "text"]))
def test_render_parse_roundtrip(inp, fmt):
    assert parse(render(inp, fmt), fmt, check=False) == inp


def test_roundtrip_designated_top():
    inp = LatticeInput.build(5, [[1, 5]], top=[1, 2, 5])
    for fmt in ("json", "text"):
        assert parse(render(inp, fmt), check=False) == inp


def test_generators_roundtrip():
    inp = hypercube(4)
    assert parse(render(inp, "text")) == inp
