from hypothesis import given, strategies as st

from faceiter.exact import dot, nullspace, primitive, rank


def test_rank_and_nullspace_small():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0], [0, 1]]) == 2
    assert nullspace([[2, -1]], 2) == [(1, 2)]
    ns = nullspace([[1, 1, -1]], 3)
    assert len(ns) == 2 and all(dot([1, 1, -1], v) == 0 for v in ns)
    assert primitive((4, -6, 0)) == (2, -3, 0)


matrices = st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=1, max_size=5)
)


@given(matrices)
def test_nullspace_is_kernel_of_right_dimension(rows):
    ncols = len(rows[0])
    ns = nullspace(rows, ncols)
    assert len(ns) == ncols - rank(rows, ncols)
    for v in ns:
        assert any(v)
        assert primitive(v) == v
        assert all(dot(r, v) == 0 for r in rows)
    if ns:
        assert rank([list(v) for v in ns], ncols) == len(ns)
