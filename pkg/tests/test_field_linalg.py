from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from khss.cube import build_reduced_complex
from khss.diagram import torus
from khss.fields import FieldError, as_field
from khss.linalg import ExactMatrix, LinalgError, compose, rank_kernel_image, solve

from oracles import dense_rank


def test_identity_gf2():
    r = rank_kernel_image(ExactMatrix.identity("GF2", 3))
    assert r.rank == 3 and r.kernel == ()


def test_ones_gf2():
    r = rank_kernel_image(ExactMatrix.from_dense("GF2", [[1, 1], [1, 1]]))
    assert r.rank == 1
    assert [tuple(v) for v in r.kernel] == [(1, 1)]


def test_trefoil_block_against_dense_oracle(oracle):
    c = build_reduced_complex(torus(2, 3), "Q")
    jmin = min(c.qdegrees())
    expect = {(i, j): r for i, j, r in oracle["ranks"]["torus(2,3)"]}
    for (i, j), r in expect.items():
        if j != jmin:
            continue
        m = c.block(i, j)
        assert m.rank() == r
        assert dense_rank(m.to_dense()) == r


def test_compose_identity():
    a = ExactMatrix.from_dense("Q", [[1, 2, 0], [0, Fraction(1, 3), 5]])
    assert compose(a, ExactMatrix.identity("Q", 3)).to_dense() == a.to_dense()


def test_compose_shape_error():
    with pytest.raises(LinalgError):
        compose(ExactMatrix.identity("Q", 2), ExactMatrix.identity("Q", 3))


def test_field_mismatch():
    with pytest.raises(LinalgError):
        compose(ExactMatrix.identity("Q", 2), ExactMatrix.identity("GF2", 2))


@pytest.mark.parametrize("spec", ["Q", "f2", "GF(3)", "F5", 7])
def test_fields_parse(spec):
    assert as_field(spec).char in (0, 2, 3, 5, 7)


@pytest.mark.parametrize("spec", ["GF4", "R", 9])
def test_bad_fields(spec):
    with pytest.raises(FieldError):
        as_field(spec)


mats = st.integers(1, 6).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=60, deadline=None)
@given(mats, st.sampled_from([None, 2, 3]))
def test_rank_matches_dense_oracle(rows, p):
    fld = "Q" if p is None else p
    m = ExactMatrix.from_dense(fld, rows)
    r = rank_kernel_image(m)
    assert r.rank == dense_rank(rows, p)
    assert len(r.kernel) == m.ncols - r.rank
    for v in r.kernel:
        assert all(x == 0 for x in m.apply(list(v)))


@st.composite
def chained(draw):
    r, k, c = (draw(st.integers(1, 5)) for _ in range(3))
    ent = st.integers(-2, 2)
    a = draw(st.lists(st.lists(ent, min_size=k, max_size=k), min_size=r, max_size=r))
    b = draw(st.lists(st.lists(ent, min_size=c, max_size=c), min_size=k, max_size=k))
    return a, b


@settings(max_examples=40, deadline=None)
@given(chained())
def test_rank_of_product(ab):
    A, B = (ExactMatrix.from_dense("Q", m) for m in ab)
    assert compose(A, B).rank() <= min(A.rank(), B.rank())


def test_solve_roundtrip():
    m = ExactMatrix.from_dense("Q", [[2, 1], [1, 3]])
    x = solve(m, [3, 4])
    assert m.apply(x) == [3, 4]
