import pytest

from khss.cube import CubeError, build_reduced_complex, d_squared_is_zero, vertex_circle_count
from khss.diagram import parse_knot_spec, pretzel, torus, unknot


def test_unknot_single_cell():
    c = build_reduced_complex(unknot(), "Q")
    assert c.dims() == {(0, -1): 1}
    assert c.dump() == ""


def test_trefoil_total_rank():
    from khss.homology import bigraded_homology

    assert bigraded_homology(build_reduced_complex(torus(2, 3), "Q")).total == 3


def test_torus_4_5_size():
    c = build_reduced_complex(torus(4, 5), "GF2")
    assert c.cube.count.shape[0] == 2 ** 15


def test_circle_counts_match_oracle(oracle):
    for row in oracle["circles"]:
        d = parse_knot_spec(row["spec"])
        assert vertex_circle_count(d, row["v"]) == row["count"]


def test_circle_counts_named_cases():
    d = parse_knot_spec("braid(1,1,1)")
    assert vertex_circle_count(d, (0, 0, 0)) == 2
    assert vertex_circle_count(d, (1, 0, 0)) == 1
    assert vertex_circle_count(d, (1, 1, 1)) == 3


def test_adjacent_vertices_differ_by_one():
    d = pretzel(-2, 3, 3)
    n = d.n_crossings
    for v in range(1 << n):
        bits = [(v >> k) & 1 for k in range(n)]
        a = vertex_circle_count(d, bits)
        for k in range(n):
            if not bits[k]:
                w = list(bits)
                w[k] = 1
                assert abs(vertex_circle_count(d, w) - a) == 1


@pytest.mark.parametrize("spec", ["torus(2,3)", "torus(3,4)", "pretzel(-2,3,5)",
                                  "pd([[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]])",
                                  "braid(1,-2,1,-2,1,-2)", "pretzel(-3,4,5)"])
@pytest.mark.parametrize("field", ["Q", "GF2", "GF3"])
def test_d_squared_zero(spec, field):
    assert d_squared_is_zero(build_reduced_complex(parse_knot_spec(spec), field))


def test_generator_count():
    d = torus(3, 4)
    c = build_reduced_complex(d, "Q")
    expect = sum(2 ** (vertex_circle_count(d, [(v >> k) & 1 for k in range(8)]) - 1)
                 for v in range(1 << 8))
    assert c.n_generators == expect


def test_differential_preserves_j():
    c = build_reduced_complex(torus(2, 5), "Q")
    rows, cols, _ = c.entries()
    assert all(c.qdeg[r] == c.qdeg[s] and c.ideg[s] == c.ideg[r] + 1 for r, s in zip(rows, cols))


def test_cap(monkeypatch):
    with pytest.raises(CubeError):
        build_reduced_complex(torus(2, 5), "Q", cap=4)
    monkeypatch.setenv("KHSS_CROSSING_CAP", "3")
    with pytest.raises(CubeError):
        build_reduced_complex(torus(2, 5), "Q")


def test_dump_is_deterministic():
    a = build_reduced_complex(torus(2, 3), "Q").dump()
    b = build_reduced_complex(torus(2, 3), "Q").dump()
    assert a == b and a.count("\n") >= 1
