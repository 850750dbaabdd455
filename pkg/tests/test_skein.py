import pytest

from khss.cube import build_reduced_complex
from khss.diagram import canonical_key, parse_knot_spec, pretzel, torus
from khss.homology import best_translation, khovanov_homology
from khss.skein import (CobordismDescriptor, SkeinError, chain_map_defect, check_declared_components,
                        cobordism_order_bound, compose_maps, cone_rank_check, connecting_chain_map,
                        face_map, identity_map, inclusion_chain_map, les_homology_maps,
                        les_rank_bounds, possible_components, projection_chain_map, saddle_chain,
                        skein_triple)
from khss.sseq import derive_marks_declared


@pytest.mark.parametrize("n", [1, 2, 3])
def test_torus_triple(n):
    d = torus(2, 2 * n + 1)
    t = skein_triple(d, 2 * n)
    assert canonical_key(t.d0) == canonical_key(torus(2, 2 * n))
    assert khovanov_homology(t.d1, "Q").cells == {(0, -1): 1}


def test_pretzel_first_band_triple():
    t = skein_triple(pretzel(-2, 3, 5), 0)
    assert canonical_key(t.d1) == canonical_key(pretzel(-1, 3, 5))
    assert t.d0.n_components() == 2
    ref = khovanov_homology(torus(2, 8), "Q")
    assert best_translation(khovanov_homology(t.d0, "Q"), ref.cells) is not None


def test_p357_first_band_triple():
    t = skein_triple(pretzel(-3, 5, 7), 0)
    assert canonical_key(t.d1) == canonical_key(pretzel(-2, 5, 7))
    assert t.d0.n_components() == 2 and t.d0.n_crossings == 14


def test_trefoil_les():
    m = les_homology_maps(skein_triple(torus(2, 3), 2), "Q")
    a, b, c = m.tables
    assert (a.total, b.total, c.total) == (1, 3, 2)
    assert m.is_exact()


@pytest.mark.parametrize("spec", ["torus(2,5)", "pd([[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]])",
                                  "pretzel(-2,3,3)", "torus(3,4)"])
@pytest.mark.parametrize("field", ["Q", "GF2"])
def test_les_exact_everywhere(spec, field):
    d = parse_knot_spec(spec)
    for c in range(0, d.n_crossings, 2):
        assert les_homology_maps(skein_triple(d, c), field).is_exact()


@pytest.mark.parametrize("c", [0, 3])
def test_chain_maps_commute(c):
    d = pretzel(-2, 3, 3)
    t = skein_triple(d, c)
    big = build_reduced_complex(d, "Q")
    c0 = build_reduced_complex(t.d0, "Q")
    c1 = build_reduced_complex(t.d1, "Q")
    assert chain_map_defect(c1, big, inclusion_chain_map(big, c1, c)) == 0
    assert chain_map_defect(big, c0, projection_chain_map(big, c0, c)) == 0
    assert chain_map_defect(c0, c1, connecting_chain_map(big, c0, c1, c), signed=-1) == 0


def test_identity_composition():
    m = les_homology_maps(skein_triple(torus(2, 5), 1), "Q").projection
    same = compose_maps(m, identity_map(m.target))
    assert same.rank == m.rank and same.cell_ranks() == m.cell_ranks()


def test_saddle_chain_equals_face_map():
    d = pretzel(-2, 3, 5)
    a, end = saddle_chain(d, [6, 5], "Q")
    b, small = face_map(d, [5, 6], 0, "Q")
    assert canonical_key(end) == canonical_key(small)
    assert a.cell_ranks() == b.cell_ranks() and a.shift == b.shift


@pytest.mark.parametrize("n,band", [(3, [10, 11]), (4, [10, 11, 12, 13])])
def test_handle_composite_onto(n, band):
    phi, small = face_map(pretzel(-2, 3, 2 * n + 1), band, 0, "GF2")
    assert phi.target == khovanov_homology(pretzel(-2, 3, 5), "GF2")
    assert phi.rank == phi.target.total == 7


def test_face_map_errors():
    with pytest.raises(SkeinError):
        face_map(torus(2, 3), [], 0)
    with pytest.raises(SkeinError):
        face_map(torus(2, 3), [5], 0)


def test_cone_rank():
    assert cone_rank_check(9, 7, 2, 7)
    assert all(cone_rank_check(9, 6 + 2 * b, 3, 6 + b) for b in range(6))
    assert not cone_rank_check(1, 1, 0, 0)
    assert les_rank_bounds(3, 1) == (2, 4)


def test_order_bounds():
    assert cobordism_order_bound(CobordismDescriptor(-2, 0)) == (0, -2)
    assert cobordism_order_bound(CobordismDescriptor(-1, 22)) == (11, 32)
    assert cobordism_order_bound(CobordismDescriptor(0, 0)) == (0, 0)
    with pytest.raises(SkeinError):
        cobordism_order_bound(CobordismDescriptor(-1, 3))


def test_movie_chi_checked():
    with pytest.raises(SkeinError):
        CobordismDescriptor(-1, 0, movie=(("torus(2,3)", 0, "out"), ("torus(2,3)", 1, "out")))


def test_declared_components():
    src = khovanov_homology(torus(2, 3), "Q")
    tgt = khovanov_homology(torus(2, 5), "Q")
    c = CobordismDescriptor(0, 0)
    assert possible_components(src, tgt, (0, 2)) == [((0, 1), (0, 3)), ((2, 5), (2, 7)), ((3, 7), (3, 9))]
    assert possible_components(src, tgt, (1, 2)) == []
    empty = derive_marks_declared(c, src, tgt, "unknown", "unknown")
    assert all(len(m) == 0 for m in empty)
    bad = CobordismDescriptor(0, 0, declared=(((0, 1), (0, 1)),))
    with pytest.raises(SkeinError):
        check_declared_components(bad, src, tgt)
