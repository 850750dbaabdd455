import pytest
from hypothesis import given, settings, strategies as st

from khss.diagram import (DiagramError, KnotSpecError, canonical_key, diagram_stats, from_pd,
                          mirror, parse_knot_spec, pretzel, resolve_crossing, switch_crossing,
                          torus, unknot)
from khss.homology import khovanov_homology

from oracles import trace


def test_parse_unknot():
    d = parse_knot_spec("unknot")
    assert d.n_crossings == 0 and d.n_components() == 1


def test_parse_pretzel_357_is_knot():
    d = parse_knot_spec("pretzel(-3,5,7)")
    assert d.n_crossings == 15 and d.n_components() == 1


def test_parse_torus_link_matches_tracing_oracle(oracle):
    d = parse_knot_spec("torus(2,4)")
    assert d.n_crossings == 4 and d.n_components() == 2
    row = next(r for r in oracle["khr"] if r["spec"] == "torus(2,4)")
    assert row["components"] == 2


@pytest.mark.parametrize("row", range(9))
def test_signs_match_tracing_oracle(oracle, row):
    r = oracle["khr"][row]
    d = parse_knot_spec(r["spec"])
    assert (d.n_plus, d.n_minus) == (r["n_plus"], r["n_minus"])
    assert d.n_components() == r["components"]


@pytest.mark.parametrize("text", ["pretzel(1,2)", "torus(1,3)", "pd([1,2,3])", "foo(1)",
                                  "torus(2,3) x", "pretzel(0,3,5)", "mirror(torus(2,3)"])
def test_bad_specs(text):
    with pytest.raises(KnotSpecError):
        parse_knot_spec(text)


def test_spec_error_has_position():
    with pytest.raises(KnotSpecError) as exc:
        parse_knot_spec("torus(2,3) x")
    assert exc.value.position is not None


def test_pd_validation():
    with pytest.raises((DiagramError, KnotSpecError)):
        from_pd([[1, 2, 3, 4]])


def test_resolve_torus_2_4_last_crossing():
    d = torus(2, 4)
    r0 = resolve_crossing(d, 3, 0)
    r1 = resolve_crossing(d, 3, 1)
    # oriented smoothing gives T(2,3), the other one an unknot with kinks
    assert canonical_key(r0) == canonical_key(torus(2, 3))
    assert r1.n_components() == 1
    assert khovanov_homology(r1, "Q").cells == {(0, -1): 1}


def test_resolve_second_band_of_p357():
    d = pretzel(-3, 5, 7)
    assert canonical_key(resolve_crossing(d, 4, 0)) == canonical_key(pretzel(-3, 4, 7))


def test_resolve_first_band_of_p357():
    d = pretzel(-3, 5, 7)
    assert canonical_key(resolve_crossing(d, 0, 1)) == canonical_key(pretzel(-2, 5, 7))


def test_mirror_involution():
    d = pretzel(-2, 3, 5)
    assert mirror(mirror(d)).crossings == d.crossings
    assert mirror(mirror(d)).signs == d.signs


def test_mirror_swaps_signs():
    d = torus(2, 3)
    m = mirror(d)
    assert (d.n_plus, d.n_minus) == (3, 0)
    assert (m.n_plus, m.n_minus) == (0, 3)


def test_mirror_table_reflects():
    d = torus(2, 3)
    assert khovanov_homology(mirror(d), "Q") == khovanov_homology(d, "Q").mirrored()


def test_stats():
    assert diagram_stats(unknot())["components"] == 1
    assert diagram_stats(unknot())["writhe"] == 0
    assert diagram_stats(pretzel(-2, 5, 7))["components"] == 1
    assert diagram_stats(torus(2, 12))["components"] == 2


def test_switch_crossing_changes_sign_only():
    d = torus(2, 5)
    s = switch_crossing(d, 2)
    assert s.n_crossings == 5 and s.n_minus == 1
    assert canonical_key(s) != canonical_key(d)


def test_canonical_key_ignores_relabeling():
    d = torus(2, 5)
    shifted = from_pd([[e + 100 for e in x] for x in d.crossings])
    assert canonical_key(shifted) == canonical_key(d)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=7))
def test_braid_components_match_tracing(word):
    d = parse_knot_spec("braid(" + ",".join(map(str, word)) + ")")
    if d.n_crossings == 0:
        return
    comps, signs = trace([list(x) for x in d.crossings])
    assert comps + len(d.loops) == d.n_components()
    if d.n_components() == 1:
        # a link component that only passes over has no orientation fixed by the PD code
        assert signs == list(d.signs)
