import pytest

from khss.classical import AlexanderError, alexander_invariants, alexander_polynomial, torus_alexander
from khss.diagram import parse_knot_spec, pretzel, torus, unknot
from khss.homology import khovanov_homology
from khss.laurent import LaurentPoly


def test_unknot():
    assert alexander_polynomial(unknot()) == LaurentPoly.const(1)


def test_p357_trivial():
    assert alexander_polynomial(pretzel(-3, 5, 7)) == LaurentPoly.const(1)


@pytest.mark.parametrize("row", range(6))
def test_torus_against_sympy_oracle(oracle, row):
    a = oracle["alexander"][row]
    p = alexander_polynomial(torus(a["p"], a["q"]))
    assert p.to_list() == (a["lowest_exponent"], a["coefficients"])
    inv = alexander_invariants(torus(a["p"], a["q"]))
    assert (inv.determinant, inv.coeff_abs_sum) == (a["det"], a["abs_sum"])


def test_torus_4_5_named():
    p = alexander_polynomial(torus(4, 5))
    assert p.coeffs() == {-6: 1, -5: -1, -2: 1, 0: -1, 2: 1, 5: -1, 6: 1}
    inv = alexander_invariants(torus(4, 5))
    assert (inv.determinant, inv.coeff_abs_sum) == (5, 7)


@pytest.mark.parametrize("row", range(10))
def test_pd_against_fox_oracle(oracle, row):
    a = oracle["alexander_pd"][row]
    p = alexander_polynomial(parse_knot_spec(a["spec"]))
    assert p.to_list() == (a["lowest_exponent"], a["coefficients"])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_pretzel_abs_sum(n):
    assert alexander_invariants(pretzel(-2, 3, 2 * n + 1)).coeff_abs_sum == 2 * n + 3


def test_p257_abs_sum():
    assert alexander_invariants(pretzel(-2, 5, 7)).coeff_abs_sum == 19


def test_reference_formula_agrees():
    assert torus_alexander(3, 5) == alexander_polynomial(torus(3, 5))


def test_symmetry_and_normalization():
    for spec in ["torus(3,4)", "pretzel(-2,3,7)", "pd([[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]])"]:
        p = alexander_polynomial(parse_knot_spec(spec))
        assert p == p.substitute_inverse()
        assert p.evaluate(1) == 1


def test_jones_cross_check():
    d = pretzel(-2, 3, 5)
    inv = alexander_invariants(d, khovanov_homology(d, "GF2"))
    assert inv.determinant == 1


def test_links_rejected():
    with pytest.raises(AlexanderError):
        alexander_polynomial(torus(2, 4))
