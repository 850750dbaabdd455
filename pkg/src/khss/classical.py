"""Alexander polynomial from a PD code via Fox calculus.

Arcs of the diagram are the over-strands: at each crossing ``(a, b, c, d)``
edges ``b`` and ``d`` lie on the same arc while the under-strand breaks
between ``a`` (incoming) and ``c`` (outgoing).  The Wirtinger relation at a
crossing of sign ``e`` is ``x_out = x_over^e x_in x_over^-e``; its abelianized
Fox derivatives form one row of the Alexander matrix.  Deleting one row and
one column and taking the determinant gives the polynomial up to a unit
``+-t^k``, which is then fixed by symmetry and ``Delta(1) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import DiagramError, PlanarDiagram
from .laurent import LaurentPoly

ONE = LaurentPoly.const(1)
T = LaurentPoly.monomial(1)
TINV = LaurentPoly.monomial(-1)


class AlexanderError(DiagramError):
    pass


def _arcs(d: PlanarDiagram) -> dict[int, int]:
    parent = {e: e for e in d.edges()}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for a, b, c, e in d.crossings:
        rb, re_ = find(b), find(e)
        if rb != re_:
            parent[max(rb, re_)] = min(rb, re_)
    reps = sorted({find(e) for e in parent})
    index = {r: k for k, r in enumerate(reps)}
    return {e: index[find(e)] for e in parent}


def alexander_matrix(d: PlanarDiagram) -> list[list[LaurentPoly]]:
    """Square Alexander matrix (rows: crossings, columns: arcs)."""
    arc = _arcs(d)
    n = d.n_crossings
    if len(set(arc.values())) != n:
        raise AlexanderError("diagram is not a connected knot projection")
    m = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
    for r, ((a, b, c, e), sign) in enumerate(zip(d.crossings, d.signs)):
        over, inc, out = arc[b], arc[a], arc[c]
        if sign > 0:
            m[r][over] = m[r][over] + (ONE - T)
            m[r][inc] = m[r][inc] + T
        else:
            m[r][over] = m[r][over] + (ONE - TINV)
            m[r][inc] = m[r][inc] + TINV
        m[r][out] = m[r][out] - ONE
    return m


def laurent_det(m: list[list[LaurentPoly]]) -> LaurentPoly:
    """Determinant by fraction-free (Bareiss) elimination with exact division."""
    n = len(m)
    if n == 0:
        return ONE
    a = [row[:] for row in m]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not a[r][k].is_zero()), None)
            if swap is None:
                return LaurentPoly()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = LaurentPoly()
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def normalize_alexander(p: LaurentPoly) -> LaurentPoly:
    """Center the support and make ``Delta(1) = 1``."""
    if p.is_zero():
        raise AlexanderError("Alexander determinant vanished")
    lo, hi = p.min_exp, p.max_exp
    if (lo + hi) % 2:
        raise AlexanderError("support cannot be centered (not a knot?)")
    q = p.shift(-(lo + hi) // 2)
    v1 = q.evaluate(1)
    if v1 not in (1, -1):
        raise AlexanderError(f"Delta(1) = {v1}, expected +-1")
    if v1 < 0:
        q = -q
    if q != q.substitute_inverse():
        raise AlexanderError("normalized polynomial is not symmetric")
    return q


def alexander_polynomial(d: PlanarDiagram) -> LaurentPoly:
    """Conway-normalized Alexander polynomial of a knot diagram."""
    if d.n_components() != 1:
        raise AlexanderError("Alexander polynomial is computed for knots only")
    if d.n_crossings == 0:
        return ONE
    m = alexander_matrix(d)
    minor = [row[:-1] for row in m[:-1]]
    return normalize_alexander(laurent_det(minor))


@dataclass(frozen=True)
class AlexanderInvariants:
    polynomial: LaurentPoly
    determinant: int
    coeff_abs_sum: int

    def to_dict(self) -> dict:
        lo, coeffs = self.polynomial.to_list()
        return {"lowest_exponent": lo, "coefficients": coeffs,
                "det": self.determinant, "abs_sum": self.coeff_abs_sum}


def alexander_invariants(d: PlanarDiagram, table=None) -> AlexanderInvariants:
    """Determinant ``|Delta(-1)|`` and the sum of absolute coefficients.

    If a Khovanov table is given, its Jones evaluation is cross-checked
    against the determinant.
    """
    p = alexander_polynomial(d)
    det = abs(p.evaluate(-1))
    inv = AlexanderInvariants(p, det, p.abs_coeff_sum())
    if table is not None:
        from .homology import jones_determinant, jones_polynomial

        jd = jones_determinant(jones_polynomial(table))
        if jd != det:
            raise AlexanderError(f"|V(-1)| = {jd} differs from |Delta(-1)| = {det}")
    return inv


def torus_alexander(p: int, q: int) -> LaurentPoly:
    """``(t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1))``, symmetrized (reference formula)."""
    num = (LaurentPoly.monomial(p * q) - ONE) * (T - ONE)
    den = (LaurentPoly.monomial(p) - ONE) * (LaurentPoly.monomial(q) - ONE)
    return normalize_alexander(num.exact_div(den))
