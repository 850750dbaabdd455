"""Reduced Khovanov tables and the classical invariants they determine.

Run: python3 demos/01_tables_and_invariants.py
"""

from khss.classical import alexander_invariants
from khss.diagram import pretzel, torus
from khss.homology import delta_profile, jones_determinant, jones_polynomial, khovanov_homology

for d in [torus(2, 3), torus(3, 4), pretzel(-2, 3, 5)]:
    t = khovanov_homology(d, "Q")
    print(f"== {d}  ({d.n_crossings} crossings, total rank {t.total})")
    print(t.grid())
    print("Poincare:", t.poincare())
    # the Euler characteristic is the Jones polynomial; |V(-1)| is the determinant
    inv = alexander_invariants(d, table=t)
    prof = delta_profile(t)
    print(f"det {jones_determinant(jones_polynomial(t))}, Alexander {inv.polynomial}, "
          f"abs sum {inv.coeff_abs_sum}")
    print(f"delta ranks {prof.ranks} ({'thin' if prof.thin else 'thick'})\n")
