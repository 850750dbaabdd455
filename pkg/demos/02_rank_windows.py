"""Rank windows for the two Floer theories, and how an exact triangle shrinks them.

The Khovanov rank bounds the Floer rank from above.  From below we use the
Alexander coefficients (instanton, over Q) or the determinant (branched
double cover, over GF(2)).  When the two agree the spectral sequence collapses.

Run: python3 demos/02_rank_windows.py
"""

from khss.diagram import pretzel, torus
from khss.floer import floer_rank_window, refine_with_triangle

for d in [torus(2, 5), torus(2, 6), torus(4, 5), pretzel(-2, 3, 7)]:
    for th in ("km", "os"):
        w = floer_rank_window(d, th)
        state = "collapsed" if w.collapsed else "open"
        print(f"{str(d):18s} {th}: {w.admissible}  lower from {w.lower_provenance}, {state}")

# P(-3,5,7) sits in a triangle with P(-3,6,7) and the torus link T(2,4)
w = floer_rank_window(pretzel(-3, 5, 7), "km")
partners = [floer_rank_window(pretzel(-3, 6, 7), "km"), floer_rank_window(torus(2, 4), "km")]
better = refine_with_triangle(w, [(p.lower, p.upper) for p in partners])
print(f"\nP(-3,5,7) km window {w.admissible} -> {better.admissible} after the triangle")
