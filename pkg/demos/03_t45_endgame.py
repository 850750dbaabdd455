"""Pinning down the instanton spectral sequence of T(4,5).

Marks come from two sources: changing crossing 0 (which lands on a
collapsed knot) and a declared genus-one cobordism from the knot 5_2.
With the per-class targets, only two cancellation patterns remain.

Run: python3 demos/03_t45_endgame.py
"""

import json
import os

from khss.analysis import analyze
from khss.cli import emit_grid_plot

path = os.path.join(os.path.dirname(__file__), "..", "problems", "t45_km.json")
with open(path) as fh:
    data = json.load(fh)

report, res, problem = analyze(data)
for n in report.notes:
    print("note:", n)
print(f"{len(res.arcs)} admissible arcs, {len(res.patterns)} patterns\n")
for k, pat in enumerate(res.patterns):
    print(f"pattern {k}: residual rank {pat.residual.total}")
    print(emit_grid_plot(problem.table, problem.marks, [a for a, _ in pat.arcs], "text", "plot"))
print("declared marks and inputs:")
for a in report.assumptions + report.inputs:
    print("  ", a)
