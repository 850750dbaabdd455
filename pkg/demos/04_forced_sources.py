"""A unique pattern on a resolution forces sources upstairs.

P(-2,3,5) over GF(2) with the positive-knot survivor has exactly one
cancellation pattern.  Resolving two crossings of P(-2,3,7) maps onto it,
which forces three sources, and the P(-2,3,7) pattern is again unique.

Run: python3 demos/04_forced_sources.py
"""

import json
import os

from khss.analysis import analyze

here = os.path.join(os.path.dirname(__file__), "..", "problems")
for name in ("p235_os.json", "p237_os.json"):
    with open(os.path.join(here, name)) as fh:
        report, res, problem = analyze(json.load(fh))
    print(f"== {report.knot}: {len(res.patterns)} pattern(s)")
    for a, m in res.patterns[0].arcs:
        print(f"   {a.source} -> {a.target}  page {a.page}")
    print(f"   E_infinity rank {res.patterns[0].residual.total}, "
          f"survivors {sorted(res.forced_survivors)}")
    print(f"   ledger of declared marks: {report.assumptions or 'empty'}\n")
