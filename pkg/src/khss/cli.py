"""Command-line front end.

    khss khr "pretzel(-2,3,5)" --field f2 --format grid
    khss bounds "pretzel(-2,3,9)" --theory km
    khss sseq problems/t45_km.json --format grid

Exit status is 0 on success, 1 when a computation rejects its input (the
message comes from the module that raised) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Iterable, Mapping, Optional, Sequence

from .classical import alexander_invariants
from .diagram import parse_knot_spec
from .fields import as_field
from .floer import THEORIES, floer_rank_window, refine_with_triangle
from .homology import DimTable, jones_determinant, jones_polynomial, khovanov_homology

Cell = tuple[int, int]
FORMATS = ("text", "json", "grid", "svg")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# plots

def _plot_cell(c: Cell, axes: str) -> Cell:
    i, j = c
    return (i, j - 2 * i) if axes == "delta" else (i, j - i)


def emit_grid_plot(t: DimTable, marks: Optional[Mapping[Cell, str]] = None,
                   arcs: Iterable = (), fmt: str = "text", axes: str = "plot") -> str:
    """Grid of ``t`` with marked cells drawn open and arcs drawn as arrows.

    ``marks`` maps ``(i, j)`` cells to a kind (a ``MarkSet`` also works);
    ``arcs`` holds ``Arc`` objects
    or ``((i, j), (i, j))`` pairs.  ``axes="plot"`` puts ``j - i`` on the
    vertical axis, ``axes="delta"`` puts ``j - 2i`` there.
    """
    if hasattr(marks, "marks"):
        marks = {m.cell: m.kind for m in marks.marks}
    marks = dict(marks or {})
    pairs = []
    for a in arcs:
        s, e = (a.source, a.target) if hasattr(a, "source") else a
        pairs.append((_plot_cell(tuple(s), axes), _plot_cell(tuple(e), axes),
                      getattr(a, "page", None)))
    pc = {_plot_cell(c, axes): v for c, v in t.cells.items()}
    pm = {_plot_cell(c, axes): k for c, k in marks.items()}
    ylab = "j-2i" if axes == "delta" else "j-i"
    if fmt == "svg":
        return _svg(pc, pm, pairs)
    if not pc:
        return "(empty)"
    xs = [i for i, _ in pc]
    ys = [y for _, y in pc]
    cols = range(min(xs), max(xs) + 1)
    glyph = {c: (f"o{v}" if c in pm else str(v)) for c, v in pc.items()}
    w = max(4, max(len(g) for g in glyph.values()) + 1, max(len(str(x)) for x in cols) + 1)
    lines = []
    for y in range(max(ys), min(ys) - 1, -1):
        lines.append(f"{y:>4} |" + "".join(f"{glyph.get((x, y), '.'):>{w}}" for x in cols))
    lines.append("     +" + "-" * (w * len(cols)))
    lines.append("      " + "".join(f"{x:>{w}}" for x in cols))
    lines.append(f"      i across, {ylab} up" + ("; o = marked" if pm else ""))
    for n, (s, e, page) in enumerate(pairs):
        tail = f"  (page {page})" if page is not None else ""
        lines.append(f"  arc {n + 1}: {s} -> {e}{tail}")
    return "\n".join(lines)


def _svg(pc: Mapping[Cell, int], pm: Mapping[Cell, str], arcs, unit: int = 28) -> str:
    if not pc:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>'
    x0, x1 = min(i for i, _ in pc), max(i for i, _ in pc)
    y0, y1 = min(d for _, d in pc), max(d for _, d in pc)
    W, H = (x1 - x0 + 3) * unit, (y1 - y0 + 3) * unit

    def at(c):
        return (c[0] - x0 + 1.5) * unit, H - (c[1] - y0 + 1.5) * unit

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
           '<defs><marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" '
           'orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>']
    for k in range(x1 - x0 + 1):
        x = (k + 1.5) * unit
        out.append(f'<line x1="{x}" y1="{unit}" x2="{x}" y2="{H - unit}" stroke="#ddd"/>')
        out.append(f'<text x="{x}" y="{H - unit / 3}" font-size="10" text-anchor="middle">{x0 + k}</text>')
    for k in range(y1 - y0 + 1):
        y = H - (k + 1.5) * unit
        out.append(f'<line x1="{unit}" y1="{y}" x2="{W - unit}" y2="{y}" stroke="#ddd"/>')
        out.append(f'<text x="{unit / 2}" y="{y + 3}" font-size="10" text-anchor="middle">{y0 + k}</text>')
    for c, v in sorted(pc.items()):
        cx, cy = at(c)
        fill = "none" if c in pm else "black"
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{unit / 5}" fill="{fill}" stroke="black"/>')
        if v > 1:
            out.append(f'<text x="{cx + unit / 4}" y="{cy - unit / 4}" font-size="9">{v}</text>')
    for s, e, _page in arcs:
        (ax, ay), (bx, by) = at(s), at(e)
        out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="black" '
                   f'marker-end="url(#head)"/>')
    out.append("</svg>")
    return "\n".join(out)


# --------------------------------------------------------------------------
# commands

def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _only(fmt: str, allowed: Sequence[str], cmd: str):
    if fmt not in allowed:
        raise UsageError(f"{cmd} does not support --format {fmt}")


def _field(args, default: str) -> str:
    return as_field(args.field or default).name


def cmd_khr(args) -> str:
    d = parse_knot_spec(args.knot)
    t = khovanov_homology(d, _field(args, "Q"))
    if args.format == "json":
        return _dump(t.to_dict())
    if args.format in ("grid", "svg"):
        return emit_grid_plot(t, fmt="text" if args.format == "grid" else "svg", axes=args.axes)
    return f"{t.poincare()}\ntotal: {t.total}\n{emit_grid_plot(t, axes=args.axes)}"


def cmd_jones(args) -> str:
    _only(args.format, ("text", "json"), "jones")
    t = khovanov_homology(parse_knot_spec(args.knot), _field(args, "Q"))
    v = jones_polynomial(t)
    lo, coeffs = v.to_list()
    if args.format == "json":
        return _dump({"variable": "q", "lowest_exponent": lo, "coefficients": coeffs,
                      "det": jones_determinant(v)})
    return v.format("q")


def cmd_alexander(args) -> str:
    _only(args.format, ("text", "json"), "alexander")
    inv = alexander_invariants(parse_knot_spec(args.knot)).to_dict()
    if args.format == "json":
        return _dump(inv)
    return (f"lowest exponent: {inv['lowest_exponent']}\ncoefficients: {inv['coefficients']}\n"
            f"det: {inv['det']}\nabs_sum: {inv['abs_sum']}")


def cmd_det(args) -> str:
    _only(args.format, ("text", "json"), "det")
    d = parse_knot_spec(args.knot)
    jd = jones_determinant(jones_polynomial(khovanov_homology(d, _field(args, "GF2"))))
    out = {"det": jd}
    if d.n_components() == 1:
        out["det_alexander"] = alexander_invariants(d).determinant
    if args.format == "json":
        return _dump(out)
    return str(jd)


def _partner(text: str):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    return text


def cmd_bounds(args) -> str:
    _only(args.format, ("text", "json"), "bounds")
    d = parse_knot_spec(args.knot)
    w = floer_rank_window(d, args.theory)
    if args.partner:
        if len(args.partner) != 2:
            raise UsageError("--partner must be given exactly twice (the other two corners)")
        pairs = []
        for p in map(_partner, args.partner):
            if isinstance(p, str):
                pw = floer_rank_window(parse_knot_spec(p), args.theory)
                p = (pw.lower, pw.upper)
            pairs.append(p)
        w = refine_with_triangle(w, pairs)
    if args.format == "json":
        return _dump(w.to_dict())
    lines = [f"theory: {w.theory} over {THEORIES[w.theory]}",
             f"lower: {w.lower} ({w.lower_provenance})",
             f"upper: {w.upper} ({w.upper_provenance})",
             f"window: {{{', '.join(map(str, w.admissible))}}}",
             f"collapsed: {'yes' if w.collapsed else 'no'}"]
    lines.extend(f"note: {n}" for n in w.notes)
    return "\n".join(lines)


def _map_text(m) -> str:
    lines = [f"{m.label}: rank {m.rank}, shift {m.shift}, "
             f"source total {m.source.total}, target total {m.target.total}"]
    for (i, j), r in sorted(m.cell_ranks().items()):
        lines.append(f"  ({i},{j}) rank {r}")
    return "\n".join(lines)


def cmd_triple(args) -> str:
    _only(args.format, ("text", "json"), "triple")
    from .skein import les_homology_maps, skein_triple

    d = parse_knot_spec(args.knot)
    m = les_homology_maps(skein_triple(d, args.crossing), _field(args, "Q"))
    if args.format == "json":
        return _dump(m.to_dict())
    a, b, c = m.tables
    lines = [f"crossing {args.crossing} of {d}",
             f"ranks: D1 {a.total}, D {b.total}, D0 {c.total}",
             _map_text(m.inclusion), _map_text(m.projection), _map_text(m.connecting),
             f"exact: {'yes' if m.is_exact() else 'no'}"]
    return "\n".join(lines)


def cmd_map_rank(args) -> str:
    _only(args.format, ("text", "json"), "map-rank")
    from .skein import crossing_change_composite, les_homology_maps, skein_triple

    d = parse_knot_spec(args.knot)
    fld = _field(args, "Q")
    if args.kind == "crossing-change":
        m, _ = crossing_change_composite(d, args.crossing, fld)
    else:
        m = getattr(les_homology_maps(skein_triple(d, args.crossing), fld), args.kind)
    if args.format == "json":
        return _dump(m.to_dict())
    return _map_text(m)


def cmd_sseq(args) -> str:
    from .analysis import analyze

    with open(args.problem) as fh:
        data = json.load(fh)
    report, res, problem = analyze(data)
    if args.format == "json":
        return report.to_json()
    marks = {m.cell: m.kind for m in problem.marks.marks}
    if args.format in ("grid", "svg"):
        return emit_grid_plot(problem.table, marks, res.arcs,
                              "text" if args.format == "grid" else "svg", args.axes)
    lines = [f"knot: {report.knot} ({report.field})",
             f"target window: {list(problem.window)}",
             f"admissible arcs: {len(res.arcs)}",
             f"status: {res.status}, patterns: {len(res.patterns)}"]
    for n, p in enumerate(res.patterns):
        arcs = ", ".join(f"{a.plot()[0]}->{a.plot()[1]}" + (f" x{k}" if k > 1 else "")
                         for a, k in p.arcs) or "none"
        lines.append(f"  pattern {n + 1}: {arcs} (residual {p.residual.total})")
    fs = res.forced_survivors
    lines.append(f"forced survivors: {sum(fs.values())}")
    lines.extend(f"note: {x}" for x in report.notes)
    lines.extend(f"assumption: {x}" for x in report.assumptions)
    lines.extend(f"input: {x}" for x in report.inputs)
    lines.append("(cells in (i, j-i) coordinates)")
    return "\n".join(lines)


COMMANDS = {
    "khr": cmd_khr, "jones": cmd_jones, "alexander": cmd_alexander, "det": cmd_det,
    "bounds": cmd_bounds, "triple": cmd_triple, "map-rank": cmd_map_rank, "sseq": cmd_sseq,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="coefficient field: Q, f2 (GF2) or a prime p")
    common.add_argument("--format", default="text", help="text, json, grid or svg")
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--axes", choices=("plot", "delta"), default="plot",
                        help="vertical axis of grid plots: j-i (plot) or j-2i (delta)")
    p = argparse.ArgumentParser(prog="khss", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name in ("khr", "jones", "alexander", "det"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("knot")
    sp = sub.add_parser("bounds", parents=[common])
    sp.add_argument("knot")
    sp.add_argument("--theory", choices=sorted(THEORIES), default="km")
    sp.add_argument("--partner", action="append",
                    help="other triangle corner: a knot spec or lo:hi (give twice)")
    sp = sub.add_parser("triple", parents=[common])
    sp.add_argument("knot")
    sp.add_argument("--crossing", type=int, required=True)
    sp = sub.add_parser("map-rank", parents=[common])
    sp.add_argument("knot")
    sp.add_argument("--crossing", type=int, required=True)
    sp.add_argument("--kind", default="inclusion",
                    choices=("inclusion", "projection", "connecting", "crossing-change"))
    sp = sub.add_parser("sseq", parents=[common])
    sp.add_argument("problem", help="problem JSON file")
    return p


def run_command(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.format not in FORMATS:
            raise UsageError(f"unknown format {args.format!r}; choose from {', '.join(FORMATS)}")
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"khss {args.command}: {exc}", file=stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError, OSError) as exc:
        print(f"khss {args.command}: {exc}", file=stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        stdout.write(text + "\n")
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
