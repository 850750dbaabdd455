"""Problem files with derivation steps, and the analysis report.

A problem file names a knot and a theory and may list ``derive`` steps that
produce marks from computed maps (faces of the cube, crossing changes),
declared cobordisms, forced sources, the positive-knot survivor, or
triangle bounds on the target window.  Explicit ``marks`` are taken as
given and recorded as assumptions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .classical import alexander_invariants
from .diagram import PlanarDiagram, parse_knot_spec
from .floer import THEORIES, FloerError, RankWindow, floer_rank_window, refine_with_triangle
from .homology import DimTable, delta_profile, khovanov_homology
from .skein import (CobordismDescriptor, cobordism_order_bound, crossing_change_composite,
                    face_map, possible_components)
from .sseq import (ArcRule, EnumerationResult, MarkSet, SSeqError, SSeqProblem,
                   collapsed_status, derive_forced_sources, derive_marks_declared,
                   derive_marks_exact, enumerate_patterns, plamenevskaya_marks)


def table_for(spec: str, theory: str) -> DimTable:
    return khovanov_homology(parse_knot_spec(spec), THEORIES[theory])


def _status_of(d: PlanarDiagram, theory: str):
    """Collapsed status when the rank window certifies it, else None."""
    try:
        w = floer_rank_window(d, theory)
    except (FloerError, ValueError):
        return None, None
    return (collapsed_status(w) if w.collapsed else None), w


@dataclass
class _Context:
    diagram: PlanarDiagram
    theory: str
    table: DimTable
    plot: bool
    notes: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    inputs: list = field(default_factory=list)

    def cell(self, c) -> tuple[int, int]:
        i, y = int(c[0]), int(c[1])
        return (i, y + i) if self.plot else (i, y)


def _derive(ctx: _Context, step: Mapping, rule: ArcRule, window: Optional[RankWindow]):
    kind = step.get("type")
    fld = THEORIES[ctx.theory]
    d = ctx.diagram
    marks = MarkSet()
    if kind in ("face", "triple"):
        crossings = step.get("crossings", [step.get("crossing")])
        bit = int(step.get("bit", 0 if step.get("map", "projection") == "projection" else 1))
        phi, other = face_map(d, crossings, bit, fld)
        st, w = _status_of(other, ctx.theory)
        where = f"resolution of crossings {list(crossings)} ({'0' if bit == 0 else '1'})"
        if st is None:
            ctx.notes.append(f"{where}: rank window not collapsed, no marks")
            return marks, window
        ctx.notes.append(f"{where}: collapsed ({w.lower_provenance} = {w.lower}), map rank {phi.rank}")
        if bit == 0:
            marks, _ = derive_marks_exact(phi, target_status=st, provenance=where)
        else:
            _, marks = derive_marks_exact(phi, source_status=st, provenance=where)
        return marks, window
    if kind == "crossing_change":
        c = int(step["crossing"])
        phi, k = crossing_change_composite(d, c, fld)
        st, w = _status_of(k, ctx.theory)
        where = f"crossing change at {c}"
        if st is None:
            ctx.notes.append(f"{where}: rank window of the changed knot not collapsed, no marks")
            return marks, window
        ctx.notes.append(f"{where}: composite rank {phi.rank}, shift {phi.shift}")
        marks, _ = derive_marks_exact(phi, target_status=st, provenance=where)
        return marks, window
    if kind == "declared":
        src = parse_knot_spec(step["source"])
        src_table = khovanov_homology(src, fld)
        cob = CobordismDescriptor(int(step["chi"]), int(step["self_intersection"]),
                                  step["source"], step.get("target", str(d)))
        shift = cobordism_order_bound(cob)
        comps = step.get("components", "all")
        if comps == "all":
            pairs = possible_components(src_table, ctx.table, shift)
        else:
            pairs = [(ctx.cell(a), ctx.cell(b)) for a, b in comps]
        cob = CobordismDescriptor(cob.euler_characteristic, cob.self_intersection, cob.source,
                                  cob.target, declared=tuple(pairs))
        st, _ = _status_of(src, ctx.theory)
        _, marks = derive_marks_declared(cob, src_table, ctx.table, source_status=st,
                                         cone_rank=step.get("cone_rank"))
        ctx.notes.append(f"declared cobordism from {step['source']}: shift {shift}, "
                         f"{len(pairs)} components")
        return marks, window
    if kind == "forced_sources":
        crossings = step["crossings"]
        phi, other = face_map(d, crossings, 0, fld)
        sub = dict(step["problem"])
        sub.setdefault("theory", ctx.theory)
        sub_ctx = _Context(other, ctx.theory, phi.target, sub.get("coords", "plot") == "plot")
        sub_problem = _problem(sub_ctx, sub)
        res = enumerate_patterns(sub_problem)
        if len(res.patterns) != 1:
            raise SSeqError(f"forced sources need a unique pattern downstream, "
                            f"found {len(res.patterns)}")
        marks = derive_forced_sources(phi, res.patterns[0],
                                      provenance=f"forced by resolving {list(crossings)}")
        ctx.notes.append(f"downstream pattern on the resolution: "
                         f"{[(a.source, a.target, a.page) for a, _ in res.patterns[0].arcs]}")
        return marks, window
    if kind == "plamenevskaya":
        marks = plamenevskaya_marks(ctx.table, d.n_minus == 0)
        if not len(marks):
            ctx.notes.append("positive-knot survivor rule does not apply")
        return marks, window
    if kind == "triangle":
        if window is None:
            raise SSeqError("triangle refinement needs a computed rank window")
        partners = []
        for p in step["partners"]:
            if isinstance(p, str):
                pw = floer_rank_window(parse_knot_spec(p), ctx.theory)
                partners.append((pw.lower, pw.upper))
            else:
                partners.append(tuple(p))
        window = refine_with_triangle(window, partners, step.get("provenance", "triangle"))
        ctx.notes.append(f"triangle bound: window {window.admissible}")
        return marks, window
    raise SSeqError(f"unknown derivation type {kind!r}")


def _problem(ctx: _Context, data: Mapping) -> SSeqProblem:
    theory = ctx.theory
    rule = ArcRule(theory, tuple(data.get("weights", (1, 1))), data.get("delta_rule", "off"))
    window: Optional[RankWindow] = None
    if data.get("target_window") is None:
        try:
            window = floer_rank_window(ctx.diagram, theory)
        except FloerError:
            window = None
    marks = MarkSet()
    for m in data.get("marks", ()):
        prov = m.get("provenance", "user")
        marks.add(ctx.cell(m["cell"]), m["kind"], int(m.get("count", 1)), prov, m.get("page"))
        ctx.assumptions.append(f"input mark {m['kind']} at {list(m['cell'])} ({prov})")
    for step in data.get("derive", ()):
        got, window = _derive(ctx, step, rule, window)
        marks.extend(got)
    if data.get("target_window") is not None:
        target = list(data["target_window"])
        ctx.inputs.append(f"target window {target} is an input")
    else:
        target = window.admissible if window is not None else None
    z4 = data.get("z4_targets")
    if z4 is not None:
        ctx.inputs.append(f"per-class targets {list(z4)} are an input (derived by hand)")
    assumptions = ctx.assumptions + ctx.inputs
    return SSeqProblem(ctx.table, rule, marks, target, z4, int(data.get("cap", 10 ** 6)),
                       str(ctx.diagram), assumptions)


def build_problem(data, table: Optional[DimTable] = None) -> tuple[SSeqProblem, _Context]:
    """Problem and derivation context (notes, assumptions, inputs) from a JSON description."""
    if isinstance(data, str):
        data = json.loads(data)
    theory = data.get("theory", "km").lower()
    if theory not in THEORIES:
        raise SSeqError(f"unknown theory {theory!r}")
    d = parse_knot_spec(data["knot"])
    if table is None:
        if "table" in data:
            plot = data.get("coords", "plot") == "plot"
            cells = {}
            for i, y, v in data["table"]:
                cells[(int(i), int(y) + int(i)) if plot else (int(i), int(y))] = int(v)
            table = DimTable(THEORIES[theory], cells, str(d))
        else:
            table = khovanov_homology(d, THEORIES[theory])
    ctx = _Context(d, theory, table, data.get("coords", "plot") == "plot")
    return _problem(ctx, data), ctx


def load_schema() -> dict:
    """JSON schema of :class:`AnalysisReport`."""
    from importlib.resources import files

    return json.loads(files("khss").joinpath("schemas/analysis_report.json").read_text())


# --------------------------------------------------------------------------

@dataclass
class AnalysisReport:
    knot: str
    field: str
    table: dict
    delta_profile: dict
    classical: Optional[dict]
    windows: dict
    problem: Optional[dict] = None
    patterns: list = field(default_factory=list)
    forced_survivors: list = field(default_factory=list)
    forced_cancellations: list = field(default_factory=list)
    status: str = ""
    notes: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    inputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "knot": self.knot,
            "field": self.field,
            "table": self.table,
            "delta_profile": self.delta_profile,
            "classical": self.classical,
            "windows": self.windows,
            "problem": self.problem,
            "status": self.status,
            "patterns": self.patterns,
            "forced_survivors": self.forced_survivors,
            "forced_cancellations": self.forced_cancellations,
            "notes": self.notes,
            "assumptions": self.assumptions,
            "inputs": self.inputs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls(**json.loads(text))


def knot_summary(d: PlanarDiagram, fld: str) -> tuple[DimTable, dict, Optional[dict], dict]:
    table = khovanov_homology(d, fld)
    prof = delta_profile(table)
    classical = None
    if d.n_components() == 1:
        classical = alexander_invariants(d).to_dict()
    windows = {}
    for th in THEORIES:
        try:
            windows[th] = floer_rank_window(d, th).to_dict()
        except FloerError as exc:
            windows[th] = {"error": str(exc)}
    dp = {"ranks": {str(k): v for k, v in prof.ranks.items()}, "thin": prof.thin}
    return table, dp, classical, windows


def analyze(data) -> tuple[AnalysisReport, EnumerationResult, SSeqProblem]:
    """Run a problem file end to end."""
    problem, ctx = build_problem(data)
    res = enumerate_patterns(problem)
    spec = data["knot"] if isinstance(data, Mapping) else json.loads(data)["knot"]
    d = parse_knot_spec(spec)
    table, dp, classical, windows = knot_summary(d, problem.table.field)
    out = res.to_dict()
    report = AnalysisReport(
        knot=spec, field=problem.table.field, table=table.to_dict(), delta_profile=dp,
        classical=classical, windows=windows, problem=out["problem"],
        patterns=out["patterns"], forced_survivors=out["forced_survivors"],
        forced_cancellations=out["forced_cancellations"], status=res.status,
        notes=ctx.notes,
        assumptions=ctx.assumptions + [a for a in res.assumptions() if a.startswith("declared mark")],
        inputs=ctx.inputs + [a for a in res.assumptions() if a.startswith("generator-pairing")])
    return report, res, problem
