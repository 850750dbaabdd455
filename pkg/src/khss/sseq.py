"""Constraint enumeration for spectral sequences starting at the Khovanov page.

The model pairs whole basis directions: a *pattern* is a multiset of arcs
``source cell -> target cell``, each cancelling one generator of each cell.
Arcs must satisfy the grading rules of the theory, cells may carry marks
limiting how many of their generators can be sources or targets, and the
residual table must have an admissible total rank.  This over-approximates
real spectral sequences (no change of basis between pages), so the pattern
list is an upper bound on what can happen.

Cells are ``(i, j)`` throughout; reports add ``(i, j - i)`` plot coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .homology import DimTable
from .skein import CobordismDescriptor, HomologyMap, check_declared_components

Cell = tuple[int, int]
DEFAULT_CAP = 10 ** 6
MARK_KINDS = ("never_source", "never_target", "survivor")


class SSeqError(ValueError):
    pass


class CapExceeded(SSeqError):
    """Enumeration refused: the partial-state budget ran out."""


# --------------------------------------------------------------------------
# arc rules

@dataclass(frozen=True)
class ArcRule:
    """Which cell pairs can carry a differential after the Khovanov page.

    ``km``: ``di >= 1``, ``dj >= 2`` and ``dj - di = 3 (mod 4)``; the page of
    an arc is ``a di + b dj`` for weights ``(a, b)``.
    ``os``: ``di >= 2`` and the page is ``di``; ``delta_rule`` is ``"drop1"``
    (``dj = 2 di - 2``), ``"strict"`` (``dj - 2 di <= -2``) or ``"off"``.
    """

    theory: str
    weights: tuple[int, int] = (1, 1)
    delta_rule: str = "off"

    def __post_init__(self):
        if self.theory not in ("km", "os"):
            raise SSeqError(f"unknown theory {self.theory!r}")
        a, b = self.weights
        if a < 1 or b < 1:
            raise SSeqError("filtration weights must be at least 1")
        if self.delta_rule not in ("off", "drop1", "strict"):
            raise SSeqError(f"unknown delta rule {self.delta_rule!r}")

    def admits(self, src: Cell, tgt: Cell) -> bool:
        di, dj = tgt[0] - src[0], tgt[1] - src[1]
        if self.theory == "km":
            return di >= 1 and dj >= 2 and (dj - di) % 4 == 3
        if di < 2:
            return False
        if self.delta_rule == "drop1":
            return dj == 2 * di - 2
        if self.delta_rule == "strict":
            return dj - 2 * di <= -2
        return True

    def page(self, src: Cell, tgt: Cell) -> int:
        di, dj = tgt[0] - src[0], tgt[1] - src[1]
        if self.theory == "km":
            return self.weights[0] * di + self.weights[1] * dj
        return di

    def to_dict(self) -> dict:
        return {"theory": self.theory, "weights": list(self.weights), "delta_rule": self.delta_rule}


def z4_class(cell: Cell) -> int:
    """Mod-4 grading ``j - i - 1``."""
    return (cell[1] - cell[0] - 1) % 4


# --------------------------------------------------------------------------
# marks

@dataclass(frozen=True)
class Mark:
    cell: Cell
    kind: str
    count: int
    provenance: str
    page: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"cell": list(self.cell), "plot": [self.cell[0], self.cell[1] - self.cell[0]],
             "kind": self.kind, "count": self.count, "provenance": self.provenance}
        if self.page is not None:
            d["page"] = self.page
        return d


@dataclass
class MarkSet:
    """Per-cell mark counts.

    Several marks of one kind on one cell combine by maximum: each says "at
    least this many generators", and two such statements from different
    arguments may concern the same generators.
    """

    marks: list[Mark] = field(default_factory=list)

    def add(self, cell: Cell, kind: str, count: int, provenance: str, page: Optional[int] = None):
        if kind not in MARK_KINDS + ("forced_source",):
            raise SSeqError(f"unknown mark kind {kind!r}")
        if count < 0:
            raise SSeqError("mark counts are nonnegative")
        if count:
            self.marks.append(Mark(tuple(cell), kind, int(count), provenance, page))
        return self

    def extend(self, other: "MarkSet") -> "MarkSet":
        self.marks.extend(other.marks)
        return self

    def count(self, cell: Cell, kind: str) -> int:
        return max((m.count for m in self.marks if m.cell == cell and m.kind == kind), default=0)

    def forced_sources(self) -> list[Mark]:
        return [m for m in self.marks if m.kind == "forced_source"]

    def provenances(self) -> list[str]:
        return sorted({m.provenance for m in self.marks})

    def declared(self) -> list[Mark]:
        return [m for m in self.marks if m.provenance.startswith("declared")]

    def validate(self, table: DimTable):
        for m in self.marks:
            n = table[m.cell]
            if m.kind != "forced_source" and m.count > n:
                raise SSeqError(f"{m.kind} count {m.count} at {m.cell} exceeds dimension {n}")
            if m.kind == "forced_source" and n == 0:
                raise SSeqError(f"forced source at empty cell {m.cell}")

    def __len__(self):
        return len(self.marks)

    def to_list(self) -> list[dict]:
        return [m.to_dict() for m in self.marks]


# --------------------------------------------------------------------------
# problems and patterns

@dataclass
class SSeqProblem:
    table: DimTable
    rule: ArcRule
    marks: MarkSet = field(default_factory=MarkSet)
    window: Optional[Sequence[int]] = None
    z4_targets: Optional[Sequence[int]] = None
    cap: int = DEFAULT_CAP
    label: str = ""
    assumptions: list[str] = field(default_factory=list)

    def __post_init__(self):
        total = self.table.total
        if self.window is None:
            self.window = list(range(total % 2, total + 1, 2))
        self.window = sorted(set(int(w) for w in self.window))
        if self.z4_targets is not None:
            if self.rule.theory != "km":
                raise SSeqError("per-class targets apply to the instanton theory only")
            if len(self.z4_targets) != 4:
                raise SSeqError("per-class targets need four entries")
            self.z4_targets = [int(x) for x in self.z4_targets]
            if sum(self.z4_targets) not in self.window:
                raise SSeqError("per-class targets do not sum into the target window")
        self.marks.validate(self.table)

    def class_counts(self) -> list[int]:
        out = [0, 0, 0, 0]
        for cell, n in self.table.cells.items():
            out[z4_class(cell)] += n
        return out

    def capacities(self) -> dict[Cell, tuple[int, int, int]]:
        """cell -> (max outgoing, max incoming, max outgoing + incoming)."""
        caps = {}
        for cell, n in self.table.cells.items():
            surv = self.marks.count(cell, "survivor")
            ns = max(self.marks.count(cell, "never_source"), surv)
            nt = max(self.marks.count(cell, "never_target"), surv)
            caps[cell] = (n - ns, n - nt, n - surv)
        return caps

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "rule": self.rule.to_dict(),
            "table": self.table.to_dict(),
            "target_window": list(self.window),
            "z4_targets": self.z4_targets,
            "marks": self.marks.to_list(),
            "assumptions": list(self.assumptions),
        }


@dataclass(frozen=True)
class Arc:
    source: Cell
    target: Cell
    page: int

    def plot(self) -> tuple[tuple[int, int], tuple[int, int]]:
        (a, b), (c, d) = self.source, self.target
        return (a, b - a), (c, d - c)

    def to_dict(self) -> dict:
        s, t = self.plot()
        return {"source": list(self.source), "target": list(self.target),
                "source_plot": list(s), "target_plot": list(t), "page": self.page}


@dataclass(frozen=True)
class Pattern:
    arcs: tuple[tuple[Arc, int], ...]
    residual: DimTable

    @property
    def n_arcs(self) -> int:
        return sum(m for _, m in self.arcs)

    def arc_set(self) -> set[tuple[Cell, Cell]]:
        return {(a.source, a.target) for a, _ in self.arcs}

    def plot_arcs(self) -> set[tuple[Cell, Cell]]:
        return {a.plot() for a, _ in self.arcs}

    def to_dict(self) -> dict:
        return {"arcs": [dict(a.to_dict(), multiplicity=m) for a, m in self.arcs],
                "residual": self.residual.to_dict()}


def admissible_arcs(p: SSeqProblem) -> list[Arc]:
    """Cell pairs allowed by the rule, the per-class targets and the marks."""
    caps = p.capacities()
    slack = None
    if p.z4_targets is not None:
        slack = [c - t for c, t in zip(p.class_counts(), p.z4_targets)]
        if any(s < 0 for s in slack):
            raise SSeqError("per-class targets exceed the page")
    cells = sorted(p.table.cells)
    out = []
    for s in cells:
        so, _, st = caps[s]
        if so < 1 or st < 1:
            continue
        for t in cells:
            if s == t or not p.rule.admits(s, t):
                continue
            _, ti, tt = caps[t]
            if ti < 1 or tt < 1:
                continue
            if slack is not None:
                cs, ct = z4_class(s), z4_class(t)
                need = 2 if cs == ct else 1
                if slack[cs] < need or slack[ct] < need:
                    continue
            out.append(Arc(s, t, p.rule.page(s, t)))
    out.sort(key=lambda a: (a.source, a.target))
    return out


@dataclass
class EnumerationResult:
    problem: SSeqProblem
    arcs: list[Arc]
    patterns: list[Pattern]
    status: str                         # "ok" | "empty"
    states: int

    @property
    def forced_survivors(self) -> dict[Cell, int]:
        if not self.patterns:
            return {}
        out = {}
        for cell in self.problem.table.cells:
            m = min(p.residual[cell] for p in self.patterns)
            if m:
                out[cell] = m
        return out

    @property
    def n_forced_survivors(self) -> int:
        return sum(self.forced_survivors.values())

    @property
    def forced_cancellations(self) -> list[tuple[Cell, Cell]]:
        if not self.patterns:
            return []
        common = set.intersection(*(p.arc_set() for p in self.patterns))
        return sorted(common)

    def max_arcs(self) -> int:
        return max((p.n_arcs for p in self.patterns), default=0)

    def residual_ranks(self) -> list[int]:
        return sorted({p.residual.total for p in self.patterns})

    def to_dict(self) -> dict:
        fs = self.forced_survivors
        return {
            "problem": self.problem.to_dict(),
            "status": self.status,
            "admissible_arcs": [a.to_dict() for a in self.arcs],
            "patterns": [p.to_dict() for p in self.patterns],
            "forced_survivors": [[i, j, v] for (i, j), v in sorted(fs.items())],
            "forced_survivor_total": sum(fs.values()),
            "forced_cancellations": [[list(s), list(t)] for s, t in self.forced_cancellations],
            "states": self.states,
            "assumptions": self.assumptions(),
        }

    def assumptions(self) -> list[str]:
        out = ["generator-pairing model: patterns are upper bounds on actual behaviour"]
        out.extend(self.problem.assumptions)
        out.extend(f"declared mark: {m.kind} x{m.count} at {m.cell} ({m.provenance})"
                   for m in self.problem.marks.declared())
        return out


def enumerate_patterns(p: SSeqProblem) -> EnumerationResult:
    """All integer flows on admissible arcs meeting every constraint.

    Depth-first over arcs in sorted order, multiplicity per arc, with
    memoized dead states; raises :class:`CapExceeded` past ``p.cap`` states.
    """
    arcs = admissible_arcs(p)
    table = p.table
    cells = sorted(table.cells)
    index = {c: k for k, c in enumerate(cells)}
    caps = p.capacities()
    out_cap = [caps[c][0] for c in cells]
    in_cap = [caps[c][1] for c in cells]
    tot_cap = [caps[c][2] for c in cells]
    dims = [table[c] for c in cells]
    total = table.total
    wmin, wmax = min(p.window), max(p.window)
    max_arcs_total = (total - wmin) // 2
    window = set(p.window)
    z4 = p.z4_targets
    cls = [z4_class(c) for c in cells]
    slack0 = [c - t for c, t in zip(p.class_counts(), z4)] if z4 is not None else None
    # forced sources: (cell index, page or None)
    forced = []
    for m in p.marks.forced_sources():
        if m.cell not in index:
            raise SSeqError(f"forced source at empty cell {m.cell}")
        forced.append((index[m.cell], m.page))
    last_for = []
    for ci, pg in forced:
        ks = [k for k, a in enumerate(arcs) if index[a.source] == ci and (pg is None or a.page == pg)]
        if not ks:
            return EnumerationResult(p, arcs, [], "empty", 0)
        last_for.append(max(ks))

    src_idx = [index[a.source] for a in arcs]
    tgt_idx = [index[a.target] for a in arcs]
    n_arcs = len(arcs)
    used_out = [0] * len(cells)
    used_in = [0] * len(cells)
    mult = [0] * n_arcs
    class_used = [0, 0, 0, 0]
    found: list[tuple] = []
    dead: set = set()
    states = 0

    # most arcs still addable from position k on (loose bound for pruning)
    def finish_ok(n_used: int) -> bool:
        if total - 2 * n_used not in window:
            return False
        if z4 is not None and any(class_used[c] != slack0[c] for c in range(4)):
            return False
        for (ci, pg) in forced:
            if not any(mult[k] and src_idx[k] == ci and (pg is None or arcs[k].page == pg)
                       for k in range(n_arcs)):
                return False
        return True

    def dfs(k: int, n_used: int) -> bool:
        nonlocal states
        states += 1
        if states > p.cap:
            raise CapExceeded(f"enumeration exceeded {p.cap} partial states")
        if k == n_arcs:
            if finish_ok(n_used):
                found.append(tuple(mult))
                return True
            return False
        for (ci, pg), last in zip(forced, last_for):
            if last < k and not any(mult[q] and src_idx[q] == ci and
                                    (pg is None or arcs[q].page == pg) for q in range(k)):
                return False
        key = (k, n_used, tuple(used_out), tuple(used_in), tuple(class_used),
               tuple(q for q in range(k) if mult[q] and
                     any(src_idx[q] == ci for ci, _ in forced)))
        if key in dead:
            return False
        s, t = src_idx[k], tgt_idx[k]
        room = min(out_cap[s] - used_out[s], in_cap[t] - used_in[t],
                   tot_cap[s] - used_out[s] - used_in[s],
                   tot_cap[t] - used_out[t] - used_in[t],
                   max_arcs_total - n_used)
        if z4 is not None:
            cs, ct = cls[s], cls[t]
            if cs == ct:
                room = min(room, (slack0[cs] - class_used[cs]) // 2)
            else:
                room = min(room, slack0[cs] - class_used[cs], slack0[ct] - class_used[ct])
        any_ok = False
        for m in range(0, max(room, 0) + 1):
            mult[k] = m
            used_out[s] += m
            used_in[t] += m
            if z4 is not None:
                class_used[cls[s]] += m
                class_used[cls[t]] += m
            if dfs(k + 1, n_used + m):
                any_ok = True
            used_out[s] -= m
            used_in[t] -= m
            if z4 is not None:
                class_used[cls[s]] -= m
                class_used[cls[t]] -= m
        mult[k] = 0
        if not any_ok:
            dead.add(key)
        return any_ok

    dfs(0, 0)
    patterns = []
    for ms in found:
        chosen = tuple((arcs[k], m) for k, m in enumerate(ms) if m)
        res = dict(table.cells)
        for a, m in chosen:
            res[a.source] -= m
            res[a.target] -= m
        patterns.append(Pattern(chosen, DimTable(table.field, res, table.label)))
    patterns.sort(key=lambda pt: (pt.n_arcs, [(a.source, a.target, m) for a, m in pt.arcs]))
    return EnumerationResult(p, arcs, patterns, "ok" if patterns else "empty", states)


# --------------------------------------------------------------------------
# mark derivations

@dataclass(frozen=True)
class Status:
    """Knowledge about the spectral sequence of one end of a map."""

    kind: str                       # "collapsed" | "known-pattern" | "unknown"
    certificate: object = None      # RankWindow for collapsed, Pattern for known-pattern

    def __post_init__(self):
        if self.kind not in ("collapsed", "known-pattern", "unknown"):
            raise SSeqError(f"unknown status {self.kind!r}")
        if self.kind == "collapsed":
            if not getattr(self.certificate, "collapsed", False):
                raise SSeqError("collapse status needs a collapsed rank window as certificate")

    @property
    def collapsed(self) -> bool:
        return self.kind == "collapsed"


UNKNOWN = Status("unknown")


def collapsed_status(window) -> Status:
    return Status("collapsed", window)


def _status(s: Union[Status, str, None]) -> Status:
    if s is None:
        return UNKNOWN
    if isinstance(s, Status):
        return s
    if s == "unknown":
        return UNKNOWN
    raise SSeqError(f"status {s!r} is not certified")


def derive_marks_exact(phi: HomologyMap, source_status=None, target_status=None,
                       provenance: str = "") -> tuple[MarkSet, MarkSet]:
    """Marks from a map of spectral sequences that is computed on the Khovanov page.

    Returns ``(marks on the source table, marks on the target table)``.
    Collapsed target: nonzero images persist, so sources of the map are
    never boundaries.  Collapsed source: images of permanent cycles are
    permanent cycles, so image directions are never sources.
    """
    ss, ts = _status(source_status), _status(target_status)
    tag = provenance or phi.label or "map"
    on_src, on_tgt = MarkSet(), MarkSet()
    if ts.collapsed:
        for cell, r in sorted(phi.cell_ranks().items()):
            on_src.add(cell, "never_target", r, f"exact: {tag}, target collapsed")
    if ss.collapsed:
        for cell, r in sorted(phi.image_ranks().items()):
            on_tgt.add(cell, "never_source", r, f"exact: {tag}, source collapsed")
    return on_src, on_tgt


def derive_marks_declared(c: CobordismDescriptor, source: DimTable, target: DimTable,
                          source_status=None, target_status=None,
                          cone_rank: Optional[int] = None) -> tuple[MarkSet, MarkSet]:
    """Marks from asserted nonzero components of a cobordism map (not computed)."""
    check_declared_components(c, source, target, cone_rank)
    ss, ts = _status(source_status), _status(target_status)
    tag = f"declared: {c.source or 'source'} -> {c.target or 'target'} ({c.provenance})"
    on_src, on_tgt = MarkSet(), MarkSet()
    for src, tgt in c.declared:
        src, tgt = tuple(src), tuple(tgt)
        if ss.collapsed:
            on_tgt.add(tgt, "never_source", 1, tag)
        if ts.collapsed:
            on_src.add(src, "never_target", 1, tag)
    return on_src, on_tgt


def derive_forced_sources(phi: HomologyMap, known: Pattern, provenance: str = "") -> MarkSet:
    """Forced differentials in the source from a known pattern in the target.

    For an arc ``c' -> d'`` of the target pattern, if the map hits ``c'``
    from a cell ``c`` and ``d'`` from a cell ``d`` (both nonzero), then the
    matching differential ``c -> d`` must occur on the same page: the
    class at ``c`` cannot survive to that page's homology while its image
    is killed there.  Only 1-dimensional cells are handled.
    """
    s, t = phi.shift
    tag = provenance or f"forced by {phi.label or 'map'}"
    out = MarkSet()
    ranks = phi.cell_ranks()
    for arc, _m in known.arcs:
        c = (arc.source[0] - s, arc.source[1] - t)
        d = (arc.target[0] - s, arc.target[1] - t)
        if not ranks.get(c) or not ranks.get(d):
            continue
        for cell in (c, arc.source):
            tbl = phi.source if cell == c else phi.target
            if tbl[cell] != 1:
                raise SSeqError(f"cell {cell} is not 1-dimensional")
        out.add(c, "forced_source", 1, f"{tag}: target arc {arc.source}->{arc.target}",
                page=arc.page)
    return out


def plamenevskaya_marks(table: DimTable, positive: bool) -> MarkSet:
    """Survivor at the bottom of column ``i = 0`` for diagrams with only positive crossings."""
    out = MarkSet()
    if not positive or not table.cells:
        return out
    jmin = min(j for _, j in table.cells)
    if table[(0, jmin)] == 1:
        out.add((0, jmin), "survivor", 1, "positive-knot-psi")
    return out


def delta_report(arcs: Iterable[Arc]) -> dict:
    """Change of ``j - 2i`` along every arc."""
    changes = sorted({(a.target[1] - 2 * a.target[0]) - (a.source[1] - 2 * a.source[0]) for a in arcs})
    return {"delta_changes": changes, "all_strictly_lower": all(c < 0 for c in changes)}


# --------------------------------------------------------------------------
# JSON problem files

def problem_from_json(data: Union[str, Mapping], table_for=None) -> SSeqProblem:
    """Build a problem from the JSON description.

    ``table_for(knot_spec, theory)`` supplies the page when the file names a
    knot instead of listing cells.  Cells in ``marks`` are ``(i, j - i)``
    unless ``"coords": "ij"``.
    """
    if isinstance(data, str):
        data = json.loads(data)
    theory = data.get("theory", "km")
    rule = ArcRule(theory, tuple(data.get("weights", (1, 1))), data.get("delta_rule", "off"))
    plot = data.get("coords", "plot") == "plot"

    def cell(c):
        i, y = int(c[0]), int(c[1])
        return (i, y + i) if plot else (i, y)

    if "table" in data:
        fld = "Q" if theory == "km" else "GF2"
        table = DimTable(fld, {cell(c[:2]): int(c[2]) for c in data["table"]}, data.get("knot", ""))
    else:
        if table_for is None:
            raise SSeqError("problem names a knot but no table source was given")
        table = table_for(data["knot"], theory)
    marks = MarkSet()
    for m in data.get("marks", ()):
        marks.add(cell(m["cell"]), m["kind"], int(m.get("count", 1)),
                  m.get("provenance", "user"), m.get("page"))
    window = data.get("target_window")
    assumptions = list(data.get("assumptions", ()))
    if data.get("z4_targets") is not None:
        assumptions.append(f"per-class targets {data['z4_targets']} are an input")
    return SSeqProblem(table, rule, marks, window, data.get("z4_targets"),
                       int(data.get("cap", DEFAULT_CAP)), data.get("knot", ""), assumptions)
