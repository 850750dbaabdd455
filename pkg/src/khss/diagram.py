"""Planar diagrams: PD codes, named families, resolutions and mirrors.

Crossings are 4-tuples of edge identifiers read counterclockwise starting
from the incoming under-strand (the usual tabulation convention, so that
published PD codes can be pasted in directly).  The under-strand runs from
position 0 to position 2; the over-strand joins positions 1 and 3 and the
crossing is positive when it runs 3 -> 1.

The 0-smoothing of ``(a, b, c, d)`` joins ``a-b`` and ``c-d``; the
1-smoothing joins ``a-d`` and ``b-c``.  For a positive crossing the
0-smoothing is the oriented one.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Crossing = tuple[int, int, int, int]


class DiagramError(ValueError):
    """Invalid diagram data or operation."""


class KnotSpecError(ValueError):
    """Malformed knot spec string."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass(frozen=True)
class PlanarDiagram:
    """An oriented link diagram with a reduction basepoint.

    ``loops`` holds one edge identifier per crossingless closed component;
    the crossingless unknot is ``crossings=()`` with a single loop.
    """

    crossings: tuple[Crossing, ...]
    signs: tuple[int, ...]
    basepoint_edge: int
    loops: tuple[int, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.signs) != len(self.crossings):
            raise DiagramError("one sign per crossing required")
        counts: dict[int, int] = {}
        for x in self.crossings:
            if len(x) != 4:
                raise DiagramError(f"crossing {x} is not a 4-tuple")
            for e in x:
                counts[e] = counts.get(e, 0) + 1
        bad = sorted(e for e, k in counts.items() if k != 2)
        if bad:
            raise DiagramError(f"edges {bad} do not appear exactly twice")
        if set(self.loops) & set(counts):
            raise DiagramError("loop identifiers clash with crossing edges")
        if self.basepoint_edge not in counts and self.basepoint_edge not in self.loops:
            raise DiagramError(f"basepoint edge {self.basepoint_edge} not in diagram")

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    def edges(self) -> list[int]:
        return sorted({e for x in self.crossings for e in x} | set(self.loops))

    def components(self) -> list[list[int]]:
        """Edge sets of the link components, by strand tracing."""
        comps = [[e for e, _ in _trace(self.crossings, start)]
                 for start in _component_starts(self.crossings)]
        comps.extend([lp] for lp in self.loops)
        return comps

    def n_components(self) -> int:
        return len(self.components())

    def pd_text(self) -> str:
        inner = ",".join("[" + ",".join(str(e) for e in x) + "]" for x in self.crossings)
        return f"pd([{inner}])"

    def __str__(self):
        return self.label or self.pd_text()


# ---------------------------------------------------------------------------
# strand tracing and orientation

def _positions(crossings: Sequence[Crossing]) -> dict[int, list[tuple[int, int]]]:
    pos: dict[int, list[tuple[int, int]]] = {}
    for k, x in enumerate(crossings):
        for p, e in enumerate(x):
            pos.setdefault(e, []).append((k, p))
    return pos


def _trace(crossings: Sequence[Crossing], start: tuple[int, int],
           pos: dict | None = None) -> list[tuple[int, tuple[int, int]]]:
    """Follow a strand that enters crossing ``start[0]`` at position ``start[1]``.

    Returns ``(edge, (crossing, position))`` pairs, one per traversed edge,
    where the pair names the slot through which the edge is entered.
    """
    if pos is None:
        pos = _positions(crossings)
    out = []
    k, p = start
    while True:
        e = crossings[k][p]
        out.append((e, (k, p)))
        q = (p + 2) % 4
        e_next = crossings[k][q]
        a, b = pos[e_next]
        k, p = b if a == (k, q) else a
        if (k, p) == start:
            return out


def _component_starts(crossings: Sequence[Crossing]) -> list[tuple[int, int]]:
    """One entry slot per component, components ordered by minimal edge."""
    pos = _positions(crossings)
    seen: set[int] = set()
    starts = []
    for e in sorted(pos):
        if e in seen:
            continue
        start = pos[e][0]
        for f, _ in _trace(crossings, start, pos):
            seen.add(f)
        starts.append(start)
    return starts


def _orient(crossings: Sequence[Crossing], heads: dict[int, tuple[int, int]] | None = None,
            strict: bool = False) -> tuple[tuple[Crossing, ...], tuple[int, ...]]:
    """Orient every component and normalise tuples to start at the incoming under-strand.

    ``heads`` optionally maps an edge to the slot it should enter; the first
    edge of a component (in increasing id order) found in ``heads`` fixes the
    direction of that component.  Otherwise the direction is read from the
    first under-passage (PD convention) or, for components that only pass
    over, from the first slot of the minimal edge.  With ``strict`` an
    inconsistent PD orientation raises.
    """
    crossings = [tuple(x) for x in crossings]
    pos = _positions(crossings)
    entry: dict[tuple[int, int], bool] = {}
    seen: set[int] = set()
    for e0 in sorted(pos):
        if e0 in seen:
            continue
        path = _trace(crossings, pos[e0][0], pos)
        edges = sorted(e for e, _ in path)
        seen.update(edges)
        forward = None
        if heads:
            slot_of = dict(path)
            for e in edges:
                if e in heads:
                    forward = slot_of[e] == heads[e]
                    break
        if forward is None:
            under = [s for _, s in path if s[1] in (0, 2)]
            if under:
                forward = under[0][1] == 0
                if strict:
                    want = 0 if forward else 2
                    if any(s[1] != want for s in under):
                        raise DiagramError("PD code has inconsistent under-strand orientation")
            else:
                forward = True
        if forward:
            slots = [s for _, s in path]
        else:
            # entering the reversed strand happens through the exit slots
            slots = [(k, (p + 2) % 4) for _, (k, p) in path]
        for s in slots:
            entry[s] = True
    out, signs = [], []
    for k, x in enumerate(crossings):
        if (k, 2) in entry:
            x = (x[2], x[3], x[0], x[1])
            over_in = 1 if (k, 3) in entry else 3
        else:
            over_in = 3 if (k, 3) in entry else 1
        out.append(x)
        signs.append(1 if over_in == 3 else -1)
    return tuple(out), tuple(signs)


def _relabel(crossings: Iterable[Crossing], loops: Iterable[int], basepoint: int):
    """Renumber edges 1..m in order of first appearance."""
    ids: dict[int, int] = {}
    for x in crossings:
        for e in x:
            ids.setdefault(e, len(ids) + 1)
    for e in loops:
        ids.setdefault(e, len(ids) + 1)
    xs = tuple(tuple(ids[e] for e in x) for x in crossings)
    return xs, tuple(ids[e] for e in loops), ids[basepoint]


def from_pd(code: Sequence[Sequence[int]], label: str = "",
            basepoint: int | None = None) -> PlanarDiagram:
    """Build a diagram from a PD code in the standard convention."""
    xs = [tuple(int(e) for e in x) for x in code]
    if not xs:
        return unknot()
    counts: dict[int, int] = {}
    for x in xs:
        if len(x) != 4:
            raise DiagramError(f"crossing {list(x)} is not a 4-tuple")
        for e in x:
            counts[e] = counts.get(e, 0) + 1
    bad = sorted(e for e, k in counts.items() if k != 2)
    if bad:
        raise DiagramError(f"edges {bad} do not appear exactly twice")
    oriented, signs = _orient(xs, strict=True)
    bp = oriented[0][0] if basepoint is None else basepoint
    return PlanarDiagram(oriented, signs, bp, (), label)


def _from_geometric(xs: Sequence[Crossing], loops: Sequence[int], label: str) -> PlanarDiagram:
    """Tuples are counterclockwise from *an* under-strand end; orient them."""
    if not xs:
        return PlanarDiagram((), (), loops[0], tuple(loops), label)
    oriented, signs = _orient(xs)
    oriented, lp, _ = _relabel(oriented, loops, oriented[0][0])
    return PlanarDiagram(oriented, signs, oriented[0][0], lp, label)


# ---------------------------------------------------------------------------
# named families

def unknot() -> PlanarDiagram:
    return PlanarDiagram((), (), 1, (1,), "unknot")


def braid_closure(word: Sequence[int], n_strands: int | None = None,
                  label: str = "") -> PlanarDiagram:
    """Closure of a braid word; ``k`` is sigma_k, ``-k`` its inverse.

    Strands run upward; sigma_k carries the strand at position k over to
    position k+1 and is a positive crossing.
    """
    word = [int(s) for s in word]
    if any(s == 0 for s in word):
        raise DiagramError("braid generators are nonzero integers")
    n = n_strands or (max((abs(s) for s in word), default=0) + 1)
    if word and max(abs(s) for s in word) >= n:
        raise DiagramError("braid generator index exceeds strand count")
    cur = list(range(1, n + 1))
    nxt = n + 1
    xs = []
    for s in word:
        k = abs(s) - 1
        lo, hi = cur[k], cur[k + 1]
        out_lo, out_hi = nxt, nxt + 1
        nxt += 2
        if s > 0:
            xs.append((hi, out_hi, out_lo, lo))
        else:
            xs.append((lo, hi, out_hi, out_lo))
        cur[k], cur[k + 1] = out_lo, out_hi
    close = {cur[i]: i + 1 for i in range(n)}
    xs = [tuple(close.get(e, e) for e in x) for x in xs]
    used = {e for x in xs for e in x}
    loops = [i + 1 for i in range(n) if i + 1 not in used]
    return _from_geometric(xs, loops, label or f"braid({','.join(map(str, word))})")


def torus(p: int, q: int) -> PlanarDiagram:
    """T(p,q) as the closure of the positive braid (s_1 ... s_{p-1})^q."""
    if p < 2 or q < 2:
        raise DiagramError(f"torus({p},{q}) needs p, q >= 2")
    return braid_closure(list(range(1, p)) * q, p, label=f"torus({p},{q})")


def pretzel(*twists: int) -> PlanarDiagram:
    """Standard pretzel diagram with vertical twist regions.

    A positive entry is a band of crossings whose 0-smoothing is the vertical
    one (it reduces the number of twists); a negative entry uses the mirror
    crossing, whose 0-smoothing cuts the band.
    """
    if len(twists) < 2:
        raise DiagramError("pretzel needs at least two bands")
    if any(t == 0 for t in twists):
        raise DiagramError("pretzel parameters must be nonzero")
    nxt = 1
    tops, bottoms, xs = [], [], []
    for t in twists:
        left, right = nxt, nxt + 1
        nxt += 2
        bottoms.append((left, right))
        for _ in range(abs(t)):
            out_l, out_r = nxt, nxt + 1
            nxt += 2
            if t > 0:
                xs.append((right, out_r, out_l, left))
            else:
                xs.append((left, right, out_r, out_l))
            left, right = out_l, out_r
        tops.append((left, right))
    # caps join the right end of band k to the left end of band k+1,
    # the outer arc joins the last band to the first
    ident: dict[int, int] = {}
    m = len(twists)
    for k in range(m):
        ident[tops[(k + 1) % m][0]] = tops[k][1]
        ident[bottoms[(k + 1) % m][0]] = bottoms[k][1]
    xs = [tuple(ident.get(e, e) for e in x) for x in xs]
    label = "pretzel(" + ",".join(map(str, twists)) + ")"
    return _from_geometric(xs, [], label)


# ---------------------------------------------------------------------------
# operations

def resolve_crossing(d: PlanarDiagram, c: int, r: int) -> PlanarDiagram:
    """Replace crossing ``c`` by its ``r``-smoothing.

    Edges of the remaining crossings keep their identifiers except the merged
    ones, which take the smaller identifier of the pair.  Each component keeps
    the direction of its smallest unmerged edge.
    """
    if not 0 <= c < d.n_crossings:
        raise DiagramError(f"crossing index {c} out of range for {d.n_crossings} crossings")
    if r not in (0, 1):
        raise DiagramError("resolution must be 0 or 1")
    a, b, cc, dd = d.crossings[c]
    pairs = [(a, b), (cc, dd)] if r == 0 else [(a, dd), (b, cc)]
    parent = {}

    def find(e):
        while parent.get(e, e) != e:
            e = parent[e]
        return e

    for u, w in pairs:
        ru, rw = find(u), find(w)
        if ru != rw:
            lo, hi = min(ru, rw), max(ru, rw)
            parent[hi] = lo
    merged = {a, b, cc, dd}
    rest = [x for k, x in enumerate(d.crossings) if k != c]
    xs = [tuple(find(e) for e in x) for x in rest]
    used = {e for x in xs for e in x}
    loops = list(d.loops)
    for rep in sorted({find(e) for e in merged}):
        if rep not in used:
            loops.append(rep)
    # heads of unmerged edges in the new slot numbering
    heads = {}
    old_pos = _positions(d.crossings)
    head_slot = _heads(d)
    index_map = {k: i for i, k in enumerate(k for k in range(d.n_crossings) if k != c)}
    for e, slots in old_pos.items():
        if e in merged:
            continue
        k, p = head_slot[e]
        heads[e] = (index_map[k], p)
    bp = find(d.basepoint_edge)
    if not xs:
        return PlanarDiagram((), (), bp, tuple(loops), "")
    oriented, signs = _orient(xs, heads)
    return PlanarDiagram(oriented, signs, bp, tuple(loops), "")


def _heads(d: PlanarDiagram) -> dict[int, tuple[int, int]]:
    """Slot through which each crossing edge enters a crossing."""
    heads = {}
    for k, (a, b, c, dd) in enumerate(d.crossings):
        heads[a] = (k, 0)
        heads[dd if d.signs[k] > 0 else b] = (k, 3 if d.signs[k] > 0 else 1)
    return heads


def switch_crossing(d: PlanarDiagram, c: int) -> PlanarDiagram:
    """Change crossing ``c`` from over to under, keeping the orientation."""
    if not 0 <= c < d.n_crossings:
        raise DiagramError(f"crossing index {c} out of range")
    xs = list(d.crossings)
    signs = list(d.signs)
    a, b, cc, dd = xs[c]
    xs[c] = (dd, a, b, cc) if signs[c] > 0 else (b, cc, dd, a)
    signs[c] = -signs[c]
    return PlanarDiagram(tuple(xs), tuple(signs), d.basepoint_edge, d.loops, "")


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    """Reverse every crossing; orientation and edge labels are kept."""
    xs, signs = [], []
    for (a, b, c, dd), s in zip(d.crossings, d.signs):
        xs.append((dd, a, b, c) if s > 0 else (b, c, dd, a))
        signs.append(-s)
    label = f"mirror({d.label})" if d.label else ""
    if d.label.startswith("mirror(") and d.label.endswith(")"):
        label = d.label[len("mirror("):-1]
    return PlanarDiagram(tuple(xs), tuple(signs), d.basepoint_edge, d.loops, label)


def diagram_stats(d: PlanarDiagram) -> dict:
    return {
        "components": d.n_components(),
        "n_plus": d.n_plus,
        "n_minus": d.n_minus,
        "writhe": d.writhe,
        "crossings": d.n_crossings,
    }


# ---------------------------------------------------------------------------
# knot spec grammar
#   spec := "unknot" | torus(p,q) | pretzel(p,q,r,...) | braid(word)
#         | pd([[a,b,c,d],...]) | mirror(spec)

_TOKEN = re.compile(r"\s*(?:(-?\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            kind = "int" if m.group(1) else "name" if m.group(2) else "sym"
            self.toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            raise KnotSpecError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def ints(self) -> list[tuple[int, int]]:
        out = []
        if self.peek()[1] == ")":
            return out
        while True:
            tok = self.take("int")
            out.append((int(tok[1]), tok[2]))
            if self.peek()[1] != ",":
                return out
            self.take("sym", ",")

    def int_list(self) -> list:
        self.take("sym", "[")
        out = []
        while self.peek()[1] != "]":
            if self.peek()[1] == "[":
                out.append(self.int_list())
            else:
                out.append(int(self.take("int")[1]))
            if self.peek()[1] == ",":
                self.take("sym", ",")
            elif self.peek()[1] != "]":
                tok = self.peek()
                raise KnotSpecError(f"expected ',' or ']', found {tok[1]!r}", tok[2])
        self.take("sym", "]")
        return out

    def spec(self) -> PlanarDiagram:
        kind, name, at = self.take("name")
        name = name.lower()
        if name == "unknot":
            if self.peek()[1] == "(":
                self.take("sym", "(")
                self.take("sym", ")")
            return unknot()
        self.take("sym", "(")
        if name == "mirror":
            inner = self.spec()
            self.take("sym", ")")
            return mirror(inner)
        if name == "pd":
            code = self.int_list() if self.peek()[1] == "[" else []
            self.take("sym", ")")
            if code and not all(isinstance(x, list) for x in code):
                raise KnotSpecError("pd expects a list of 4-element lists", at)
            try:
                return from_pd(code, label=self.text[at:self.toks[self.i - 1][2] + 1])
            except DiagramError as exc:
                raise KnotSpecError(str(exc), at) from None
        if name == "braid":
            if self.peek()[1] == "[":
                word = self.int_list()
            else:
                word = [v for v, _ in self.ints()]
            self.take("sym", ")")
            try:
                return braid_closure(word)
            except DiagramError as exc:
                raise KnotSpecError(str(exc), at) from None
        args = self.ints()
        self.take("sym", ")")
        vals = [v for v, _ in args]
        if name == "torus":
            if len(vals) != 2:
                raise KnotSpecError(f"torus takes 2 arguments, got {len(vals)}", at)
            for v, p in args:
                if v < 2:
                    raise KnotSpecError(f"torus parameters must be >= 2, got {v}", p)
            return torus(*vals)
        if name == "pretzel":
            if len(vals) != 3:
                raise KnotSpecError(f"pretzel takes 3 arguments, got {len(vals)}", at)
            for v, p in args:
                if v == 0:
                    raise KnotSpecError("pretzel parameters must be nonzero", p)
            return pretzel(*vals)
        raise KnotSpecError(f"unknown family {name!r}", at)


def parse_knot_spec(text: str) -> PlanarDiagram:
    """Parse a knot spec string (see module docs for the grammar)."""
    parser = _Parser(text)
    d = parser.spec()
    tok = parser.peek()
    if tok[0] != "end":
        raise KnotSpecError(f"trailing input {tok[1]!r}", tok[2])
    if not d.label:
        d = PlanarDiagram(d.crossings, d.signs, d.basepoint_edge, d.loops, text.strip())
    return d


def _piece_key(crossings: Sequence[Crossing], pos, start: tuple[int, int]) -> tuple:
    """Breadth-first relabeling of one connected piece from an under-slot."""
    order: dict[int, int] = {}
    ids: dict[int, int] = {}
    out = []
    queue = [start]
    while queue:
        k, s = queue.pop(0)
        if k in order:
            continue
        order[k] = len(order)
        x = crossings[k]
        row = []
        for t in range(4):
            q = (s + t) % 4
            e = x[q]
            ids.setdefault(e, len(ids))
            row.append(ids[e])
            a, b = pos[e]
            k2, q2 = b if a == (k, q) else a
            if k2 not in order:
                queue.append((k2, q2 - q2 % 2))
        out.append(tuple(row))
    return tuple(out)


def canonical_key(d: PlanarDiagram) -> tuple:
    """Invariant of the unoriented diagram up to planar isotopy and edge names.

    Each connected piece is relabeled breadth-first from every under-slot and
    the smallest encoding is kept; orientation and basepoint are ignored.
    """
    xs = d.crossings
    pos = _positions(xs)
    seen: set[int] = set()
    pieces = []
    for k0 in range(len(xs)):
        if k0 in seen:
            continue
        stack, comp = [k0], set()
        while stack:
            k = stack.pop()
            if k in comp:
                continue
            comp.add(k)
            for e in xs[k]:
                stack.extend(k2 for k2, _ in pos[e] if k2 not in comp)
        seen |= comp
        pieces.append(min(_piece_key(xs, pos, (k, s)) for k in comp for s in (0, 2)))
    return tuple(sorted(pieces)), len(d.loops)


def gcd_components_torus(p: int, q: int) -> int:
    return math.gcd(p, q)
