"""Skein triples and the maps of the unoriented skein exact sequence.

For a crossing ``c`` of ``D`` the vertices of the cube with ``v_c = 1`` form
a subcomplex isomorphic (up to a shift and a sign twist) to the complex of
the 1-resolution ``D1``, and the quotient by it is the complex of the
0-resolution ``D0``.  The short exact sequence

    0 -> C(D1)[shift] -> C(D) -> C(D0)[shift] -> 0

gives a long exact triangle on homology.  The three maps are pushed to
homology through tracked reductions: ``H(f) = project o f o lift``.

Grading shifts are derived from the crossing counts of the three diagrams
and then validated: every map is checked to be homogeneous and the triangle
is checked to be exact cell by cell.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .cube import BigradedComplex, build_reduced_complex
from .diagram import DiagramError, PlanarDiagram, resolve_crossing
from .fields import Field, as_field
from .homology import DimTable, table_from_reduction
from .linalg import ExactMatrix, rank
from .reduction import Reduction, reduce_complex

Cell = tuple[int, int]
Shift = tuple[int, int]


class SkeinError(ValueError):
    pass


# --------------------------------------------------------------------------
# homology maps

@dataclass
class HomologyMap:
    """Bigraded map between two homology tables.

    ``blocks[(i, j)]`` is the matrix from source cell ``(i, j)`` to target
    cell ``(i + s, j + t)`` (rows index the target cell).
    """

    source: DimTable
    target: DimTable
    shift: Shift
    blocks: dict[Cell, ExactMatrix]
    label: str = ""

    def __post_init__(self):
        s, t = self.shift
        for (i, j), m in self.blocks.items():
            if m.shape != (self.target[(i + s, j + t)], self.source[(i, j)]):
                raise SkeinError(f"block at {(i, j)} has shape {m.shape}, "
                                 f"expected {(self.target[(i + s, j + t)], self.source[(i, j)])}")

    @property
    def field(self) -> str:
        return self.source.field

    def block(self, cell: Cell) -> ExactMatrix:
        s, t = self.shift
        m = self.blocks.get(cell)
        if m is None:
            tgt = (cell[0] + s, cell[1] + t)
            return ExactMatrix.zero(as_field(self.field), self.target[tgt], self.source[cell])
        return m

    def cell_ranks(self) -> dict[Cell, int]:
        """Rank of the block out of each source cell (nonzero only)."""
        out = {}
        for cell, m in self.blocks.items():
            r = rank(m)
            if r:
                out[cell] = r
        return out

    def image_ranks(self) -> dict[Cell, int]:
        """Rank of the block landing in each target cell (nonzero only)."""
        s, t = self.shift
        return {(i + s, j + t): r for (i, j), r in self.cell_ranks().items()}

    @property
    def rank(self) -> int:
        return sum(self.cell_ranks().values())

    def is_zero(self) -> bool:
        return all(m.nnz == 0 for m in self.blocks.values())

    def then(self, g: "HomologyMap") -> "HomologyMap":
        """``g o self``."""
        return compose_maps(self, g)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "shift": list(self.shift),
            "rank": self.rank,
            "cell_ranks": [[i, j, r] for (i, j), r in sorted(self.cell_ranks().items())],
            "source_total": self.source.total,
            "target_total": self.target.total,
        }


def identity_map(t: DimTable) -> HomologyMap:
    fld = as_field(t.field)
    return HomologyMap(t, t, (0, 0), {c: ExactMatrix.identity(fld, n) for c, n in t.cells.items()},
                       "id")


def compose_maps(f: HomologyMap, g: HomologyMap) -> HomologyMap:
    """``g o f``; requires ``f.target`` to be ``g.source``."""
    if f.target != g.source:
        raise SkeinError("cannot compose: target of the first map differs from source of the second")
    s1, t1 = f.shift
    blocks = {}
    for (i, j), m in f.blocks.items():
        mid = (i + s1, j + t1)
        if mid not in g.blocks:
            continue
        blocks[(i, j)] = g.blocks[mid] @ m
    shift = (s1 + g.shift[0], t1 + g.shift[1])
    label = f"{g.label} o {f.label}" if f.label and g.label else ""
    return HomologyMap(f.source, g.target, shift, blocks, label)


def cone_rank_check(rank_a: int, rank_b: int, rank_cone: int, rank_map: int) -> bool:
    """Rank identity for the mapping cone of a map ``A -> B``."""
    return rank_cone == rank_a + rank_b - 2 * rank_map


# --------------------------------------------------------------------------
# complexes with tracked reductions (cached, one per diagram and field)

@dataclass
class _Reduced:
    complex: BigradedComplex
    reduction: Reduction
    table: DimTable


_CACHE: "OrderedDict[tuple, _Reduced]" = OrderedDict()
_CACHE_SIZE = 6


def _reduced(d: PlanarDiagram, fld: Field) -> _Reduced:
    key = (d, fld.name)
    hit = _CACHE.get(key)
    if hit is not None:
        _CACHE.move_to_end(key)
        return hit
    c = build_reduced_complex(d, fld)
    red = reduce_complex(c, track=True)
    item = _Reduced(c, red, table_from_reduction(red, d.label))
    _CACHE[key] = item
    while len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return item


def clear_cache() -> None:
    _CACHE.clear()


# --------------------------------------------------------------------------
# triples

@dataclass
class SkeinTriple:
    """A diagram with a marked crossing and its two resolutions.

    Shifts send a cell of the source of each map to the corresponding cell
    of its target: ``inclusion: Khr(D1) -> Khr(D)``, ``projection:
    Khr(D) -> Khr(D0)``, ``connecting: Khr(D0) -> Khr(D1)``.
    """

    diagram: PlanarDiagram
    crossing: int
    d0: PlanarDiagram
    d1: PlanarDiagram
    inclusion_shift: Shift
    projection_shift: Shift
    connecting_shift: Shift

    def to_dict(self) -> dict:
        return {
            "diagram": str(self.diagram),
            "crossing": self.crossing,
            "crossings": [self.diagram.n_crossings, self.d0.n_crossings, self.d1.n_crossings],
            "components": [self.diagram.n_components(), self.d0.n_components(),
                           self.d1.n_components()],
            "inclusion_shift": list(self.inclusion_shift),
            "projection_shift": list(self.projection_shift),
            "connecting_shift": list(self.connecting_shift),
        }


def _qs(d: PlanarDiagram) -> int:
    return d.n_plus - 2 * d.n_minus


def skein_triple(d: PlanarDiagram, c: int) -> SkeinTriple:
    """Resolve crossing ``c`` both ways and record the grading shifts."""
    if not 0 <= c < d.n_crossings:
        raise SkeinError(f"crossing index {c} out of range for {d.n_crossings} crossings")
    d0 = resolve_crossing(d, c, 0)
    d1 = resolve_crossing(d, c, 1)
    base = d.label or d.pd_text()
    d0 = PlanarDiagram(d0.crossings, d0.signs, d0.basepoint_edge, d0.loops, f"{base}[c{c}=0]")
    d1 = PlanarDiagram(d1.crossings, d1.signs, d1.basepoint_edge, d1.loops, f"{base}[c{c}=1]")
    inc = (1 + d1.n_minus - d.n_minus, 1 + _qs(d) - _qs(d1))
    proj = (d.n_minus - d0.n_minus, _qs(d0) - _qs(d))
    conn = (1 - inc[0] - proj[0], -inc[1] - proj[1])
    return SkeinTriple(d, c, d0, d1, inc, proj, conn)


# generator-level helpers -------------------------------------------------

def _popcount(x: int) -> int:
    return bin(x).count("1")


def _insert_bit(v: int, pos: int, bit: int) -> int:
    low = v & ((1 << pos) - 1)
    return low | (bit << pos) | ((v >> pos) << (pos + 1))


def _drop_bit(v: int, pos: int) -> int:
    low = v & ((1 << pos) - 1)
    return low | ((v >> (pos + 1)) << pos)


class _CircleMap:
    """Translate circle labels between a resolution and the full diagram.

    ``small`` is ``big`` with the crossings at ``positions`` (indices in
    ``big``, ascending) resolved with the given ``bits``.  Both diagrams share
    edge identifiers (merged edges keep the smaller id), so a circle of the
    resolution at ``v'`` is identified with the circle of ``big`` at the
    vertex obtained by inserting the bits, through any of its edges.
    """

    def __init__(self, big: BigradedComplex, small: BigradedComplex,
                 positions: Sequence[int], bits: Sequence[int]):
        self.big, self.small = big, small
        self.positions = tuple(positions)
        self.bits = tuple(bits)
        idx = {e: k for k, e in enumerate(big.cube.edge_ids)}
        self.to_big = np.array([idx[e] for e in small.cube.edge_ids], dtype=np.int64)
        self._memo: dict[int, np.ndarray] = {}

    def vertex_up(self, vs: int) -> int:
        for pos, bit in zip(self.positions, self.bits):
            vs = _insert_bit(vs, pos, bit)
        return vs

    def vertex_down(self, vb: int) -> int:
        for pos in reversed(self.positions):
            vb = _drop_bit(vb, pos)
        return vb

    def on_face(self, vb: int) -> bool:
        return all((vb >> pos) & 1 == bit for pos, bit in zip(self.positions, self.bits))

    def circles(self, vs: int) -> np.ndarray:
        """Array: small circle -> big circle, at small vertex ``vs``."""
        got = self._memo.get(vs)
        if got is None:
            vb = self.vertex_up(vs)
            cs = self.small.cube.circ[vs]
            cb = self.big.cube.circ[vb, self.to_big]
            got = np.empty(int(self.small.cube.count[vs]), dtype=np.int64)
            got[cs] = cb
            if len(self._memo) < 4096:
                self._memo[vs] = got
        return got

    def up(self, g: int) -> tuple[int, int]:
        """Small generator -> (big vertex, big mask)."""
        vs, mask = self.small.generator(g)
        cm = self.circles(vs)
        out = 0
        t = 0
        while mask:
            if mask & 1:
                out |= 1 << int(cm[t])
            mask >>= 1
            t += 1
        return self.vertex_up(vs), out

    def down(self, vb: int, mask: int) -> int:
        """Big (vertex, mask) on the face -> small generator."""
        vs = self.vertex_down(vb)
        cm = self.circles(vs)
        inv = {int(b): s for s, b in enumerate(cm)}
        out = 0
        t = 0
        while mask:
            if mask & 1:
                out |= 1 << inv[t]
            mask >>= 1
            t += 1
        return self.small.index_of(vs, out)


def _sign_twist(vb: int, positions: Sequence[int]) -> int:
    """Sign relating the differential of a resolution to the face it spans.

    ``vb`` is a vertex of the full cube with ones at ``positions``; every
    other one at index ``k`` contributes ``(-1)`` per resolved crossing
    below ``k``.
    """
    par = 0
    below = 0
    pset = set(positions)
    k = 0
    while vb >> k:
        if k in pset:
            below += 1
        elif (vb >> k) & 1:
            par ^= below & 1
        k += 1
    return -1 if par else 1


def _edge_image(cx: BigradedComplex, v: int, mask: int, k: int) -> list[tuple[int, int]]:
    """Component of the differential along edge ``k`` at vertex ``v``.

    Returns ``(mask at w, coefficient)`` pairs for ``w = v + e_k``, with the
    usual edge sign included.
    """
    cube = cx.cube
    w = v | (1 << k)
    sign = -1 if _popcount(v & ((1 << k) - 1)) & 1 else 1
    circ_v, circ_w = cube.circ[v], cube.circ[w]
    a, b = int(cube.pairs0[k, 0, 0]), int(cube.pairs0[k, 0, 1])
    cc = int(cube.pairs0[k, 1, 0])
    ca, cb = int(circ_v[a]), int(circ_v[cc])
    n_v = int(cube.count[v])
    # rep edge of each circle at v, then its circle at w
    perm = {}
    for e in range(len(circ_v) - 1, -1, -1):
        perm[int(circ_v[e])] = int(circ_w[e])
    out = 0
    for t in range(n_v):
        if t in (ca, cb):
            continue
        if (mask >> t) & 1:
            out |= 1 << perm[t]
    la = (mask >> ca) & 1
    if ca != cb:
        lb = (mask >> cb) & 1
        if la == 0 and lb == 0:
            return []
        if la and lb:
            out |= 1 << perm[ca]
        return [(out, sign)]
    if la:
        c1, c2 = int(circ_w[a]), int(circ_w[b])
        return [(out | (1 << c1), sign), (out | (1 << c2), sign)]
    return [(out, sign)]


# induced maps --------------------------------------------------------------

def _push(src: _Reduced, tgt: _Reduced, chain_map, shift: Shift, label: str) -> HomologyMap:
    fld = src.reduction.field
    s, t = shift
    tgt_pos = {}
    for cell, gens in tgt.reduction.survivors.items():
        for k, g in enumerate(gens):
            tgt_pos[g] = (cell, k)
    blocks = {}
    for (i, j), gens in src.reduction.survivors.items():
        tc = (i + s, j + t)
        entries = {}
        for col, g in enumerate(gens):
            chain = chain_map(src.reduction.lift(g))
            if not chain:
                continue
            img = tgt.reduction.project(chain)
            for h, val in img.items():
                cell, row = tgt_pos[h]
                if cell != tc:
                    raise SkeinError(f"{label}: image of cell {(i, j)} meets {cell}, expected {tc}")
                entries[(row, col)] = val
        blocks[(i, j)] = ExactMatrix.from_entries(fld, tgt.table[tc], len(gens), entries)
    return HomologyMap(src.table, tgt.table, shift, blocks, label)


def _acc(out: dict, key: int, val, fld: Field):
    v = fld.normalize(out.get(key, 0) + val)
    if v == 0:
        out.pop(key, None)
    else:
        out[key] = v


def inclusion_chain_map(big: BigradedComplex, small: BigradedComplex, positions):
    """Chain map from the resolution at ``positions`` (all 1) onto that face of ``big``."""
    positions = (positions,) if isinstance(positions, int) else tuple(sorted(positions))
    cm = _CircleMap(big, small, positions, (1,) * len(positions))
    fld = big.field

    def f(vec: Mapping[int, object]) -> dict[int, object]:
        out: dict[int, object] = {}
        for g, val in vec.items():
            vb, mb = cm.up(g)
            _acc(out, big.index_of(vb, mb), val * _sign_twist(vb, positions), fld)
        return out

    return f


def projection_chain_map(big: BigradedComplex, small: BigradedComplex, positions):
    """Chain map from ``big`` onto its resolution at ``positions`` (all 0)."""
    positions = (positions,) if isinstance(positions, int) else tuple(sorted(positions))
    cm = _CircleMap(big, small, positions, (0,) * len(positions))
    fld = big.field

    def g(vec: Mapping[int, object]) -> dict[int, object]:
        out: dict[int, object] = {}
        for h, val in vec.items():
            vb, mb = big.generator(h)
            if not cm.on_face(vb):
                continue
            _acc(out, cm.down(vb, mb), val, fld)
        return out

    return g


def connecting_chain_map(big: BigradedComplex, c0: BigradedComplex, c1: BigradedComplex, c: int):
    """Chain map ``C(D0) -> C(D1)``: lift, take the edge-``c`` part of ``d``, restrict."""
    up0 = _CircleMap(big, c0, (c,), (0,))
    down1 = _CircleMap(big, c1, (c,), (1,))
    fld = big.field

    def delta(vec: Mapping[int, object]) -> dict[int, object]:
        out: dict[int, object] = {}
        for g, val in vec.items():
            vb, mb = up0.up(g)
            w = vb | (1 << c)
            tw = _sign_twist(w, (c,))
            for mw, sgn in _edge_image(big, vb, mb, c):
                _acc(out, down1.down(w, mw), val * sgn * tw, fld)
        return out

    return delta


@dataclass
class LESMaps:
    triple: SkeinTriple
    inclusion: HomologyMap      # Khr(D1) -> Khr(D)
    projection: HomologyMap     # Khr(D) -> Khr(D0)
    connecting: HomologyMap     # Khr(D0) -> Khr(D1)

    @property
    def tables(self) -> tuple[DimTable, DimTable, DimTable]:
        """(Khr(D1), Khr(D), Khr(D0))."""
        return self.inclusion.source, self.inclusion.target, self.projection.target

    def exactness_report(self) -> dict[str, dict[Cell, tuple[int, int, int]]]:
        return exactness_defects(self)

    def is_exact(self) -> bool:
        return not any(self.exactness_report().values())

    def to_dict(self) -> dict:
        a, b, c = self.tables
        return {
            "triple": self.triple.to_dict(),
            "ranks": {"d1": a.total, "d": b.total, "d0": c.total},
            "inclusion": self.inclusion.to_dict(),
            "projection": self.projection.to_dict(),
            "connecting": self.connecting.to_dict(),
            "exact": self.is_exact(),
        }


def les_homology_maps(t: SkeinTriple, field="Q", verify: bool = True) -> LESMaps:
    """The three maps of the triangle on reduced Khovanov homology."""
    fld = as_field(field)
    big = _reduced(t.diagram, fld)
    r0 = _reduced(t.d0, fld)
    r1 = _reduced(t.d1, fld)
    c = t.crossing
    inc = _push(r1, big, inclusion_chain_map(big.complex, r1.complex, c),
                t.inclusion_shift, "inclusion")
    proj = _push(big, r0, projection_chain_map(big.complex, r0.complex, c),
                 t.projection_shift, "projection")
    conn = _push(r0, r1, connecting_chain_map(big.complex, r0.complex, r1.complex, c),
                 t.connecting_shift, "connecting")
    out = LESMaps(t, inc, proj, conn)
    if verify and not out.is_exact():
        raise SkeinError(f"triangle is not exact: {out.exactness_report()}")
    return out


def _exact_at(f: HomologyMap, g: HomologyMap) -> dict[Cell, tuple[int, int, int]]:
    """Cells of ``f.target`` where ``im f != ker g``: cell -> (rk f in, rk g out, dim)."""
    bad = {}
    comp = compose_maps(f, g)
    if not comp.is_zero():
        for cell, m in comp.blocks.items():
            if m.nnz:
                s, t = f.shift
                bad[(cell[0] + s, cell[1] + t)] = (-1, -1, -1)
    fin = f.image_ranks()
    gout = g.cell_ranks()
    for cell, n in f.target.cells.items():
        a, b = fin.get(cell, 0), gout.get(cell, 0)
        if a + b != n:
            bad[cell] = (a, b, n)
    return bad


def exactness_defects(m: LESMaps) -> dict[str, dict]:
    return {
        "at_d": _exact_at(m.inclusion, m.projection),
        "at_d0": _exact_at(m.projection, m.connecting),
        "at_d1": _exact_at(m.connecting, m.inclusion),
    }


def les_rank_bounds(r_a: int, r_b: int) -> tuple[int, int]:
    """Range for the third corner of an exact triangle with corners ``r_a``, ``r_b``."""
    return abs(r_a - r_b), r_a + r_b


def chain_map_defect(src: BigradedComplex, tgt: BigradedComplex, f, signed: int = 1) -> int:
    """Number of generators ``x`` with ``d f(x) != signed * f(d x)`` (small complexes)."""
    fld = src.field

    def diff(cx):
        rows, cols, vals = cx.entries()
        out: dict[int, list] = {}
        for r, col, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
            out.setdefault(r, []).append((col, v))
        return out

    ds, dt = diff(src), diff(tgt)

    def apply(dd, vec):
        out: dict[int, object] = {}
        for g, val in vec.items():
            for h, v in dd.get(g, ()):
                _acc(out, h, val * v, fld)
        return out

    bad = 0
    for g in range(src.n_generators):
        lhs = apply(dt, f({g: 1}))
        rhs = f(apply(ds, {g: 1}))
        rhs = {k: fld.normalize(signed * v) for k, v in rhs.items()}
        if lhs != {k: v for k, v in rhs.items() if v != 0}:
            bad += 1
    return bad


# --------------------------------------------------------------------------
# movies of saddles and declared cobordisms

def _transfer(m: HomologyMap, src: DimTable, tgt: DimTable) -> HomologyMap:
    return HomologyMap(src, tgt, m.shift, m.blocks, m.label)


def saddle_map(d: PlanarDiagram, c: int, direction: str, field="Q") -> tuple[HomologyMap, PlanarDiagram]:
    """Single 1-handle map out of (``"out"``) or into (``"in"``) ``Khr(d)``.

    ``"out"`` is ``Khr(d) -> Khr(d_0)`` (the other end is returned);
    ``"in"`` is ``Khr(d_1) -> Khr(d)``.
    """
    t = skein_triple(d, c)
    fld = as_field(field)
    if direction == "out":
        big, r0 = _reduced(d, fld), _reduced(t.d0, fld)
        return _push(big, r0, projection_chain_map(big.complex, r0.complex, c),
                     t.projection_shift, f"saddle {c}"), t.d0
    if direction == "in":
        big, r1 = _reduced(d, fld), _reduced(t.d1, fld)
        return _push(r1, big, inclusion_chain_map(big.complex, r1.complex, c),
                     t.inclusion_shift, f"saddle {c}"), t.d1
    raise SkeinError(f"direction must be 'in' or 'out', not {direction!r}")


def resolve_face(d: PlanarDiagram, positions: Sequence[int], bit: int) -> PlanarDiagram:
    """Resolve every crossing in ``positions`` (indices in ``d``) with ``bit``."""
    out = d
    for c in sorted(set(positions), reverse=True):
        out = resolve_crossing(out, c, bit)
    return out


def face_map(d: PlanarDiagram, positions: Sequence[int], bit: int, field="Q",
             other: Optional[PlanarDiagram] = None) -> tuple[HomologyMap, PlanarDiagram]:
    """Composite of saddle maps resolving several crossings the same way.

    ``bit = 0`` gives ``Khr(d) -> Khr(d')`` (projection onto the all-0 face),
    ``bit = 1`` gives ``Khr(d') -> Khr(d)`` (inclusion of the all-1 face).
    The composite of the single-crossing maps equals the face map already at
    chain level, so intermediate diagrams are never reduced.
    """
    positions = tuple(sorted(set(positions)))
    if not positions:
        raise SkeinError("no crossings to resolve")
    if any(not 0 <= c < d.n_crossings for c in positions):
        raise SkeinError("crossing index out of range")
    small = resolve_face(d, positions, bit) if other is None else other
    m = len(positions)
    fld = as_field(field)
    big, red = _reduced(d, fld), _reduced(small, fld)
    tag = f"face {list(positions)}={bit}"
    if bit == 0:
        shift = (d.n_minus - small.n_minus, _qs(small) - _qs(d))
        return _push(big, red, projection_chain_map(big.complex, red.complex, positions),
                     shift, tag), small
    if bit == 1:
        shift = (m + small.n_minus - d.n_minus, m + _qs(d) - _qs(small))
        return _push(red, big, inclusion_chain_map(big.complex, red.complex, positions),
                     shift, tag), small
    raise SkeinError("bit must be 0 or 1")


def same_diagram(a: PlanarDiagram, b: PlanarDiagram) -> bool:
    return (a.crossings, a.signs, a.basepoint_edge, tuple(sorted(a.loops))) == \
        (b.crossings, b.signs, b.basepoint_edge, tuple(sorted(b.loops)))


def crossing_change_composite(d: PlanarDiagram, c: int, field="Q") -> tuple[HomologyMap, PlanarDiagram]:
    """Composite ``Khr(d) -> Khr(L) -> Khr(d')`` of two oriented saddles.

    ``d'`` has crossing ``c`` switched and ``L`` is the oriented resolution
    at ``c``, shared by both diagrams.  Requires ``c`` to be positive.
    """
    from .diagram import switch_crossing

    if d.signs[c] < 0:
        raise SkeinError("crossing must be positive (its 0-resolution is the oriented one)")
    first, mid = saddle_map(d, c, "out", field)
    k = switch_crossing(d, c)
    k = PlanarDiagram(k.crossings, k.signs, k.basepoint_edge, k.loops,
                      f"{d.label or 'D'} with crossing {c} switched")
    second, mid2 = saddle_map(k, c, "in", field)
    if not same_diagram(mid, mid2):
        raise SkeinError("oriented resolutions of the two diagrams differ")
    second = _transfer(second, first.target, second.target)
    return compose_maps(first, second), k


def saddle_chain(d: PlanarDiagram, crossings: Sequence[int], field="Q") -> tuple[HomologyMap, PlanarDiagram]:
    """Composite of ``Khr(d) -> Khr(d_0)`` maps resolving the listed crossings in turn.

    Indices refer to the current diagram at each step.
    """
    cur = d
    total: Optional[HomologyMap] = None
    for c in crossings:
        m, nxt = saddle_map(cur, c, "out", field)
        if total is not None:
            m = _transfer(m, total.target, m.target)
            total = compose_maps(total, m)
        else:
            total = m
        cur = nxt
    if total is None:
        raise SkeinError("empty saddle sequence")
    return total, cur


@dataclass(frozen=True)
class CobordismDescriptor:
    """Surface between two knots given by its Euler characteristic and self-intersection.

    ``movie`` lists ``(diagram spec, crossing, direction)`` saddle steps when
    the map is computed; otherwise ``declared`` lists asserted nonzero
    components as ``(source cell, target cell)`` pairs in ``(i, j)``.
    """

    euler_characteristic: int
    self_intersection: int
    source: str = ""
    target: str = ""
    movie: tuple = ()
    declared: tuple = ()
    provenance: str = "declared"

    def __post_init__(self):
        k = len(self.movie)
        if k and self.euler_characteristic != -k:
            raise SkeinError(f"a movie of {k} saddles has Euler characteristic {-k}")


def cobordism_order_bound(c: CobordismDescriptor) -> Shift:
    """Lower bound on the bidegree of the induced map."""
    ss = c.self_intersection
    if ss % 2:
        raise SkeinError(f"odd self-intersection {ss}: half-integer order is not supported")
    return ss // 2, c.euler_characteristic + 3 * ss // 2


def possible_components(source: DimTable, target: DimTable, shift: Shift) -> list[tuple[Cell, Cell]]:
    """Cell pairs where a map of the given bidegree can be nonzero."""
    s, t = shift
    return [((i, j), (i + s, j + t)) for (i, j) in source.cells if target[(i + s, j + t)]]


def check_declared_components(c: CobordismDescriptor, source: DimTable, target: DimTable,
                              cone_rank: Optional[int] = None) -> Shift:
    """Validate declared components against the order bound and the tables.

    With ``cone_rank`` the map rank is forced to ``(A + B - cone) / 2`` and
    must be at least the number of declared components.  Returns the shift.
    """
    shift = cobordism_order_bound(c)
    s, t = shift
    for src, tgt in c.declared:
        src, tgt = tuple(src), tuple(tgt)
        if (tgt[0] - src[0], tgt[1] - src[1]) != shift:
            raise SkeinError(f"declared component {src} -> {tgt} violates the shift {shift}")
        if not source[src] or not target[tgt]:
            raise SkeinError(f"declared component {src} -> {tgt} touches an empty cell")
    if cone_rank is not None:
        twice = source.total + target.total - cone_rank
        if twice < 0 or twice % 2:
            raise SkeinError("cone rank is incompatible with the two tables")
        if len(c.declared) > twice // 2:
            raise SkeinError(f"{len(c.declared)} declared components exceed map rank {twice // 2}")
    return shift
