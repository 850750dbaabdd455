"""Reduced Khovanov chain complex from the cube of resolutions.

Generators at a vertex ``v`` of the cube are labelings of the circles of the
complete smoothing by ``1`` (q-degree +1) and ``x`` (q-degree -1) with the
basepoint circle pinned to ``x``; this is the reduced *subcomplex*.  A
generator is stored as a circle mask, bit ``t`` set when circle ``t`` carries
``1``.  Circles of a vertex are numbered by their smallest edge.

Gradings::

    i = |v| - n_minus
    j = (#1 - #x) + |v| + n_plus - 2 n_minus

so the crossingless unknot has its single generator at ``(0, -1)``.  Edge
signs follow the usual rule ``(-1)^(number of 1s before the flipped slot)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from typing import Optional

import numba
import numpy as np

from .diagram import DiagramError, PlanarDiagram
from .fields import Field, as_field

DEFAULT_CROSSING_CAP = 20


class CubeError(ValueError):
    """Raised for cap violations or malformed cube requests."""


def crossing_cap() -> int:
    return int(os.environ.get("KHSS_CROSSING_CAP", DEFAULT_CROSSING_CAP))


@numba.njit(cache=True)
def _find(parent, e):
    while parent[e] != e:
        parent[e] = parent[parent[e]]
        e = parent[e]
    return e


@numba.njit(cache=True)
def _circles_kernel(pairs0, pairs1, n_edges, n_cross):
    """Circle id of every edge at every vertex, plus circle counts."""
    nv = 1 << n_cross
    circ = np.empty((nv, n_edges), dtype=np.int16)
    count = np.empty(nv, dtype=np.int16)
    parent = np.empty(n_edges, dtype=np.int32)
    label = np.empty(n_edges, dtype=np.int16)
    for v in range(nv):
        for e in range(n_edges):
            parent[e] = e
        for k in range(n_cross):
            pr = pairs1 if (v >> k) & 1 else pairs0
            for h in range(2):
                ra = _find(parent, pr[k, h, 0])
                rb = _find(parent, pr[k, h, 1])
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
        for e in range(n_edges):
            label[e] = -1
        c = 0
        for e in range(n_edges):
            r = _find(parent, e)
            if label[r] < 0:
                label[r] = c
                c += 1
            circ[v, e] = label[r]
        count[v] = c
    return circ, count


@numba.njit(cache=True)
def _insert_zero(local, pos):
    low = local & ((1 << pos) - 1)
    return low | ((local >> pos) << (pos + 1))


@numba.njit(cache=True)
def _remove_bit(mask, pos):
    low = mask & ((1 << pos) - 1)
    return low | ((mask >> (pos + 1)) << pos)


@numba.njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@numba.njit(cache=True)
def _column_kernel(circ, count, bp_edge, pairs0, n_cross, offsets, local, target, write,
                   rows, cols, vals):
    """Differential entries whose source has reduced q-degree ``target``.

    ``target`` is ``2 #1 - c(v) + |v|`` (the j grading before the n-plus and
    n-minus shift).  With ``write`` false only the number of entries is
    returned; otherwise rows/cols receive column-local indices taken from
    ``local``.
    """
    nv = 1 << n_cross
    n_edges = circ.shape[1]
    rep = np.empty(64, dtype=np.int64)
    perm = np.empty(64, dtype=np.int64)
    m = 0
    for v in range(nv):
        c = count[v]
        h = _popcount(v)
        twice = target + c - h
        if twice < 0 or twice & 1:
            continue
        want = twice >> 1
        if want > c - 1:
            continue
        for e in range(n_edges - 1, -1, -1):
            rep[circ[v, e]] = e
        bp = circ[v, bp_edge]
        nloc = 1 << (c - 1)
        for k in range(n_cross):
            if (v >> k) & 1:
                continue
            w = v | (1 << k)
            sign = 1 - 2 * (_popcount(v & ((1 << k) - 1)) & 1)
            bpw = circ[w, bp_edge]
            a = pairs0[k, 0, 0]
            b = pairs0[k, 0, 1]
            cc = pairs0[k, 1, 0]
            ca = circ[v, a]
            cb = circ[v, cc]
            for t in range(c):
                perm[t] = circ[w, rep[t]]
            base_w = offsets[w]
            merge = ca != cb
            c1 = circ[w, a]
            c2 = circ[w, b]
            for li in range(nloc):
                if _popcount(li) != want:
                    continue
                src = local[offsets[v] + li]
                mask = _insert_zero(li, bp)
                out = 0
                for t in range(c):
                    if t == ca or t == cb:
                        continue
                    if (mask >> t) & 1:
                        out |= 1 << perm[t]
                la = (mask >> ca) & 1
                if merge:
                    lb = (mask >> cb) & 1
                    if la == 0 and lb == 0:
                        continue
                    if la == 1 and lb == 1:
                        out |= 1 << perm[ca]
                    if write:
                        rows[m] = src
                        cols[m] = local[base_w + _remove_bit(out, bpw)]
                        vals[m] = sign
                    m += 1
                elif la:
                    # c1, c2 never hold the basepoint here: la = 1 excludes it
                    if write:
                        rows[m] = src
                        cols[m] = local[base_w + _remove_bit(out | (1 << c1), bpw)]
                        vals[m] = sign
                        rows[m + 1] = src
                        cols[m + 1] = local[base_w + _remove_bit(out | (1 << c2), bpw)]
                        vals[m + 1] = sign
                    m += 2
                else:
                    if write:
                        rows[m] = src
                        cols[m] = local[base_w + _remove_bit(out, bpw)]
                        vals[m] = sign
                    m += 1
    return m


@numba.njit(cache=True)
def _raw_qdegrees(count, offsets, total):
    q = np.empty(total, dtype=np.int16)
    for v in range(count.shape[0]):
        c = count[v]
        h = _popcount(v)
        for li in range(1 << (c - 1)):
            q[offsets[v] + li] = 2 * _popcount(li) - c + h
    return q


@dataclass
class CubeData:
    """Vertex-level data of the resolution cube of a diagram."""

    diagram: PlanarDiagram
    edge_ids: list[int]
    circ: np.ndarray          # [vertex, edge] -> circle index
    count: np.ndarray         # [vertex] -> number of circles
    bp_edge: int              # edge index of the basepoint
    pairs0: np.ndarray        # [crossing] -> edge-index pairs of the 0-smoothing

    @property
    def n(self) -> int:
        return self.diagram.n_crossings


def _smoothing_pairs(d: PlanarDiagram, idx: dict[int, int]):
    n = max(d.n_crossings, 1)
    p0 = np.zeros((n, 2, 2), dtype=np.int64)
    p1 = np.zeros((n, 2, 2), dtype=np.int64)
    for k, (a, b, c, e) in enumerate(d.crossings):
        p0[k] = [[idx[a], idx[b]], [idx[c], idx[e]]]
        p1[k] = [[idx[a], idx[e]], [idx[b], idx[c]]]
    return p0, p1


def cube_data(d: PlanarDiagram) -> CubeData:
    edges = d.edges()
    idx = {e: i for i, e in enumerate(edges)}
    p0, p1 = _smoothing_pairs(d, idx)
    circ, count = _circles_kernel(p0, p1, len(edges), d.n_crossings)
    return CubeData(d, edges, circ, count, idx[d.basepoint_edge], p0)


def vertex_circle_count(d: PlanarDiagram, v) -> int:
    """Number of circles in the complete smoothing ``v`` (a 0/1 sequence)."""
    v = list(v)
    if len(v) != d.n_crossings:
        raise CubeError(f"vertex has length {len(v)}, diagram has {d.n_crossings} crossings")
    parent = {e: e for e in d.edges()}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for (a, b, c, e), bit in zip(d.crossings, v):
        if bit not in (0, 1):
            raise CubeError("vertex entries must be 0 or 1")
        for x, y in ([(a, b), (c, e)] if bit == 0 else [(a, e), (b, c)]):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    return len({find(e) for e in parent})


@dataclass
class BigradedComplex:
    """Reduced Khovanov complex over a field.

    Generators are numbered globally in cube order (vertex, then label mask);
    ``ideg``/``qdeg`` give each generator's bidegree.  The differential is
    produced one quantum column at a time by :meth:`column`, which keeps
    memory bounded for 16-crossing diagrams.
    """

    diagram: PlanarDiagram
    field: Field
    cube: CubeData
    offsets: np.ndarray
    ideg: np.ndarray
    qdeg: np.ndarray
    qshift: int
    _cells: Optional[dict] = dataclass_field(default=None, repr=False)
    _coo: Optional[tuple] = dataclass_field(default=None, repr=False)

    @property
    def n_generators(self) -> int:
        return int(self.ideg.shape[0])

    def cells(self) -> dict[tuple[int, int], np.ndarray]:
        """Generator indices per bidegree, sorted."""
        if self._cells is None:
            key = (self.qdeg.astype(np.int64) << 20) + (self.ideg.astype(np.int64) + (1 << 19))
            order = np.argsort(key, kind="stable")
            out: dict[tuple[int, int], np.ndarray] = {}
            if len(order):
                sk = key[order]
                brk = np.flatnonzero(np.diff(sk)) + 1
                for chunk in np.split(order, brk):
                    g = int(chunk[0])
                    out[(int(self.ideg[g]), int(self.qdeg[g]))] = chunk
            self._cells = dict(sorted(out.items()))
        return self._cells

    def dims(self) -> dict[tuple[int, int], int]:
        return {k: len(v) for k, v in self.cells().items()}

    def qdegrees(self) -> list[int]:
        return sorted({j for _, j in self.cells()})

    def column(self, j: int):
        """Generators of quantum degree ``j`` and the differential among them.

        Returns ``(gens, rows, cols, vals)``: ``gens`` are the sorted global
        indices, ``rows``/``cols`` positions into ``gens`` of source and
        target of each entry.
        """
        sel = self.qdeg == j
        gens = np.flatnonzero(sel)
        n = self.diagram.n_crossings
        if n == 0 or len(gens) == 0:
            e = np.empty(0, dtype=np.int32)
            return gens, e, e, np.empty(0, dtype=np.int8)
        local = np.cumsum(sel, dtype=np.int32) - 1
        target = j - self.qshift
        p0 = self.cube.pairs0
        dummy32 = np.empty(0, dtype=np.int32)
        dummy8 = np.empty(0, dtype=np.int8)
        m = _column_kernel(self.cube.circ, self.cube.count, self.cube.bp_edge, p0, n,
                           self.offsets, local, target, False, dummy32, dummy32, dummy8)
        rows = np.empty(m, dtype=np.int32)
        cols = np.empty(m, dtype=np.int32)
        vals = np.empty(m, dtype=np.int8)
        _column_kernel(self.cube.circ, self.cube.count, self.cube.bp_edge, p0, n,
                       self.offsets, local, target, True, rows, cols, vals)
        return gens, rows, cols, vals

    def entries(self):
        """Whole differential as global COO arrays (small complexes only)."""
        if self._coo is None:
            rs, cs, vs = [], [], []
            for j in self.qdegrees():
                gens, r, c, v = self.column(j)
                rs.append(gens[r])
                cs.append(gens[c])
                vs.append(v)
            if rs:
                self._coo = (np.concatenate(rs), np.concatenate(cs), np.concatenate(vs))
            else:
                e = np.empty(0, dtype=np.int64)
                self._coo = (e, e, np.empty(0, dtype=np.int8))
        return self._coo

    def block(self, i: int, j: int):
        """Differential block from cell (i, j) to (i+1, j) as an ExactMatrix.

        Rows index the target cell, columns the source cell, both in cell order.
        """
        from .linalg import ExactMatrix

        cells = self.cells()
        src = cells.get((i, j), np.empty(0, dtype=np.int64))
        dst = cells.get((i + 1, j), np.empty(0, dtype=np.int64))
        rows, cols, vals = self.entries()
        sel = np.isin(rows, src)
        r = np.searchsorted(dst, cols[sel])
        c = np.searchsorted(src, rows[sel])
        entries: dict = {}
        for a, b, v in zip(r.tolist(), c.tolist(), vals[sel].tolist()):
            entries[(a, b)] = entries.get((a, b), 0) + v
        return ExactMatrix.from_entries(self.field, len(dst), len(src), entries)

    def generator(self, g: int) -> tuple[int, int]:
        """(vertex, full circle mask) of a global generator index."""
        v = int(np.searchsorted(self.offsets, g, side="right") - 1)
        li = g - int(self.offsets[v])
        bp = int(self.cube.circ[v, self.cube.bp_edge])
        low = li & ((1 << bp) - 1)
        return v, low | ((li >> bp) << (bp + 1))

    def index_of(self, v: int, mask: int) -> int:
        bp = int(self.cube.circ[v, self.cube.bp_edge])
        if (mask >> bp) & 1:
            raise CubeError("basepoint circle must carry x in the reduced complex")
        low = mask & ((1 << bp) - 1)
        return int(self.offsets[v]) + (low | ((mask >> (bp + 1)) << bp))

    def dump(self) -> str:
        """One line per differential entry: ``(i,j) row col value``.

        ``(i,j)`` is the source cell; ``row``/``col`` are the positions of
        source and target generators within their cells.
        """
        cells = self.cells()
        pos = np.empty(self.n_generators, dtype=np.int64)
        for gens in cells.values():
            pos[gens] = np.arange(len(gens))
        rows, cols, vals = self.entries()
        lines = []
        order = np.lexsort((pos[cols], pos[rows], self.qdeg[rows], self.ideg[rows]))
        for t in order:
            g = rows[t]
            val = self.field.normalize(int(vals[t]))
            lines.append(f"({self.ideg[g]},{self.qdeg[g]}) {pos[g]} {pos[cols[t]]} {val}")
        return "\n".join(lines)


def build_reduced_complex(d: PlanarDiagram, field="Q", cap: int | None = None) -> BigradedComplex:
    """Reduced Khovanov complex of ``d`` (subcomplex convention)."""
    fld = as_field(field)
    cap = crossing_cap() if cap is None else cap
    n = d.n_crossings
    if n > cap:
        raise CubeError(f"diagram has {n} crossings, cap is {cap}")
    cube = cube_data(d)
    sizes = np.left_shift(np.int64(1), cube.count.astype(np.int64) - 1)
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    total = int(offsets[-1])
    raw = _raw_qdegrees(cube.count, offsets, total)
    height = np.array([bin(v).count("1") for v in range(1 << n)], dtype=np.int16)
    ideg = (np.repeat(height, sizes) - d.n_minus).astype(np.int16)
    qshift = d.n_plus - 2 * d.n_minus
    qdeg = (raw + qshift).astype(np.int16)
    return BigradedComplex(d, fld, cube, offsets, ideg, qdeg, qshift)


def d_squared_is_zero(c: BigradedComplex) -> bool:
    """Check d∘d = 0 exactly over the complex's field."""
    from collections import defaultdict

    rows, cols, vals = c.entries()
    out = defaultdict(list)
    for r, col, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        out[r].append((col, v))
    for g in out:
        acc: dict = defaultdict(int)
        for mid, v1 in out[g]:
            for tgt, v2 in out.get(mid, ()):
                acc[tgt] += v1 * v2
        if any(c.field.normalize(val) != 0 for val in acc.values()):
            return False
    return True
