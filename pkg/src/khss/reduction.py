"""Gaussian elimination (cancellation) of a bigraded chain complex.

Each fixed-j column is reduced on its own.  Whenever a differential entry
``x -> y`` is invertible the pair is cancelled and the differential among the
remaining generators picks up the usual correction ``-d(z,x) d(y,x)^-1 d(y,w)``.
Processing generators in increasing homological degree leaves a complex with
zero differential, i.e. a basis of homology.

The bulk of the work runs in a compiled kernel over machine integers: mod p
for finite fields, and for Q only unit pivots with an overflow guard.  Any
generator the kernel cannot pivot on (a non-unit over Q) is left in place and
the small residual complex is finished by an exact pure-Python pass using
``fractions.Fraction``.  On overflow the whole column is redone in Python.

With ``track=True`` a log of the cancellations is kept; it gives the two
chain homotopy equivalences between the original and the reduced complex:

* ``project``: original -> reduced, ``x_s -> 0``,
  ``y_s -> -d(y,x)^-1 sum_z d(z,x) z``;
* ``lift``: reduced -> original, ``w -> w - d(y,x)^-1 d(y,w) x_s``.

Induced maps on homology are then ``project_D . f . lift_C``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numba
import numpy as np

from .fields import Field

_INF = 1 << 62
_LIMIT = 1 << 40


# --------------------------------------------------------------------------
# compiled kernel

@numba.njit(cache=True)
def _inv_mod(a, p):
    a %= p
    t, nt, r, nr = 0, 1, p, a
    while nr:
        qt = r // nr
        t, nt = nt, t - qt * nt
        r, nr = nr, r - qt * nr
    return t % p


@numba.njit(cache=True)
def _compact(start, length, cap, idx, val, extra):
    n = start.shape[0]
    used = 0
    for u in range(n):
        used += length[u]
    size = int(1.25 * (used + used // 2 + 2 * n + extra)) + 1024
    nidx = np.empty(size, dtype=idx.dtype)
    nval = np.empty(size, dtype=val.dtype)
    pos = 0
    for u in range(n):
        L = length[u]
        c = L + max(2, L // 2)
        s = start[u]
        for k in range(L):
            nidx[pos + k] = idx[s + k]
            nval[pos + k] = val[s + k]
        start[u] = pos
        cap[u] = c
        pos += c
    return nidx, nval, pos


@numba.njit(cache=True)
def _append(u, item, v, start, length, cap, idx, val, top):
    if length[u] == cap[u]:
        newcap = max(4, 2 * cap[u])
        if top + newcap > idx.shape[0]:
            idx, val, top = _compact(start, length, cap, idx, val, newcap)
        if length[u] == cap[u]:
            s = start[u]
            L = length[u]
            for k in range(L):
                idx[top + k] = idx[s + k]
                val[top + k] = val[s + k]
            start[u] = top
            cap[u] = newcap
            top += newcap
    pos = start[u] + length[u]
    idx[pos] = item
    val[pos] = v
    length[u] += 1
    return idx, val, top


@numba.njit(cache=True)
def _remove_item(u, item, start, length, idx, val):
    s = start[u]
    L = length[u]
    for k in range(L):
        if idx[s + k] == item:
            idx[s + k] = idx[s + L - 1]
            val[s + k] = val[s + L - 1]
            length[u] = L - 1
            return


@numba.njit(cache=True)
def _grow(arr, need):
    if need <= arr.shape[0]:
        return arr
    out = np.empty(max(need, 2 * arr.shape[0]), dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


@numba.njit(cache=True)
def _normalize(v, p):
    if p == 0:
        return v
    return v % p


@numba.njit(cache=True)
def _eliminate(n, order, rows, cols, vals, p, track):
    # adjacency pools with slack
    olen = np.zeros(n, dtype=np.int64)
    ilen = np.zeros(n, dtype=np.int64)
    for e in range(rows.shape[0]):
        olen[rows[e]] += 1
        ilen[cols[e]] += 1
    ocap = olen + 2
    icap = ilen + 2
    ostart = np.empty(n, dtype=np.int64)
    istart = np.empty(n, dtype=np.int64)
    otop = 0
    itop = 0
    for u in range(n):
        ostart[u] = otop
        otop += ocap[u]
        istart[u] = itop
        itop += icap[u]
    oidx = np.empty(otop + otop // 2 + 1024, dtype=np.int32)
    oval = np.empty(oidx.shape[0], dtype=np.int64)
    iidx = np.empty(itop + itop // 2 + 1024, dtype=np.int32)
    ival = np.empty(iidx.shape[0], dtype=np.int64)
    olen[:] = 0
    ilen[:] = 0
    for e in range(rows.shape[0]):
        r = rows[e]
        c = cols[e]
        v = _normalize(np.int64(vals[e]), p)
        if v == 0:
            continue
        oidx[ostart[r] + olen[r]] = c
        oval[ostart[r] + olen[r]] = v
        olen[r] += 1
        iidx[istart[c] + ilen[c]] = r
        ival[istart[c] + ilen[c]] = v
        ilen[c] += 1

    alive = np.ones(n, dtype=np.bool_)
    posmark = np.full(n, -1, dtype=np.int64)
    Zi = np.empty(64, dtype=np.int64)
    Zv = np.empty(64, dtype=np.int64)
    Wi = np.empty(64, dtype=np.int64)
    Wv = np.empty(64, dtype=np.int64)
    # log
    lx = np.empty(1024 if track else 0, dtype=np.int64)
    ly = np.empty(lx.shape[0], dtype=np.int64)
    la = np.empty(lx.shape[0], dtype=np.int64)
    lzp = np.zeros(lx.shape[0] + 1, dtype=np.int64)
    zbi = np.empty(4096 if track else 0, dtype=np.int64)
    zbv = np.empty(zbi.shape[0], dtype=np.int64)
    wbw = np.empty(zbi.shape[0], dtype=np.int64)
    wbs = np.empty(zbi.shape[0], dtype=np.int64)
    wbv = np.empty(zbi.shape[0], dtype=np.int64)
    nsteps = 0
    nz_tot = 0
    nw_tot = 0
    status = 0

    for t in range(n):
        x = order[t]
        if not alive[x] or olen[x] == 0:
            continue
        y = -1
        ylen = 0
        a = 0
        s0 = ostart[x]
        for k in range(olen[x]):
            z = oidx[s0 + k]
            av = oval[s0 + k]
            if p == 0 and av != 1 and av != -1:
                continue
            if y < 0 or ilen[z] < ylen or (ilen[z] == ylen and z < y):
                y = z
                ylen = ilen[z]
                a = av
        if y < 0:
            continue
        if p == 0:
            ainv = a
        elif p == 2:
            ainv = 1
        else:
            ainv = _inv_mod(a, p)
        nz = olen[x] - 1
        nw = ilen[y] - 1
        Zi = _grow(Zi, nz)
        Zv = _grow(Zv, nz)
        Wi = _grow(Wi, nw)
        Wv = _grow(Wv, nw)
        m = 0
        for k in range(olen[x]):
            z = oidx[s0 + k]
            if z != y:
                Zi[m] = z
                Zv[m] = oval[s0 + k]
                m += 1
        m = 0
        s1 = istart[y]
        for k in range(ilen[y]):
            w = iidx[s1 + k]
            if w != x:
                Wi[m] = w
                Wv[m] = ival[s1 + k]
                m += 1
        # detach x and y from the rest
        for k in range(ilen[x]):
            _remove_item(iidx[istart[x] + k], x, ostart, olen, oidx, oval)
        for k in range(olen[y]):
            _remove_item(oidx[ostart[y] + k], y, istart, ilen, iidx, ival)
        for k in range(nz):
            _remove_item(Zi[k], x, istart, ilen, iidx, ival)
        for k in range(nw):
            _remove_item(Wi[k], y, ostart, olen, oidx, oval)
        olen[x] = 0
        ilen[x] = 0
        olen[y] = 0
        ilen[y] = 0
        alive[x] = False
        alive[y] = False
        if track:
            if nsteps + 1 >= lx.shape[0]:
                lx = _grow(lx, nsteps + 2)
                ly = _grow(ly, nsteps + 2)
                la = _grow(la, nsteps + 2)
                lzp = _grow(lzp, lx.shape[0] + 1)
            lx[nsteps] = x
            ly[nsteps] = y
            la[nsteps] = ainv
            zbi = _grow(zbi, nz_tot + nz)
            zbv = _grow(zbv, nz_tot + nz)
            for k in range(nz):
                zbi[nz_tot + k] = Zi[k]
                zbv[nz_tot + k] = Zv[k]
            nz_tot += nz
            lzp[nsteps + 1] = nz_tot
            wbw = _grow(wbw, nw_tot + nw)
            wbs = _grow(wbs, nw_tot + nw)
            wbv = _grow(wbv, nw_tot + nw)
            for k in range(nw):
                wbw[nw_tot + k] = Wi[k]
                wbs[nw_tot + k] = nsteps
                wbv[nw_tot + k] = Wv[k]
            nw_tot += nw
            nsteps += 1
        if nz == 0 or nw == 0:
            continue
        # zig-zag correction on the out-lists of W
        for kw in range(nw):
            w = Wi[kw]
            f = _normalize(-Wv[kw] * ainv, p)
            s = ostart[w]
            for k in range(olen[w]):
                posmark[oidx[s + k]] = k
            for kz in range(nz):
                z = Zi[kz]
                delta = f * Zv[kz]
                pos = posmark[z]
                if pos >= 0:
                    s = ostart[w]
                    nv = _normalize(oval[s + pos] + delta, p)
                    if nv == 0:
                        last = olen[w] - 1
                        moved = oidx[s + last]
                        oidx[s + pos] = moved
                        oval[s + pos] = oval[s + last]
                        posmark[moved] = pos
                        posmark[z] = -1
                        olen[w] = last
                    else:
                        oval[s + pos] = nv
                        if p == 0 and (nv > _LIMIT or nv < -_LIMIT):
                            status = 1
                else:
                    nv = _normalize(delta, p)
                    if nv != 0:
                        posmark[z] = olen[w]
                        oidx, oval, otop = _append(w, z, nv, ostart, olen, ocap, oidx, oval, otop)
            s = ostart[w]
            for k in range(olen[w]):
                posmark[oidx[s + k]] = -1
        # and on the in-lists of Z
        for kz in range(nz):
            z = Zi[kz]
            s = istart[z]
            for k in range(ilen[z]):
                posmark[iidx[s + k]] = k
            for kw in range(nw):
                w = Wi[kw]
                delta = _normalize(-Wv[kw] * ainv, p) * Zv[kz]
                pos = posmark[w]
                if pos >= 0:
                    s = istart[z]
                    nv = _normalize(ival[s + pos] + delta, p)
                    if nv == 0:
                        last = ilen[z] - 1
                        moved = iidx[s + last]
                        iidx[s + pos] = moved
                        ival[s + pos] = ival[s + last]
                        posmark[moved] = pos
                        posmark[w] = -1
                        ilen[z] = last
                    else:
                        ival[s + pos] = nv
                else:
                    nv = _normalize(delta, p)
                    if nv != 0:
                        posmark[w] = ilen[z]
                        iidx, ival, itop = _append(z, w, nv, istart, ilen, icap, iidx, ival, itop)
            s = istart[z]
            for k in range(ilen[z]):
                posmark[iidx[s + k]] = -1
        if status:
            break

    # residual differential (only non-unit leftovers over Q)
    nres = 0
    for u in range(n):
        if alive[u]:
            nres += olen[u]
    rr = np.empty(nres, dtype=np.int64)
    rc = np.empty(nres, dtype=np.int64)
    rv = np.empty(nres, dtype=np.int64)
    m = 0
    for u in range(n):
        if alive[u]:
            s = ostart[u]
            for k in range(olen[u]):
                rr[m] = u
                rc[m] = oidx[s + k]
                rv[m] = oval[s + k]
                m += 1
    return (status, alive, rr, rc, rv, lx[:nsteps], ly[:nsteps], la[:nsteps],
            lzp[: nsteps + 1], zbi[:nz_tot], zbv[:nz_tot],
            wbw[:nw_tot], wbs[:nw_tot], wbv[:nw_tot])


# --------------------------------------------------------------------------
# exact pure-Python elimination (reference path and residual finisher)

def eliminate_python(n, ideg, edges, fld: Field, alive=None, track=False, step_base=0):
    """Cancel along invertible entries; ``edges`` is an iterable of (src, tgt, value).

    Returns ``(alive, steps, rev)`` where steps are ``(x, y, ainv, [(z, d_zx)])``
    and ``rev`` maps ``w`` to ``[(step, d_yw)]``.
    """
    out: dict[int, dict] = {}
    inn: dict[int, dict] = {}
    norm = fld.normalize
    for r, c, v in edges:
        nv = norm(out.setdefault(r, {}).get(c, 0) + v)
        if nv:
            out[r][c] = nv
            inn.setdefault(c, {})[r] = nv
        else:
            out[r].pop(c, None)
            inn.setdefault(c, {}).pop(r, None)
    alive = [True] * n if alive is None else list(alive)
    steps: list = []
    rev: dict = {}
    order = sorted(out, key=lambda t: (ideg[t], t))
    empty: dict = {}
    for x in order:
        ox = out.get(x)
        if not alive[x] or not ox:
            continue
        best = None
        for t, a in ox.items():
            unit = 0 if (fld.char or a == 1 or a == -1) else 1
            key = (unit, len(inn.get(t, empty)), t)
            if best is None or key < best[0]:
                best = (key, t)
        y = best[1]
        a = ox.pop(y)
        ainv = fld.inv(a)
        W = inn.get(y, {})
        W.pop(x, None)
        Z = ox
        if track:
            s = step_base + len(steps)
            steps.append((x, y, ainv, list(Z.items())))
            for w, dyw in W.items():
                rev.setdefault(w, []).append((s, dyw))
        for u in inn.get(x, empty):
            out[u].pop(x, None)
        for z in out.get(y, empty):
            inn[z].pop(y, None)
        for z in Z:
            inn[z].pop(x, None)
        for w in W:
            out[w].pop(y, None)
        for w, dyw in W.items():
            f = -dyw * ainv
            ow = out.setdefault(w, {})
            for z, dzx in Z.items():
                nv = norm(ow.get(z, 0) + f * dzx)
                if nv:
                    ow[z] = nv
                    inn.setdefault(z, {})[w] = nv
                else:
                    ow.pop(z, None)
                    inn[z].pop(w, None)
        alive[x] = alive[y] = False
        out[x] = {}
        out[y] = {}
        inn[x] = {}
        inn[y] = {}
    return alive, steps, rev


# --------------------------------------------------------------------------
# results and the two comparison maps

@dataclass
class _ColumnLog:
    gens: np.ndarray            # local -> global
    n_nb: int                   # number of kernel steps
    lx: np.ndarray
    ly: np.ndarray
    la: np.ndarray
    lzp: np.ndarray
    zbi: np.ndarray
    zbv: np.ndarray
    rev_ptr: np.ndarray         # CSR over w for kernel steps
    rev_s: np.ndarray
    rev_v: np.ndarray
    py_steps: list
    py_rev: dict
    step_of: np.ndarray

    def step(self, s):
        if s < self.n_nb:
            a, b = int(self.lzp[s]), int(self.lzp[s + 1])
            return (int(self.lx[s]), int(self.ly[s]), int(self.la[s]),
                    zip(self.zbi[a:b].tolist(), self.zbv[a:b].tolist()))
        x, y, ainv, zs = self.py_steps[s - self.n_nb]
        return x, y, ainv, zs

    def rev(self, w):
        a, b = int(self.rev_ptr[w]), int(self.rev_ptr[w + 1])
        res = list(zip(self.rev_s[a:b].tolist(), self.rev_v[a:b].tolist()))
        res.extend(self.py_rev.get(w, ()))
        return res


@dataclass
class Reduction:
    """Result of reducing a complex: surviving generators per cell."""

    field: Field
    survivors: dict[tuple[int, int], list[int]]     # cell -> global ids, sorted
    tracked: bool
    _logs: dict = field(default_factory=dict, repr=False)        # j -> _ColumnLog
    _qdeg: object = field(default=None, repr=False)

    def dims(self) -> dict[tuple[int, int], int]:
        return {k: len(v) for k, v in self.survivors.items() if v}

    def _require_tracking(self):
        if not self.tracked:
            raise RuntimeError("reduction was run without track=True")

    def _locate(self, g):
        j = int(self._qdeg[g])
        log = self._logs[j]
        loc = int(np.searchsorted(log.gens, g))
        return j, log, loc

    def project(self, vec: dict[int, object]) -> dict[int, object]:
        """Image of a chain (global id -> coefficient) in the reduced complex."""
        self._require_tracking()
        fld = self.field
        by_col: dict[int, dict] = {}
        for g, c in vec.items():
            j, log, loc = self._locate(g)
            col = by_col.setdefault(j, {})
            col[loc] = col.get(loc, 0) + c
        out: dict[int, object] = {}
        for j, v in by_col.items():
            log = self._logs[j]
            step_of = log.step_of
            heap = [(int(step_of[loc]), loc) for loc in v]
            heapq.heapify(heap)
            done = set()
            while heap:
                s, loc = heapq.heappop(heap)
                if loc in done:
                    continue
                done.add(loc)
                c = fld.normalize(v.pop(loc, 0))
                if c == 0:
                    continue
                if s == _INF:
                    out[int(log.gens[loc])] = c
                    continue
                x, y, ainv, zs = log.step(s)
                if loc == x:
                    continue
                f = -c * ainv
                for z, dzx in zs:
                    if z in v:
                        v[z] += f * dzx
                    else:
                        v[z] = f * dzx
                        heapq.heappush(heap, (int(step_of[z]), z))
        return {g: c for g, c in out.items() if fld.normalize(c) != 0}

    def lift(self, g: int) -> dict[int, object]:
        """Cycle in the original complex representing surviving generator ``g``."""
        self._require_tracking()
        fld = self.field
        j, log, loc = self._locate(g)
        v = {loc: 1}
        heap = [(-s, loc, dyw) for s, dyw in log.rev(loc)]
        heapq.heapify(heap)
        while heap:
            negs, w, dyw = heapq.heappop(heap)
            c = fld.normalize(v.get(w, 0))
            if c == 0:
                continue
            x, _, ainv, _ = log.step(-negs)
            add = -ainv * dyw * c
            if x in v:
                v[x] += add
            else:
                v[x] = add
                for s2, d2 in log.rev(x):
                    heapq.heappush(heap, (-s2, x, d2))
        res = {}
        for loc2, c in v.items():
            c = fld.normalize(c)
            if c != 0:
                res[int(log.gens[loc2])] = c
        return res


def _reduce_column(n, ideg_list, order, rows, cols, vals, fld: Field, track: bool):
    p = fld.char
    ok = p == 0 or p < (1 << 20)
    res = None
    if ok and n:
        res = _eliminate(n, order, rows, cols, vals, p, track)
        if res[0] != 0:
            res = None
    if res is None:
        edges = zip(rows.tolist(), cols.tolist(), vals.tolist())
        alive, steps, rev = eliminate_python(n, ideg_list, edges, fld, track=track)
        e = np.empty(0, dtype=np.int64)
        nb = (e, e, e, np.zeros(1, dtype=np.int64), e, e, e, e, e)
        return alive, nb, steps, rev
    (_, alive, rr, rc, rv, lx, ly, la, lzp, zbi, zbv, wbw, wbs, wbv) = res
    steps: list = []
    rev: dict = {}
    alive = alive.tolist()
    if len(rr):
        edges = zip(rr.tolist(), rc.tolist(), rv.tolist())
        alive, steps, rev = eliminate_python(n, ideg_list, edges, fld, alive=alive,
                                             track=track, step_base=len(lx))
    return alive, (lx, ly, la, lzp, zbi, zbv, wbw, wbs, wbv), steps, rev


def reduce_complex(c, track: bool = False, columns=None) -> Reduction:
    """Reduce a :class:`~khss.cube.BigradedComplex` column by column.

    ``columns`` restricts the work to the listed quantum degrees.
    """
    fld = c.field
    red = Reduction(fld, {}, track, _qdeg=c.qdeg)
    for j in c.qdegrees():
        if columns is not None and j not in columns:
            continue
        gens, r, cl, v = c.column(j)
        ideg = c.ideg[gens]
        n = len(gens)
        order = np.lexsort((np.arange(n), ideg)).astype(np.int64)
        ideg_list = ideg.tolist()
        alive, nb, steps, rev = _reduce_column(n, ideg_list, order, r, cl, v, fld, track)
        del r, cl, v
        for t in range(n):
            if alive[t]:
                red.survivors.setdefault((ideg_list[t], j), []).append(int(gens[t]))
        if track:
            lx, ly, la, lzp, zbi, zbv, wbw, wbs, wbv = nb
            srt = np.argsort(wbw, kind="stable")
            rev_ptr = np.zeros(n + 1, dtype=np.int64)
            np.add.at(rev_ptr, wbw + 1, 1)
            rev_ptr = np.cumsum(rev_ptr)
            step_of = np.full(n, _INF, dtype=np.int64)
            step_of[lx] = np.arange(len(lx))
            step_of[ly] = np.arange(len(ly))
            for s, (x, y, _, _) in enumerate(steps, start=len(lx)):
                step_of[x] = s
                step_of[y] = s
            red._logs[j] = _ColumnLog(gens, len(lx), lx, ly, la, lzp, zbi, zbv,
                                      rev_ptr, wbs[srt], wbv[srt], steps, rev, step_of)
    red.survivors = {k: sorted(v) for k, v in sorted(red.survivors.items())}
    return red
