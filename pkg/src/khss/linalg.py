"""Exact sparse linear algebra over GF(2), GF(p) and Q.

Matrices are stored as one dict per row (column -> nonzero value).  Over
GF(2) a bit-packed path keeps each row as a Python int.  Over Q the row
reduction is fraction-free: rows stay integral (``r <- a*r - b*pivot``,
then divided by their content) and fractions only appear in the final
back substitution for kernel vectors, which are rescaled to be integral.

The pivot rule is fixed: rows are inserted in order and a row's pivot is its
first nonzero column after reduction against earlier pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .fields import Field, as_field


class LinalgError(ValueError):
    pass


class ExactMatrix:
    """Immutable sparse matrix over a prime field or Q."""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.field = as_field(field)
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        norm = self.field.normalize
        clean = []
        for r in range(self.nrows):
            src = rows[r] if rows is not None and r < len(rows) else {}
            row = {}
            for c, v in src.items():
                if not 0 <= c < self.ncols:
                    raise LinalgError(f"column {c} out of range for {self.ncols} columns")
                v = norm(v)
                if v != 0:
                    row[c] = v
            clean.append(row)
        if rows is not None and len(rows) > self.nrows:
            raise LinalgError("more rows supplied than nrows")
        self._rows = tuple(clean)

    # constructors -----------------------------------------------------------
    @classmethod
    def from_entries(cls, field, nrows, ncols, entries: dict) -> "ExactMatrix":
        rows: list[dict] = [dict() for _ in range(nrows)]
        for (r, c), v in entries.items():
            if not 0 <= r < nrows:
                raise LinalgError(f"row {r} out of range for {nrows} rows")
            rows[r][c] = rows[r].get(c, 0) + v
        return cls(field, nrows, ncols, rows)

    @classmethod
    def from_dense(cls, field, data: Sequence[Sequence]) -> "ExactMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        if any(len(r) != ncols for r in data):
            raise LinalgError("ragged dense matrix")
        return cls(field, nrows, ncols, [{c: v for c, v in enumerate(r) if v} for r in data])

    @classmethod
    def identity(cls, field, n: int) -> "ExactMatrix":
        return cls(field, n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zero(cls, field, nrows: int, ncols: int) -> "ExactMatrix":
        return cls(field, nrows, ncols)

    # access -----------------------------------------------------------------
    def row(self, r: int) -> dict:
        return dict(self._rows[r])

    def entries(self) -> dict:
        return {(r, c): v for r, row in enumerate(self._rows) for c, v in row.items()}

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "ExactMatrix":
        cols: list[dict] = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                cols[c][r] = v
        return ExactMatrix(self.field, self.ncols, self.nrows, cols)

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.ncols:
            raise LinalgError("vector length does not match column count")
        norm = self.field.normalize
        return [norm(sum(v * vec[c] for c, v in row.items())) for row in self._rows]

    def rank(self) -> int:
        return rank_kernel_image(self).rank

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return compose(self, other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ExactMatrix) and self.field == other.field
                and self.shape == other.shape and self._rows == other._rows)

    def __hash__(self):
        return hash((self.field, self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.field.name}, {self.nrows}x{self.ncols}, nnz={self.nnz})"


@dataclass(frozen=True)
class RankKernelImage:
    rank: int
    kernel: tuple[tuple, ...]     # vectors of length ncols with M v = 0
    image: tuple[tuple, ...]      # independent columns of M (length nrows)
    pivot_columns: tuple[int, ...]


def compose(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Matrix product ``a @ b`` (apply ``b`` first)."""
    if a.field != b.field:
        raise LinalgError(f"field mismatch: {a.field} vs {b.field}")
    if a.ncols != b.nrows:
        raise LinalgError(f"inner dimensions differ: {a.ncols} vs {b.nrows}")
    rows = []
    brows = b._rows
    for row in a._rows:
        acc: dict = {}
        for k, v in row.items():
            for c, w in brows[k].items():
                acc[c] = acc.get(c, 0) + v * w
        rows.append(acc)
    return ExactMatrix(a.field, a.nrows, b.ncols, rows)


# --------------------------------------------------------------------------
# echelon forms

def _echelon_gf2(rows: Iterable[dict]):
    """Row echelon over GF(2); returns pivot column -> packed row, in order."""
    piv: dict[int, int] = {}
    order: list[int] = []
    for row in rows:
        bits = 0
        for c in row:
            bits ^= 1 << c
        while bits:
            low = (bits & -bits).bit_length() - 1
            if low in piv:
                bits ^= piv[low]
            else:
                piv[low] = bits
                order.append(low)
                break
    return piv, order


def _insert_generic(piv: dict, src: dict, fld: Field):
    """Reduce ``src`` against pivot rows; store it if independent.

    Returns the new pivot column or ``None``.
    """
    p = fld.char
    row = dict(src)
    if p == 0:
        den = 1
        for v in row.values():
            if isinstance(v, Fraction) and v.denominator != 1:
                den = den * v.denominator // gcd(den, v.denominator)
        row = {c: int(v * den) for c, v in row.items()}
    while row:
        lead = min(row)
        if lead not in piv:
            if p == 0:
                g = 0
                for v in row.values():
                    g = gcd(g, int(v))
                if g > 1:
                    row = {c: v // g for c, v in row.items()}
                if row[lead] < 0:
                    row = {c: -v for c, v in row.items()}
            else:
                inv = fld.inv(row[lead])
                row = {c: (v * inv) % p for c, v in row.items()}
            piv[lead] = row
            return lead
        prow = piv[lead]
        a = prow[lead]
        b = row[lead]
        if p == 0:
            # fraction-free: row <- a*row - b*prow
            new = {c: a * v for c, v in row.items()} if a != 1 else dict(row)
            for c, v in prow.items():
                nv = new.get(c, 0) - b * v
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
            g = 0
            for v in new.values():
                g = gcd(g, int(v))
                if g == 1:
                    break
            if g > 1:
                new = {c: v // g for c, v in new.items()}
        else:
            new = dict(row)
            for c, v in prow.items():  # pivot rows are monic
                nv = (new.get(c, 0) - b * v) % p
                if nv:
                    new[c] = nv
                else:
                    new.pop(c, None)
        row = new
    return None


def _echelon_generic(rows: Iterable[dict], fld: Field):
    """Row echelon with first-nonzero pivots; rows kept integral over Q."""
    piv: dict[int, dict] = {}
    order: list[int] = []
    for src in rows:
        lead = _insert_generic(piv, src, fld)
        if lead is not None:
            order.append(lead)
    return piv, order


def _kernel_from_echelon(piv: dict, ncols: int, fld: Field, packed: bool):
    """Kernel basis from a row echelon form (one vector per free column)."""
    pivcols = sorted(piv)
    free = [c for c in range(ncols) if c not in piv]
    # reduced rows: back substitution, highest pivot first
    rref: dict[int, dict] = {}
    for lead in reversed(pivcols):
        if packed:
            bits = piv[lead]
            row = {}
            c = bits
            while c:
                low = (c & -c).bit_length() - 1
                row[low] = 1
                c &= c - 1
        else:
            row = dict(piv[lead])
        a = row[lead]
        if fld.char == 0:
            row = {c: Fraction(v, a) for c, v in row.items()}
        elif a != 1:
            inv = fld.inv(a)
            row = {c: (v * inv) % fld.char for c, v in row.items()}
        for c in [c for c in row if c != lead and c in rref]:
            f = row.pop(c)
            for cc, vv in rref[c].items():
                if cc == c:
                    continue
                nv = row.get(cc, 0) - f * vv
                if fld.char:
                    nv %= fld.char
                if nv:
                    row[cc] = nv
                else:
                    row.pop(cc, None)
        rref[lead] = row
    kernel = []
    for fcol in free:
        vec = [0] * ncols
        vec[fcol] = 1
        for lead, row in rref.items():
            v = row.get(fcol, 0)
            if v:
                vec[lead] = -v if fld.char == 0 else (-v) % fld.char
        if fld.char == 0:
            den = 1
            for v in vec:
                if isinstance(v, Fraction):
                    den = den * v.denominator // gcd(den, v.denominator)
            vec = [int(v * den) for v in vec]
        kernel.append(tuple(vec))
    return kernel


def rank_kernel_image(m: ExactMatrix, packed: bool | None = None) -> RankKernelImage:
    """Rank, a kernel basis and an image basis of ``m``.

    ``packed`` forces (True) or disables (False) the bit-packed GF(2) path;
    by default it is used whenever the field is GF(2).
    """
    fld = m.field
    if packed is None:
        packed = fld.char == 2
    if packed and fld.char != 2:
        raise LinalgError("bit-packed path is GF(2) only")
    if packed:
        piv, _ = _echelon_gf2(m._rows)
        tpiv, torder = _echelon_gf2(m.transpose()._rows)
    else:
        piv, _ = _echelon_generic(m._rows, fld)
        tpiv, torder = _echelon_generic(m.transpose()._rows, fld)
    rank = len(piv)
    kernel = _kernel_from_echelon(piv, m.ncols, fld, packed)
    # independent columns, found by inserting columns left to right
    indep = _independent_columns(m, packed)
    cols = m.transpose()._rows
    image = tuple(tuple(cols[c].get(r, 0) for r in range(m.nrows)) for c in indep)
    assert len(indep) == rank == len(tpiv)
    return RankKernelImage(rank, tuple(kernel), image, tuple(indep))


def _independent_columns(m: ExactMatrix, packed: bool) -> list[int]:
    cols = m.transpose()._rows
    fld = m.field
    chosen = []
    if packed:
        piv: dict[int, int] = {}
        for c, col in enumerate(cols):
            bits = 0
            for r in col:
                bits ^= 1 << r
            while bits:
                low = (bits & -bits).bit_length() - 1
                if low in piv:
                    bits ^= piv[low]
                else:
                    piv[low] = bits
                    chosen.append(c)
                    break
        return chosen
    gpiv: dict[int, dict] = {}
    for c, col in enumerate(cols):
        if _insert_generic(gpiv, col, fld) is not None:
            chosen.append(c)
    return chosen


def rank(m: ExactMatrix) -> int:
    """Rank only (cheaper than :func:`rank_kernel_image`)."""
    if m.field.char == 2:
        piv, _ = _echelon_gf2(m._rows)
    else:
        piv, _ = _echelon_generic(m._rows, m.field)
    return len(piv)


def solve(m: ExactMatrix, rhs: Sequence):
    """One solution ``x`` of ``m x = rhs``, or ``None`` if inconsistent."""
    if len(rhs) != m.nrows:
        raise LinalgError("right-hand side length does not match row count")
    fld = m.field
    aug = ExactMatrix(fld, m.nrows, m.ncols + 1,
                      [{**row, **({m.ncols: rhs[r]} if rhs[r] else {})} for r, row in enumerate(m._rows)])
    piv, _ = _echelon_generic(aug._rows, fld)
    if m.ncols in piv:
        return None
    # a kernel vector of the augmented matrix with last coordinate -1 gives x
    kern = _kernel_from_echelon(piv, m.ncols + 1, fld, False)
    for vec in kern:
        last = vec[m.ncols]
        if last:
            scale = fld.div(-1, last) if fld.char else Fraction(-1, last)
            x = [fld.normalize(v * scale) for v in vec[: m.ncols]]
            return x
    return [0] * m.ncols


def dense_rank(data: Sequence[Sequence], field) -> int:
    """Plain dense Gaussian elimination with Fractions (test oracle)."""
    fld = as_field(field)
    a = [[Fraction(v) for v in r] for r in data]
    if fld.char:
        a = [[Fraction(int(v) % fld.char) for v in r] for r in a]
    rk = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        pr = next((r for r in range(rk, len(a)) if a[r][c] != 0), None)
        if pr is None:
            continue
        a[rk], a[pr] = a[pr], a[rk]
        inv = fld.inv(int(a[rk][c])) if fld.char else 1 / a[rk][c]
        for r in range(len(a)):
            if r != rk and a[r][c] != 0:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[rk])]
                if fld.char:
                    a[r] = [Fraction(int(x) % fld.char) if x.denominator == 1 else x for x in a[r]]
        rk += 1
    return rk
