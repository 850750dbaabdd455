"""Bigraded reduced Khovanov homology tables and the invariants they carry.

A :class:`DimTable` stores the dimension of Khr^{i,j} per cell.  Plots and
text grids use the customary ``(i, j - i)`` coordinates.  The graded Euler
characteristic ``sum (-1)^i q^j dim`` is the Jones polynomial with the unknot
normalized to ``q^-1``; the knot determinant is its absolute value at
``t = q^2 = -1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .cube import BigradedComplex, build_reduced_complex
from .diagram import PlanarDiagram
from .fields import as_field
from .laurent import LaurentPoly, gaussian_abs
from .reduction import Reduction, reduce_complex

Cell = tuple[int, int]


@dataclass(frozen=True)
class DimTable:
    """Dimensions of a bigraded vector space, keyed by ``(i, j)``."""

    field: str
    cells: Mapping[Cell, int]
    label: str = ""

    def __post_init__(self):
        clean = {(int(i), int(j)): int(v) for (i, j), v in self.cells.items() if v}
        if any(v < 0 for v in clean.values()):
            raise ValueError("dimensions must be nonnegative")
        object.__setattr__(self, "cells", dict(sorted(clean.items())))

    @property
    def total(self) -> int:
        return sum(self.cells.values())

    def __getitem__(self, cell: Cell) -> int:
        return self.cells.get(cell, 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, DimTable) and self.field == other.field and self.cells == other.cells

    def __hash__(self):
        return hash((self.field, tuple(self.cells.items())))

    def same_cells(self, other: "DimTable") -> bool:
        return self.cells == other.cells

    def shifted(self, di: int, dj: int, label: str | None = None) -> "DimTable":
        return DimTable(self.field, {(i + di, j + dj): v for (i, j), v in self.cells.items()},
                        self.label if label is None else label)

    def mirrored(self) -> "DimTable":
        """Table of the mirror knot: ``(i, j) -> (-i, -j - 2)`` in this normalization."""
        return DimTable(self.field, {(-i, -j - 2): v for (i, j), v in self.cells.items()},
                        f"mirror({self.label})" if self.label else "")

    def plot_cells(self) -> dict[Cell, int]:
        """Cells in ``(i, j - i)`` coordinates."""
        return {(i, j - i): v for (i, j), v in self.cells.items()}

    @classmethod
    def from_plot(cls, field, plot: Mapping[Cell, int], label: str = "") -> "DimTable":
        return cls(str(as_field(field)), {(i, d + i): v for (i, d), v in plot.items()}, label)

    # serialization ----------------------------------------------------------
    def to_dict(self) -> dict:
        return {"field": self.field, "cells": [[i, j, v] for (i, j), v in self.cells.items()],
                "total": self.total}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, label: str = "") -> "DimTable":
        data = json.loads(text)
        table = cls(data["field"], {(i, j): v for i, j, v in data["cells"]}, label)
        if "total" in data and data["total"] != table.total:
            raise ValueError("total does not match the cells")
        return table

    def poincare(self) -> str:
        """``t^i q^j`` monomials, each repeated per dimension as a coefficient."""
        terms = []
        for (i, j), v in self.cells.items():
            terms.append(("" if v == 1 else f"{v}") + f"t^{i}q^{j}")
        return " + ".join(terms) if terms else "0"

    def grid(self) -> str:
        """Text plot with ``i`` across and ``j - i`` going up."""
        if not self.cells:
            return "(empty)"
        pc = self.plot_cells()
        xs = [i for i, _ in pc]
        ys = [d for _, d in pc]
        w = max(3, max(len(str(x)) for x in range(min(xs), max(xs) + 1)) + 1)
        lines = []
        for y in range(max(ys), min(ys) - 1, -1):
            row = f"{y:>4} |"
            for x in range(min(xs), max(xs) + 1):
                v = pc.get((x, y), 0)
                row += f"{v if v else '.':>{w}}"
            lines.append(row)
        lines.append("     +" + "-" * (w * (max(xs) - min(xs) + 1)))
        lines.append("      " + "".join(f"{x:>{w}}" for x in range(min(xs), max(xs) + 1)))
        lines.append("      i across, j-i up")
        return "\n".join(lines)

    def svg(self, unit: int = 28, marks: Mapping[Cell, str] | None = None) -> str:
        """SVG grid plot in ``(i, j - i)`` coordinates.

        ``marks`` may map plot cells to ``"open"`` to draw hollow circles.
        """
        pc = self.plot_cells()
        if not pc:
            return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>'
        x0, x1 = min(i for i, _ in pc), max(i for i, _ in pc)
        y0, y1 = min(d for _, d in pc), max(d for _, d in pc)
        W = (x1 - x0 + 3) * unit
        H = (y1 - y0 + 3) * unit
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">']
        for k in range(x1 - x0 + 1):
            x = (k + 1.5) * unit
            out.append(f'<line x1="{x}" y1="{unit}" x2="{x}" y2="{H - unit}" stroke="#ddd"/>')
            out.append(f'<text x="{x}" y="{H - unit / 3}" font-size="10" text-anchor="middle">{x0 + k}</text>')
        for k in range(y1 - y0 + 1):
            y = H - (k + 1.5) * unit
            out.append(f'<line x1="{unit}" y1="{y}" x2="{W - unit}" y2="{y}" stroke="#ddd"/>')
            out.append(f'<text x="{unit / 2}" y="{y + 3}" font-size="10" text-anchor="middle">{y0 + k}</text>')
        marks = marks or {}
        for (i, d), v in sorted(pc.items()):
            cx = (i - x0 + 1.5) * unit
            cy = H - (d - y0 + 1.5) * unit
            fill = "none" if marks.get((i, d)) == "open" else "black"
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{unit / 5}" fill="{fill}" stroke="black"/>')
            if v > 1:
                out.append(f'<text x="{cx + unit / 4}" y="{cy - unit / 4}" font-size="9">{v}</text>')
        out.append("</svg>")
        return "\n".join(out)


@dataclass(frozen=True)
class DeltaProfile:
    """Ranks per ``delta = j - 2i``."""

    ranks: Mapping[int, int]
    thin: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", dict(sorted((d, r) for d, r in self.ranks.items() if r)))
        object.__setattr__(self, "thin", len(self.ranks) <= 1)

    @property
    def support(self) -> list[int]:
        return list(self.ranks)

    def adjacent_pair(self) -> bool:
        """Support is exactly two delta values two apart (knots have j odd)."""
        s = self.support
        return len(s) == 2 and s[1] - s[0] == 2


# --------------------------------------------------------------------------

def table_from_reduction(red: Reduction, label: str = "") -> DimTable:
    return DimTable(red.field.name, red.dims(), label)


def bigraded_homology(c: BigradedComplex, label: str | None = None) -> DimTable:
    """Homology of a reduced complex, one quantum column at a time."""
    red = reduce_complex(c)
    return table_from_reduction(red, c.diagram.label if label is None else label)


def homology_by_block_ranks(c: BigradedComplex) -> DimTable:
    """Same table via ``dim ker - rank incoming`` on explicit blocks.

    Independent of the cancellation engine; intended for small complexes.
    """
    from .linalg import rank

    dims = c.dims()
    ranks = {}
    for (i, j) in dims:
        ranks[(i, j)] = rank(c.block(i, j))
    out = {}
    for (i, j), n in dims.items():
        h = n - ranks[(i, j)] - ranks.get((i - 1, j), 0)
        if h:
            out[(i, j)] = h
    return DimTable(c.field.name, out, c.diagram.label)


@lru_cache(maxsize=64)
def _cached_table(d: PlanarDiagram, field_name: str) -> DimTable:
    return bigraded_homology(build_reduced_complex(d, field_name))


def khovanov_homology(d: PlanarDiagram, field="Q") -> DimTable:
    """Reduced Khovanov homology table of a diagram (memoized per diagram)."""
    t = _cached_table(d, as_field(field).name)
    return DimTable(t.field, t.cells, d.label)


def jones_polynomial(t: DimTable) -> LaurentPoly:
    """Graded Euler characteristic ``sum (-1)^i dim q^j`` (unknot -> q^-1).

    Over any field the Euler characteristic is the same polynomial, since it
    can be read off the chain groups.
    """
    acc: dict[int, int] = {}
    for (i, j), v in t.cells.items():
        acc[j] = acc.get(j, 0) + (-v if i % 2 else v)
    return LaurentPoly(acc)


def jones_determinant(v: LaurentPoly) -> int:
    """``|V(t = -1)|`` with ``t = q^2``, i.e. the modulus of ``V`` at ``q = i``."""
    re, im = v.at_sqrt_minus_one()
    return gaussian_abs(re, im)


def delta_profile(t: DimTable) -> DeltaProfile:
    acc: dict[int, int] = {}
    for (i, j), v in t.cells.items():
        acc[j - 2 * i] = acc.get(j - 2 * i, 0) + v
    return DeltaProfile(acc)


def manion_delta_ranks(p: int, q: int, r: int) -> tuple[int, int]:
    """Expected (upper, lower) delta ranks of Khr(P(-p, q, r)), 2 <= p < min(q, r)."""
    if not (2 <= p < min(q, r)):
        raise ValueError("need 2 <= p < min(q, r)")
    if p % 2:
        return p * p - 1, (q - p) * (r - p) - 1
    return p * p, (q - p) * (r - p)


def compare_tables(computed: DimTable, reference: Mapping[Cell, int]) -> dict[Cell, tuple[int, int]]:
    """Cells where two tables disagree: cell -> (computed, reference)."""
    keys = set(computed.cells) | set(reference)
    return {k: (computed[k], reference.get(k, 0)) for k in sorted(keys)
            if computed[k] != reference.get(k, 0)}


def best_translation(computed: DimTable, reference: Mapping[Cell, int]) -> tuple[int, int] | None:
    """Shift ``(di, dj)`` carrying ``computed`` exactly onto ``reference``, if any."""
    if not computed.cells or not reference:
        return None
    a = min(computed.cells)
    b = min(reference)
    di, dj = b[0] - a[0], b[1] - a[1]
    moved = computed.shifted(di, dj)
    return (di, dj) if moved.cells == dict(sorted(reference.items())) else None


def parse_poincare(text: str) -> dict[Cell, int]:
    """Parse ``t^0q^8 + t^2q^12 + 2t^3q^14`` into ``{(0, 8): 1, ...}``.

    Unicode superscripts are accepted.
    """
    sup = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻", "0123456789-")
    text = text.translate(sup).replace(" ", "").replace("−", "-")
    import re

    out: dict[Cell, int] = {}
    for m in re.finditer(r"(\d*)t\^?(-?\d+)q\^?(-?\d+)", text):
        c = int(m.group(1) or 1)
        key = (int(m.group(2)), int(m.group(3)))
        out[key] = out.get(key, 0) + c
    return out


def tables_total(tables: Iterable[DimTable]) -> int:
    return sum(t.total for t in tables)
