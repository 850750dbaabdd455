"""Rank windows for the two Floer theories with a Khovanov E_2 page.

* ``km``: instanton knot homology over Q.  The upper bound is the total rank
  of Khr over Q; the lower bound is the sum of absolute values of the
  Alexander coefficients (knots), or ``2n`` for the torus links ``T(2,2n)``.
* ``os``: Heegaard Floer homology of the branched double cover over GF(2).
  The upper bound is the total rank of Khr over GF(2); the lower bound is
  the determinant.

A spectral sequence only cancels generators in pairs, so every admissible
rank has the parity of the upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .classical import alexander_invariants
from .diagram import PlanarDiagram, canonical_key, mirror, torus
from .homology import delta_profile, jones_determinant, jones_polynomial, khovanov_homology

THEORIES = {"km": "Q", "os": "GF2"}


class FloerError(ValueError):
    pass


@dataclass(frozen=True)
class RankWindow:
    """Possible total ranks ``{lower, lower + 2, ..., upper}`` of the E_infinity page."""

    theory: str
    lower: int
    upper: int
    lower_provenance: str
    upper_provenance: str = "khovanov"
    notes: tuple = ()

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise FloerError(f"unknown theory {self.theory!r}")
        if self.lower > self.upper:
            raise FloerError(f"empty window: lower {self.lower} > upper {self.upper}")
        if (self.upper - self.lower) % 2:
            raise FloerError(f"bounds {self.lower}, {self.upper} have different parity")

    @property
    def admissible(self) -> list[int]:
        return list(range(self.lower, self.upper + 1, 2))

    @property
    def collapsed(self) -> bool:
        return self.lower == self.upper

    def raise_lower(self, value: int, provenance: str) -> "RankWindow":
        """Monotone refinement; the value is rounded up to the window parity."""
        if value <= self.lower:
            return self
        if (self.upper - value) % 2:
            value += 1
        if value > self.upper:
            raise FloerError(f"refined lower bound {value} exceeds upper bound {self.upper}")
        return replace(self, lower=value, lower_provenance=provenance)

    def to_dict(self) -> dict:
        return {
            "theory": self.theory,
            "lower": self.lower,
            "lower_provenance": self.lower_provenance,
            "upper": self.upper,
            "upper_provenance": self.upper_provenance,
            "admissible": self.admissible,
            "collapsed": self.collapsed,
            "notes": list(self.notes),
        }


def torus_2_2n_index(d: PlanarDiagram) -> Optional[int]:
    """``n`` if ``d`` is the standard diagram of ``T(2,2n)`` or of its mirror."""
    k = d.n_crossings
    if k < 2 or k % 2 or d.n_components() != 2:
        return None
    key = canonical_key(d)
    ref = torus(2, k)
    if key in (canonical_key(ref), canonical_key(mirror(ref))):
        return k // 2
    return None


def _theory(theory: str) -> str:
    t = theory.lower()
    if t not in THEORIES:
        raise FloerError(f"theory must be one of {sorted(THEORIES)}, not {theory!r}")
    return t


def floer_rank_window(d: PlanarDiagram, theory: str) -> RankWindow:
    """Window for the total rank of the Floer group of ``d``."""
    theory = _theory(theory)
    table = khovanov_homology(d, THEORIES[theory])
    upper = table.total
    notes = []
    thin = delta_profile(table).thin
    if theory == "km":
        if d.n_components() == 1:
            inv = alexander_invariants(d)
            lower, prov = inv.coeff_abs_sum, "alexander_sum"
        else:
            n = torus_2_2n_index(d)
            if n is None:
                raise FloerError("the instanton lower bound is only available for knots "
                                 "and the torus links T(2,2n)")
            lower, prov = 2 * n, "torus-link-lemma"
    else:
        lower = jones_determinant(jones_polynomial(table))
        prov = "determinant"
        if lower == 0:
            lower = upper % 2
            notes.append("determinant vanishes; lower bound falls back to parity")
    if thin:
        det = jones_determinant(jones_polynomial(table))
        notes.append(f"thin: Khovanov rank equals the determinant {det}, no differentials")
    if (upper - lower) % 2:
        lower += 1
        notes.append("lower bound rounded up to the parity of the Khovanov rank")
    return RankWindow(theory, lower, upper, prov, "khovanov", tuple(notes))


def triangle_rank_bound(windows: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Tighten ``(lower, upper)`` pairs at the corners of an exact triangle.

    Exactness gives ``rank X >= rank Y - rank Z`` and ``rank X <= rank Y +
    rank Z`` for every ordering; the rules are applied to a fixpoint.
    """
    if len(windows) != 3:
        raise FloerError("a triangle has three corners")
    cur = [list(w) for w in windows]
    for lo, hi in cur:
        if lo > hi or lo < 0:
            raise FloerError(f"inconsistent window ({lo}, {hi})")
    changed = True
    while changed:
        changed = False
        for x in range(3):
            y, z = (x + 1) % 3, (x + 2) % 3
            lo = max(cur[y][0] - cur[z][1], cur[z][0] - cur[y][1], 0)
            hi = cur[y][1] + cur[z][1]
            if lo > cur[x][0]:
                cur[x][0] = lo
                changed = True
            if hi < cur[x][1]:
                cur[x][1] = hi
                changed = True
            if cur[x][0] > cur[x][1]:
                raise FloerError(f"corner {x} has an empty window after refinement")
    return [tuple(w) for w in cur]


def refine_with_triangle(target: RankWindow, partners: Iterable[tuple[int, int]],
                         provenance: str = "triangle") -> RankWindow:
    """Improve ``target`` from the windows of the two other corners."""
    a, b = list(partners)
    out = triangle_rank_bound([(target.lower, target.upper), a, b])
    return target.raise_lower(out[0][0], provenance)
