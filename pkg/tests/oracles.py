"""Independent reference computations used to freeze expected values.

Nothing here imports from ``khss``: the inputs are plain PD lists and the
code is deliberately naive (dense matrices over Fraction, union-find
tracing), so agreement with the library is a real cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def dense_rank(rows, p=None):
    """Rank by plain Gaussian elimination over Q, or over GF(p) when p is given."""
    m = [[(Fraction(x) if p is None else int(x) % p) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = (1 / m[rank][c]) if p is None else pow(m[rank][c], p - 2, p)
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] * inv
                m[r] = [(a - f * b) if p is None else (a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _find(parent, e):
    while parent[e] != e:
        parent[e] = parent[parent[e]]
        e = parent[e]
    return e


def circles(pd, v):
    """Circles of the smoothing ``v`` as frozensets of edges (0: a-b, c-d; 1: a-d, b-c)."""
    edges = {e for x in pd for e in x}
    parent = {e: e for e in edges}
    for (a, b, c, d), bit in zip(pd, v):
        pairs = ((a, b), (c, d)) if bit == 0 else ((a, d), (b, c))
        for x, y in pairs:
            parent[_find(parent, x)] = _find(parent, y)
    groups = {}
    for e in edges:
        groups.setdefault(_find(parent, e), set()).add(e)
    return [frozenset(g) for g in groups.values()]


def trace(pd):
    """Walk the strands.  Returns (number of components, crossing signs)."""
    slots = {}
    for k, x in enumerate(pd):
        for s, e in enumerate(x):
            slots.setdefault(e, []).append((k, s))
    seen = set()
    signs = [0] * len(pd)
    comps = 0
    starts = [(k, 0) for k in range(len(pd))] + [(k, s) for k in range(len(pd)) for s in (1, 3)]
    for start in starts:
        if start in seen:
            continue
        comps += 1
        k, s = start
        while (k, s) not in seen:
            seen.add((k, s))
            if s in (1, 3):
                signs[k] = 1 if s == 3 else -1
            out = (s + 2) % 4
            seen.add((k, out))
            e = pd[k][out]
            a, b = slots[e]
            k, s = b if a == (k, out) else a
    return comps, signs


def khr_dense(pd, basepoint, p=None, with_ranks=False):
    """Reduced Khovanov homology ``{(i, j): dim}`` from the full cube, densely.

    The basepoint circle carries ``x``.  Edge signs follow the count of
    1-bits before the changed crossing.
    """
    n = len(pd)
    _, signs = trace(pd)
    npos, nneg = signs.count(1), signs.count(-1)
    gens = {}
    index = {}
    for v in product((0, 1), repeat=n):
        cs = circles(pd, v)
        base = next(c for c in cs if basepoint in c)
        free = [c for c in cs if c is not base]
        for lab in product((1, 0), repeat=len(free)):       # 1 means label "1", 0 means "x"
            h = sum(v)
            ones = sum(lab)
            j = (ones - (len(free) - ones) - 1) + h + npos - 2 * nneg
            i = h - nneg
            key = (v, lab)
            index[key] = len(gens.setdefault((i, j), []))
            gens[(i, j)].append((v, dict(zip(free, lab)), base))

    def image(v, labels, base, k):
        w = list(v)
        w[k] = 1
        w = tuple(w)
        sgn = -1 if sum(v[:k]) % 2 else 1
        new = circles(pd, w)
        nbase = next(c for c in new if basepoint in c)
        nfree = [c for c in new if c is not nbase]
        old = [c for c in labels] + [base]
        lab_of = dict(labels)
        lab_of[base] = 0
        gone = [c for c in old if c not in new]
        born = [c for c in new if c not in old]
        keep = {c: lab_of[c] for c in old if c in new}
        outs = []
        if len(gone) == 2:                                     # merge
            a, b = (lab_of[c] for c in gone)
            if a == 1 and b == 1:
                outs.append((born[0], 1))
            elif a + b == 1:
                outs.append((born[0], 0))
            for c, lab in outs:
                keep2 = dict(keep)
                keep2[c] = lab
                yield w, keep2, nbase, nfree, sgn
        else:                                                   # split
            a = lab_of[gone[0]]
            c1, c2 = born
            pairs = [(1, 0), (0, 1)] if a == 1 else [(0, 0)]
            for l1, l2 in pairs:
                keep2 = dict(keep)
                keep2[c1], keep2[c2] = l1, l2
                yield w, keep2, nbase, nfree, sgn

    dims = {}
    ranks = {}
    for (i, j), src in gens.items():
        tgt = gens.get((i + 1, j), [])
        pos = {}
        for t_idx, (tv, tl, tb) in enumerate(tgt):
            pos[(tv, tuple(sorted((tuple(sorted(c)), l) for c, l in tl.items())))] = t_idx
        rows = [[0] * len(src) for _ in tgt]
        for s_idx, (v, labels, base) in enumerate(src):
            for k in range(n):
                if v[k]:
                    continue
                for w, lab2, nbase, nfree, sgn in image(v, labels, base, k):
                    if lab2.get(nbase, 0) != 0:
                        continue
                    lab2 = {c: l for c, l in lab2.items() if c != nbase}
                    t_idx = pos[(w, tuple(sorted((tuple(sorted(c)), l) for c, l in lab2.items())))]
                    rows[t_idx][s_idx] += sgn
        ranks[(i, j)] = dense_rank(rows, p) if rows and src else 0
    for (i, j), src in gens.items():
        h = len(src) - ranks[(i, j)] - ranks.get((i - 1, j), 0)
        if h:
            dims[(i, j)] = h
    return (dims, ranks) if with_ranks else dims


def torus_alexander_sympy(p, q):
    """Symmetrized (t^pq - 1)(t - 1)/((t^p - 1)(t^q - 1)) as (lowest exponent, coefficients)."""
    import sympy

    t = sympy.symbols("t")
    f = sympy.cancel((t ** (p * q) - 1) * (t - 1) / ((t ** p - 1) * (t ** q - 1)))
    poly = sympy.Poly(sympy.expand(f), t)
    deg = poly.degree()
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return -deg // 2, coeffs


def triangle_third_corner(a, b, limit=64):
    """Ranks the third corner of an exact triangle can take when the others are a and b.

    Exactness at each corner forces rank(X) = rank(in) + rank(out), so the
    three map ranks solve a 3x3 linear system; enumerate the third rank.
    """
    out = []
    for c in range(limit):
        two_rf, two_rg, two_rh = a + b - c, b + c - a, a + c - b
        if min(two_rf, two_rg, two_rh) >= 0 and two_rf % 2 == 0 and two_rg % 2 == 0:
            out.append(c)
    return out


def alexander_sympy(pd):
    """Alexander polynomial of a knot PD by a sympy determinant of the Fox matrix.

    Returns (lowest exponent, coefficients) after centering and fixing the
    sign so that the value at 1 is 1.
    """
    import sympy

    t = sympy.symbols("t")
    _, signs = trace(pd)
    edges = sorted({e for x in pd for e in x})
    parent = {e: e for e in edges}
    for a, b, c, d in pd:                    # over-strand edges belong to one arc
        parent[_find(parent, b)] = _find(parent, d)
    roots = sorted({_find(parent, e) for e in edges})
    arc = {e: roots.index(_find(parent, e)) for e in edges}
    n = len(pd)
    m = sympy.zeros(n, n)
    for r, ((a, b, c, d), s) in enumerate(zip(pd, signs)):
        over, inc, out = arc[b], arc[a], arc[c]
        x = t if s > 0 else 1 / t
        m[r, over] += 1 - x
        m[r, inc] += x
        m[r, out] -= 1
    det = sympy.factor(m[:-1, :-1].det()) if n > 1 else sympy.Integer(1)
    num, den = sympy.fraction(sympy.together(det))
    poly = sympy.Poly(sympy.expand(num), t)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if sum(coeffs) < 0:
        coeffs = [-c for c in coeffs]
    return -(len(coeffs) - 1) // 2, coeffs


def _admits(theory, delta_rule, s, t):
    di, dj = t[0] - s[0], t[1] - s[1]
    if theory == "km":
        return di >= 1 and dj >= 2 and (dj - di) % 4 == 3
    if di < 2:
        return False
    if delta_rule == "drop1":
        return dj == 2 * di - 2
    if delta_rule == "strict":
        return dj - 2 * di <= -2
    return True


def brute_patterns(cells, theory, delta_rule, marks, window, z4=None, forced=()):
    """Every multiset of arcs meeting the constraints, by exhaustive product.

    ``cells``: {(i, j): dim}; ``marks``: {(cell, kind): count};
    ``forced``: cells that must be the source of at least one arc.
    Returns a set of frozensets of ((source, target), multiplicity).
    """
    cl = sorted(cells)
    arcs = [(s, t) for s in cl for t in cl if s != t and _admits(theory, delta_rule, s, t)]
    total = sum(cells.values())
    out = set()

    def m(c, kind):
        return marks.get((c, kind), 0)

    bounds = [min(cells[s], cells[t]) for s, t in arcs]
    for mult in product(*(range(b + 1) for b in bounds)):
        used = sum(mult)
        if total - 2 * used not in window:
            continue
        o = {c: 0 for c in cl}
        i = {c: 0 for c in cl}
        for (s, t), k in zip(arcs, mult):
            o[s] += k
            i[t] += k
        ok = True
        for c in cl:
            n, surv = cells[c], m(c, "survivor")
            if o[c] > n - max(m(c, "never_source"), surv) or i[c] > n - max(m(c, "never_target"), surv):
                ok = False
            if o[c] + i[c] > n - surv:
                ok = False
        if not ok:
            continue
        if z4 is not None:
            left = [0, 0, 0, 0]
            for c in cl:
                left[(c[1] - c[0] - 1) % 4] += cells[c] - o[c] - i[c]
            if left != list(z4):
                continue
        if any(o[c] == 0 for c in forced):
            continue
        out.add(frozenset(((s, t), k) for (s, t), k in zip(arcs, mult) if k))
    return out
