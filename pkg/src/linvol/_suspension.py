"""Cone angles of the suspended surface over a two-row datum.

The suspension polygon is bounded by the top and bottom broken lines of
the height vectors.  Twin edges are glued by translation (twins in
different rows) or by half-turn (twins in the same row); when the two
broken lines end at different heights the vertical gap edge is folded
onto itself, which creates one simple pole.  Cone angles are read off by
summing interior wedge angles over glued vertex classes.
"""

from __future__ import annotations

import math
from fractions import Fraction


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)


def _wedge(u, v):
    """Interior angle at a boundary vertex, interior on the left of travel."""
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    turn = math.atan2(cross, dot)
    w = math.pi - turn
    assert 1e-9 < w < 2 * math.pi - 1e-9, f"degenerate wedge {w}"
    return w


def cone_angle_orders(p, lam, tau):
    """Singularity orders (cone angle / pi - 2) of the suspension; zeros dropped.

    `lam`, `tau` are exact per-letter vectors indexed like p.alphabet; the
    data must be generic (distinct breakpoints, distinct end heights unless
    the datum is classical).
    """
    zeta = {a: (lam[p.letter_index[a]], tau[p.letter_index[a]]) for a in p.alphabet}

    def path(row):
        pts = [(Fraction(0), Fraction(0))]
        for s in row:
            x, y = pts[-1]
            dx, dy = zeta[s]
            pts.append((x + dx, y + dy))
        return pts

    tpts = path(p.top)
    bpts = path(p.bottom)
    assert tpts[-1][0] == bpts[-1][0], "rows are not balanced"
    merged_right = tpts[-1] == bpts[-1]
    if not merged_right and p.is_classical():
        raise AssertionError("classical datum must close up exactly")

    # vertex ids: top 0..l, bottom l+1..l+m (0 shared as origin)
    l, m = p.l, p.m
    T = list(range(l + 1))
    B = [0] + [l + i for i in range(1, m + 1)]
    nv = l + m + 1
    if merged_right:
        B[m] = T[l]
        nv = l + m

    uf = _UnionFind(nv)
    for a in p.alphabet:
        i, j = p.letter_slots[a]
        ri, rj = p.slot_row(i), p.slot_row(j)
        if ri != rj:
            if ri == 1:
                i, j = j, i
            bi = j - l  # bottom position, 0-based
            uf.union(T[i], B[bi])
            uf.union(T[i + 1], B[bi + 1])
        elif ri == 0:
            uf.union(T[i], T[j + 1])
            uf.union(T[i + 1], T[j])
        else:
            bi, bj = i - l, j - l
            uf.union(B[bi], B[bj + 1])
            uf.union(B[bi + 1], B[bj])
    if not merged_right:
        uf.union(T[l], B[m])

    # wedges along the boundary: bottom forward, gap edge up, top backward
    fl = {a: (float(v[0]), float(v[1])) for a, v in zeta.items()}
    wedges = [0.0] * nv
    vdir = (0.0, float(tpts[-1][1] - bpts[-1][1]))
    for pos in range(1, m):
        wedges[B[pos]] += _wedge(fl[p.bottom[pos - 1]], fl[p.bottom[pos]])
    if merged_right:
        u = fl[p.bottom[m - 1]]
        v = tuple(-c for c in fl[p.top[l - 1]])
        wedges[B[m]] += _wedge(u, v)
    else:
        wedges[B[m]] += _wedge(fl[p.bottom[m - 1]], vdir)
        wedges[T[l]] += _wedge(vdir, tuple(-c for c in fl[p.top[l - 1]]))
    for pos in range(l - 1, 0, -1):
        u = tuple(-c for c in fl[p.top[pos]])
        v = tuple(-c for c in fl[p.top[pos - 1]])
        wedges[T[pos]] += _wedge(u, v)
    wedges[0] += _wedge(tuple(-c for c in fl[p.top[0]]), fl[p.bottom[0]])

    totals = {}
    for v in range(nv):
        totals.setdefault(uf.find(v), 0.0)
        totals[uf.find(v)] += wedges[v]

    orders = []
    for theta in totals.values():
        n = round(theta / math.pi)
        assert abs(theta / math.pi - n) < 1e-7, f"cone angle {theta} not a multiple of pi"
        if n - 2 != 0:
            orders.append(n - 2)
    if not merged_right:
        orders.append(-1)  # fold point of the gap edge
    return sorted(orders)
