"""The two-level dynamical system built from a two-row datum and lengths.

Points live on X x {0,1} with X = [0, |X|).  The involution `hat` maps
each slot interval onto its twin (reversed when the twin shares the row,
translated otherwise) and the full map composes with the level flip
f(x, e) = (x, 1-e).  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BalanceViolated, NonPositiveLength, SingularPoint
from .numbers import exact_sign, format_exact, parse_exact, to_float


class LengthData:
    """Per-letter exact positive lengths."""

    def __init__(self, values):
        self.values = dict(values)

    def __getitem__(self, a):
        return self.values[a]

    def items(self):
        return self.values.items()

    @classmethod
    def from_json(cls, data):
        return cls({k: parse_exact(v) if isinstance(v, str) else Fraction(v) for k, v in data.items()})

    def to_json(self):
        return {k: format_exact(v) for k, v in self.values.items()}


@dataclass(frozen=True)
class Branch:
    level: int
    lo: object
    hi: object
    sign: int  # derivative of the full map on this slot
    offset: object
    out_level: int
    letter: str
    slot: int


class LinearInvolution:
    """Exact piecewise map T = f o hat on X x {0,1}."""

    def __init__(self, perm, lengths):
        if isinstance(lengths, dict):
            lengths = LengthData(lengths)
        self.perm = perm
        self.lengths = lengths
        lam = {}
        for a in perm.alphabet:
            v = lengths[a]
            if exact_sign(v - 0) <= 0:
                raise NonPositiveLength(f"length of {a!r} must be positive")
            lam[a] = v
        top_sum = sum(lam[s] for s in perm.top)
        bot_sum = sum(lam[s] for s in perm.bottom)
        if exact_sign(top_sum - bot_sum) != 0:
            raise BalanceViolated(
                "row sums differ", top=format_exact(top_sum), bottom=format_exact(bot_sum)
            )
        self.total = top_sum
        starts = [None] * (2 * perm.d)
        acc = 0
        for i in range(perm.l):
            starts[i] = acc
            acc = acc + lam[perm.top[i]]
        acc = 0
        for i in range(perm.l, 2 * perm.d):
            starts[i] = acc
            acc = acc + lam[perm.slots[i]]
        self.slot_start = starts
        self.branches = []
        for i, letter in enumerate(perm.slots):
            j = perm.twin[i]
            lvl = perm.slot_row(i)
            tlvl = perm.slot_row(j)
            if lvl == tlvl:
                # reversal within the row, then the level flip
                sign, offset, out = -1, starts[i] + starts[j] + lam[letter], 1 - lvl
            else:
                sign, offset, out = 1, starts[j] - starts[i], lvl
            self.branches.append(
                Branch(lvl, starts[i], starts[i] + lam[letter], sign, offset, out, letter, i)
            )
        self._level_slots = (
            [b for b in self.branches if b.level == 0],
            [b for b in self.branches if b.level == 1],
        )
        self._float_edges = (
            [to_float(b.lo) for b in self._level_slots[0]],
            [to_float(b.lo) for b in self._level_slots[1]],
        )

    # -- point location -----------------------------------------------------

    def slot_of(self, x, level):
        """Branch containing x on the given level; SingularPoint at breakpoints."""
        row = self._level_slots[level]
        edges = self._float_edges[level]
        fx = to_float(x)
        lo, hi = 0, len(row) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if edges[mid] <= fx + 1e-12:
                lo = mid
            else:
                hi = mid - 1
        for k in (lo, lo - 1, lo + 1):
            if 0 <= k < len(row):
                b = row[k]
                sl = exact_sign(x - b.lo)
                sh = exact_sign(x - b.hi)
                if sl > 0 and sh < 0:
                    return b
                if sl == 0 and k > 0:
                    raise SingularPoint(f"breakpoint at level {level}", x=format_exact(x))
        if exact_sign(x - 0) == 0 or exact_sign(x - row[-1].hi) == 0:
            raise SingularPoint("endpoint of the base interval", x=format_exact(x))
        if exact_sign(x - 0) < 0 or exact_sign(x - row[-1].hi) > 0:
            raise SingularPoint("outside the base interval", x=format_exact(x))
        for b in row:  # exact fallback
            if exact_sign(x - b.lo) > 0 and exact_sign(x - b.hi) < 0:
                return b
        raise SingularPoint("breakpoint", x=format_exact(x))

    def apply_hat(self, point):
        x, level = point
        b = self.slot_of(x, level)
        # hat alone: reversal stays on the level, translation flips it
        hat_level = level if b.sign == -1 else 1 - level
        return (b.offset + b.sign * x, hat_level)

    def apply(self, point):
        """Full map: level flip after the involution."""
        x, level = point
        b = self.slot_of(x, level)
        return (b.offset + b.sign * x, b.out_level)

    def orbit(self, point, n):
        """First n images under the full map; truncates at singular points.

        Returns (points, truncated_at) with truncated_at = None for a clean run.
        """
        out = []
        cur = point
        for k in range(n):
            try:
                cur = self.apply(cur)
            except SingularPoint:
                return out, k
            out.append(cur)
        return out, None

    # -- singular data --------------------------------------------------------

    def singular_points(self):
        """Interior breakpoints on both levels."""
        pts = []
        for level in (0, 1):
            for b in self._level_slots[level][1:]:
                pts.append((b.lo, level))
        return pts

    def midpoint(self, slot):
        b = self.branches[slot]
        return ((b.lo + b.hi) / 2, b.level)

    def section_midpoints(self):
        return [self.midpoint(i) for i in range(2 * self.perm.d)]

    def translation_vector(self):
        """Per-letter constants of the displacement cocycle, sorted-letter order.

        Computed as the coboundary of Psi(x, e) = (-1)^e (|X|/2 - x), which is
        constant on each slot and takes equal values on twin slots; its level
        sums therefore stay bounded by |X| under the renormalization transfer.
        """
        out = []
        for a in sorted(self.perm.alphabet):
            i, j = self.perm.letter_slots[a]
            ri, rj = self.perm.slot_row(i), self.perm.slot_row(j)
            lam = self.lengths[a]
            if ri == rj:
                c = self.slot_start[i] + self.slot_start[j] + lam
                v = self.total - c
                out.append(v if ri == 0 else -v)
            else:
                if ri == 1:
                    i, j = j, i
                out.append(self.slot_start[j] - self.slot_start[i])
        return out

    def displacement_value(self, point):
        """Value at `point` of the function whose per-letter data is translation_vector()."""
        x, level = point
        b = self.slot_of(x, level)
        y, out_level = b.offset + b.sign * x, b.out_level
        psi = lambda t, e: (1 if e == 0 else -1) * (self.total / 2 - t)
        return psi(x, level) - psi(y, out_level)


def build(perm, lengths):
    return LinearInvolution(perm, lengths)


def apply(T, point):
    return T.apply(point)


def orbit(T, point, n):
    return T.orbit(point, n)


@dataclass
class SingularOrbits:
    D0: list
    D1: list
    depth: int


def singular_orbits(T, depth):
    """Backward hat-orbit of the singular set and forward hat-orbit of its flip.

    The involution is its own inverse, so both sets stabilize after one
    application; the iteration below follows the defining formulas verbatim.
    """
    sing = T.singular_points()
    d0 = set(sing)
    frontier = list(sing)
    for _ in range(depth):
        nxt = []
        for pt in frontier:
            try:
                q = T.apply_hat(pt)
            except SingularPoint:
                continue
            if q not in d0:
                d0.add(q)
                nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    d1 = set()
    frontier = [(x, 1 - lvl) for x, lvl in sing]
    d1.update(frontier)
    for _ in range(depth):
        nxt = []
        for pt in frontier:
            try:
                q = T.apply_hat(pt)
            except SingularPoint:
                continue
            if q not in d1:
                d1.add(q)
                nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    key = lambda p: (to_float(p[0]), p[1])
    return SingularOrbits(sorted(d0, key=key), sorted(d1, key=key), depth)


@dataclass
class KeaneResult:
    passed: bool
    fail_step: int | None
    fail_letters: tuple | None
    orbits: SingularOrbits


def keane_check(T, depth):
    """Run the exact induction for `depth` steps; a tie is a Keane failure."""
    from . import rauzy
    from .errors import Tie, UndefinedMove

    cur = T
    fail_step = None
    fail_letters = None
    for k in range(depth):
        try:
            cur, arrow, _ = rauzy.step(cur)
        except (Tie, UndefinedMove) as e:
            fail_step = k + 1
            fail_letters = (cur.perm.top[-1], cur.perm.bottom[-1])
            break
    return KeaneResult(fail_step is None, fail_step, fail_letters, singular_orbits(T, depth))


def point_to_json(point):
    x, level = point
    return {"x": format_exact(x), "level": level}


def point_from_json(data):
    return (parse_exact(data["x"]), int(data["level"]))
