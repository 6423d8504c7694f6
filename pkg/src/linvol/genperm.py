"""Two-row interval data (generalized permutations).

A datum of type (l, m) assigns d letters to l top slots and m bottom
slots, each letter appearing exactly twice.  This module validates such
data, decides irreducibility (existence of suspension heights), builds
the orientation double cover, and identifies the singularity structure
of the suspended half-translation surface.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import _feas
from .errors import EmptyRow, NotTwoToOne, Reducible


class GeneralizedPermutation:
    """Immutable two-row letter arrangement with each letter appearing twice."""

    def __init__(self, top, bottom):
        top = tuple(str(x) for x in top)
        bottom = tuple(str(x) for x in bottom)
        if not top or not bottom:
            raise EmptyRow("both rows must be nonempty", top=list(top), bottom=list(bottom))
        counts = {}
        for s in itertools.chain(top, bottom):
            counts[s] = counts.get(s, 0) + 1
        bad = {s: c for s, c in counts.items() if c != 2}
        if bad:
            raise NotTwoToOne(f"letters with count != 2: {sorted(bad)}", counts=bad)
        self.top = top
        self.bottom = bottom
        self.l = len(top)
        self.m = len(bottom)
        self.slots = top + bottom  # slot index 0..2d-1
        self.d = len(self.slots) // 2
        seen = []
        for s in self.slots:
            if s not in seen:
                seen.append(s)
        self.alphabet = tuple(seen)
        self.letter_index = {a: i for i, a in enumerate(self.alphabet)}
        occ = {}
        for i, s in enumerate(self.slots):
            occ.setdefault(s, []).append(i)
        self.letter_slots = {a: tuple(v) for a, v in occ.items()}
        twin = [None] * (2 * self.d)
        for i, j in self.letter_slots.values():
            twin[i], twin[j] = j, i
        self.twin = tuple(twin)

    def slot_row(self, i):
        return 0 if i < self.l else 1

    def same_row_letter(self, a):
        i, j = self.letter_slots[a]
        return self.slot_row(i) == self.slot_row(j)

    def is_classical(self):
        return all(not self.same_row_letter(a) for a in self.alphabet)

    def balance_form(self):
        """Coefficients of sum(top lengths) - sum(bottom lengths), per letter."""
        coefs = [0] * self.d
        for i, s in enumerate(self.slots):
            coefs[self.letter_index[s]] += 1 if i < self.l else -1
        return [Fraction(c) for c in coefs]

    def row_type(self):
        return (self.l, self.m)

    def __eq__(self, other):
        return (
            isinstance(other, GeneralizedPermutation)
            and self.top == other.top
            and self.bottom == other.bottom
        )

    def __hash__(self):
        return hash((self.top, self.bottom))

    def __repr__(self):
        return f"GeneralizedPermutation({' '.join(self.top)} / {' '.join(self.bottom)})"

    def to_json(self):
        return {"top": list(self.top), "bottom": list(self.bottom)}

    @classmethod
    def from_json(cls, data):
        return cls(data["top"], data["bottom"])


def validate(slots, l, m):
    """Build a permutation from a flat slot sequence split as (l, m)."""
    slots = list(slots)
    if l + m != len(slots):
        raise NotTwoToOne(f"l+m = {l + m} does not match {len(slots)} slots")
    if l <= 0 or m <= 0:
        raise EmptyRow(f"rows must be nonempty, got type ({l}, {m})")
    return GeneralizedPermutation(slots[:l], slots[l:])


# ---------------------------------------------------------------------------
# irreducibility
# ---------------------------------------------------------------------------


def suspension_system(p: GeneralizedPermutation, end_conditions=True):
    """Strict inequalities (per-letter height coefficients) defining suspension data.

    Heights tau are one value per letter.  Interior partial sums along the
    top row must stay positive, along the bottom row negative.  When the
    rightmost letter of a row has both slots in that row, the condition
    extends to the full row sum.
    """
    d = p.d
    ineqs = []

    def partial(row, upto):
        v = [Fraction(0)] * d
        for s in row[:upto]:
            v[p.letter_index[s]] += 1
        return v

    top_upper = p.l - 1
    bot_upper = p.m - 1
    if end_conditions:
        if p.same_row_letter(p.top[-1]):
            top_upper = p.l
        if p.same_row_letter(p.bottom[-1]):
            bot_upper = p.m
    for i in range(1, top_upper + 1):
        ineqs.append(partial(p.top, i))
    for i in range(1, bot_upper + 1):
        ineqs.append([-c for c in partial(p.bottom, i)])
    return ineqs


def suspension_witness(p: GeneralizedPermutation, end_conditions=True):
    """Exact per-letter heights satisfying the suspension constraints, or None."""
    return _feas.solve_strict(suspension_system(p, end_conditions), nvars=p.d)


def forced_breakpoint_collision(p: GeneralizedPermutation):
    """True if some top and bottom breakpoint coincide for every balanced length datum.

    Such a coincidence pins a vertical connection in every suspension, so
    the datum can never be a cross-section with minimal dynamics.
    """
    bal = p.balance_form()
    d = p.d

    def prefix_form(row, upto):
        v = [Fraction(0)] * d
        for s in row[:upto]:
            v[p.letter_index[s]] += 1
        return v

    bal_zero = all(c == 0 for c in bal)
    for i in range(1, p.l):
        fi = prefix_form(p.top, i)
        for j in range(1, p.m):
            fj = prefix_form(p.bottom, j)
            diff = [a - b for a, b in zip(fi, fj)]
            if all(c == 0 for c in diff):
                return True
            if not bal_zero and _feas.forms_parallel(diff, bal):
                return True
    return False


def has_length_data(p: GeneralizedPermutation):
    """True iff positive balanced lengths exist."""
    d = p.d
    ineqs = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
    return _feas.solve_strict(ineqs, eqs=[p.balance_form()], nvars=d) is not None


def irreducibility_test(p: GeneralizedPermutation):
    """True iff the datum admits lengths and suspension heights, with no
    forced breakpoint collision that would pin a vertical connection."""
    if not has_length_data(p):
        return False
    if forced_breakpoint_collision(p):
        return False
    return suspension_witness(p) is not None


def dynamical_irreducibility_probe(p, trials=20, horizon=16, seed=0):
    """Semi-decidable probe: sampled lengths must keep the induction alive.

    Returns True when, for a majority of sampled length data, the induction
    reaches `horizon` elementary steps with every letter winning at least
    once along the way.  Rational samples always tie eventually, so the
    horizon must stay well below the expected continued-fraction depth of
    the sampling denominator.  Intended for tests as an independent check
    of `irreducibility_test`.
    """
    from . import measure, rauzy
    from .errors import EmptyPolytope, Tie, UndefinedMove
    from .involution import LinearInvolution

    ok = 0
    ran = 0
    for t in range(trials):
        try:
            lengths = measure.sample_lengths(p, seed=seed * 7919 + t, mode="rational")
        except EmptyPolytope:
            return False
        T = LinearInvolution(p, lengths)
        winners = set()
        cur = T
        try:
            for _ in range(horizon):
                cur, arrow, _ = rauzy.step(cur)
                winners.add(arrow.winner)
        except (Tie, UndefinedMove):
            continue
        ran += 1
        if winners == set(p.alphabet):
            ok += 1
    return ran > 0 and ok > trials // 2


# ---------------------------------------------------------------------------
# double cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleCoverData:
    base: GeneralizedPermutation
    top: tuple  # lifted symbols (letter, occurrence), once per row each
    bottom: tuple
    deck: dict  # fixed-point-free involution on lifted symbols
    sign_map: dict  # letter -> 'same' | 'cross'

    def minus_dimension(self):
        return len(self.deck) // 2

    def plus_dimension(self):
        return len(self.deck) // 2


def double_cover(p: GeneralizedPermutation):
    """Orientation double cover as a classical permutation on 2d lifted symbols.

    The two levels of the involution, with the second level reversed, tile a
    single doubled interval on which the dynamics act by translations; the
    resulting exchange of 2d intervals is the cover, and the twin pairing is
    the deck involution.
    """
    if not irreducibility_test(p):
        raise Reducible(f"{p!r} is reducible")
    occ_count = {}
    sym = []
    for s in p.slots:
        k = occ_count.get(s, 0)
        occ_count[s] = k + 1
        sym.append((s, k))
    twin_sym = {sym[i]: sym[p.twin[i]] for i in range(2 * p.d)}
    top_row = [sym[i] for i in range(p.l)]
    top_row += [sym[i] for i in range(2 * p.d - 1, p.l - 1, -1)]
    bot_row = [twin_sym[sym[i]] for i in range(p.l, 2 * p.d)]
    bot_row += [twin_sym[sym[i]] for i in range(p.l - 1, -1, -1)]
    deck = {(a, k): (a, 1 - k) for (a, k) in sym}
    signs = {a: ("same" if p.same_row_letter(a) else "cross") for a in p.alphabet}
    return DoubleCoverData(p, tuple(top_row), tuple(bot_row), deck, signs)


def project_cover(cover: DoubleCoverData):
    """Quotient the lifted rows by the deck map; recovers the base datum."""
    top = [a for a, _ in cover.top[: cover.base.l]]
    rev = [a for a, _ in cover.top[cover.base.l:]]
    return GeneralizedPermutation(top, list(reversed(rev)))


# ---------------------------------------------------------------------------
# strata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stratum:
    orders: tuple  # singularity orders, each >= -1 and != 0
    genus: int
    orientable: bool = False

    def __post_init__(self):
        if sum(self.orders) != 4 * self.genus - 4:
            raise ValueError(f"orders {self.orders} inconsistent with genus {self.genus}")

    def label(self):
        inner = ",".join(str(k) for k in self.orders) if self.orders else ""
        return f"Q({inner})"


def is_excluded_stratum(s: Stratum):
    """Strata outside the scope of the boundedness result: minimal or all-even."""
    if len(s.orders) == 1 and s.orders[0] == 4 * s.genus - 4:
        return True
    if s.orders and all(k % 2 == 0 for k in s.orders):
        return True
    return False


def stratum(p: GeneralizedPermutation):
    """Singularity orders of the suspended surface, from cone angles."""
    from ._suspension import cone_angle_orders

    if not irreducibility_test(p):
        raise Reducible(f"{p!r} is reducible")
    lam = _generic_lengths(p)
    tau = _generic_heights(p)
    orders = cone_angle_orders(p, lam, tau)
    total = sum(orders)
    if total % 4 != 0:
        raise ValueError(f"order sum {total} is not 0 mod 4: {orders}")
    g = (total + 4) // 4
    return Stratum(tuple(sorted(orders)), g, orientable=p.is_classical())


def _generic_lengths(p: GeneralizedPermutation):
    """Positive balanced lengths with all distinct breakpoints (exact)."""
    d = p.d
    ineqs = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
    rng = random.Random(20240 + 2 * d)
    for attempt in range(64):
        w = _feas.solve_strict(ineqs, eqs=[p.balance_form()], nvars=d)
        if w is None:
            raise Reducible("no positive balanced lengths exist")
        lam = [x + Fraction(rng.randrange(1, 1000), 10 ** (6 + k)) for k, x in enumerate(w)]
        # re-balance exactly by least-squares shift along the balance form
        bal = p.balance_form()
        n2 = sum(c * c for c in bal)
        if n2 != 0:
            r = sum(c * x for c, x in zip(bal, lam))
            lam = [x - r * c / n2 for c, x in zip(bal, lam)]
        if any(x <= 0 for x in lam):
            continue
        if _distinct_breakpoints(p, lam):
            return lam
    raise RuntimeError("could not find generic lengths")


def _distinct_breakpoints(p, lam):
    def partials(row):
        acc = Fraction(0)
        out = []
        for s in row[:-1]:
            acc += lam[p.letter_index[s]]
            out.append(acc)
        return out

    pts = partials(p.top) + partials(p.bottom)
    return len(set(pts)) == len(pts)


def _generic_heights(p: GeneralizedPermutation):
    w = suspension_witness(p)
    if w is None:
        raise Reducible("no suspension heights exist")
    system = suspension_system(p)
    rng = random.Random(777 + p.d)
    for attempt in range(64):
        tau = [x + Fraction(rng.randrange(-999, 1000), 10 ** (7 + k)) for k, x in enumerate(w)]
        if all(sum(c * t for c, t in zip(row, tau)) > 0 for row in system):
            ht = sum(tau[p.letter_index[s]] for s in p.top)
            hb = sum(tau[p.letter_index[s]] for s in p.bottom)
            if p.is_classical() or ht != hb:
                return tau
    raise RuntimeError("could not find generic heights")
