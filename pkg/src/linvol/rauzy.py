"""Rauzy-Veech induction for linear involutions, accelerations, cocycles.

Matrices act on per-letter length vectors in *sorted alphabet* order:
lambda = B lambda' across one elementary step, with B = I + E[winner, loser].
The slot-tagged variant tracks both letter occurrences and yields the
signed transfer on functions anti-invariant under the deck involution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonComposable, Reducible, Tie, UndefinedMove
from .genperm import GeneralizedPermutation, irreducibility_test
from .involution import LinearInvolution
from .numbers import exact_sign, to_float

# ---------------------------------------------------------------------------
# integer matrices (tuples of tuples, exact)
# ---------------------------------------------------------------------------


def mat_id(d):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)) for i in range(n)
    )


def mat_vec(A, v):
    return [sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(A))]


def mat_transpose(A):
    return tuple(tuple(A[i][j] for i in range(len(A))) for j in range(len(A[0])))


def col_sums(A):
    return [sum(A[i][j] for i in range(len(A))) for j in range(len(A[0]))]


def sum_norm(A):
    return sum(abs(x) for row in A for x in row)


def max_norm(A):
    return max(abs(x) for row in A for x in row)


def mat_det(A):
    """Exact determinant (fraction-free elimination on small matrices)."""
    n = len(A)
    M = [list(map(Fraction, row)) for row in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        inv = 1 / M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] * inv
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return int(det) if det.denominator == 1 else det


# ---------------------------------------------------------------------------
# elementary moves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arrow:
    source: GeneralizedPermutation
    target: GeneralizedPermutation
    winner: str
    loser: str
    row: str  # 'top' | 'bottom': row of the winner

    def matrix(self):
        letters = sorted(self.source.alphabet)
        d = len(letters)
        w, b = letters.index(self.winner), letters.index(self.loser)
        M = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        M[w][b] = 1
        return tuple(map(tuple, M))


def move_permutation(p: GeneralizedPermutation, winner_row: str):
    """Combinatorial move: loser slot leaves its row end, reenters by the winner's twin.

    Returns the new datum, or None when the move is undefined (same letter at
    both row ends, or a row would empty out).
    """
    top, bottom = list(p.top), list(p.bottom)
    if winner_row == "top":
        w, loser = top[-1], bottom[-1]
    else:
        w, loser = bottom[-1], top[-1]
    if w == loser:
        return None
    wrow, orow = (top, bottom) if winner_row == "top" else (bottom, top)
    orow.pop()
    # twin of the winner: the other occurrence of w
    if wrow.count(w) == 2:
        t = wrow.index(w)  # leftmost occurrence is the twin of the end slot
        wrow.insert(t, loser)
        if not orow:
            return None
    else:
        t = orow.index(w)
        orow.insert(t + 1, loser)
    return GeneralizedPermutation(top, bottom)


def step(T: LinearInvolution):
    """One elementary induction step.

    Returns (T', arrow, B) with lambda = B lambda' in sorted-letter order.
    """
    p = T.perm
    wt, wb = p.top[-1], p.bottom[-1]
    if wt == wb:
        raise UndefinedMove(f"letter {wt!r} ends both rows")
    s = exact_sign(T.lengths[wt] - T.lengths[wb])
    if s == 0:
        raise Tie(f"equal rightmost lengths for {wt!r} and {wb!r}")
    winner_row = "top" if s > 0 else "bottom"
    winner, loser = (wt, wb) if s > 0 else (wb, wt)
    q = move_permutation(p, winner_row)
    if q is None:
        raise UndefinedMove(f"move with winner {winner!r} leaves no valid datum")
    new_lengths = dict(T.lengths.items())
    new_lengths[winner] = T.lengths[winner] - T.lengths[loser]
    arrow = Arrow(p, q, winner, loser, winner_row)
    return LinearInvolution(q, new_lengths), arrow, arrow.matrix()


# ---------------------------------------------------------------------------
# slot tags: occurrences tracked through moves (for the signed transfer)
# ---------------------------------------------------------------------------


def initial_tags(p: GeneralizedPermutation):
    seen = {}
    rows = [[], []]
    for i, a in enumerate(p.slots):
        k = seen.get(a, 0)
        seen[a] = k + 1
        rows[p.slot_row(i)].append((a, k))
    return rows


def move_tags(rows, p: GeneralizedPermutation, winner_row: str):
    """Update tagged rows through a move; returns (new_rows, minus_sign)."""
    top, bottom = [list(rows[0]), list(rows[1])]
    wrow, orow = (top, bottom) if winner_row == "top" else (bottom, top)
    w = wrow[-1][0]
    moved = orow.pop()
    twin = next(s for s in (wrow + orow) if s[0] == w and s != wrow[-1])
    sign = (1 if moved[1] == 0 else -1) * (1 if twin[1] == 0 else -1)
    if twin in wrow[:-1]:
        wrow.insert(wrow.index(twin), moved)
    else:
        orow.insert(orow.index(twin) + 1, moved)
    return [top, bottom], sign


def signed_matrix(letters, winner, loser, sign):
    d = len(letters)
    w, b = letters.index(winner), letters.index(loser)
    M = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    M[w][b] = sign
    return tuple(map(tuple, M))


# ---------------------------------------------------------------------------
# accelerations and cocycle paths
# ---------------------------------------------------------------------------


@dataclass
class CocyclePath:
    """A run of the induction, grouped into letter-coverage blocks.

    Block k is the longest stretch whose winners still omit a letter; the
    step that would complete the alphabet opens block k+1.  Z[k] is the
    exact transfer over block k+1 (0-indexed), Q[k] the running product with
    Q[0] = identity, so lambda^(0) = Q[k] lambda^(k) exactly.
    """

    seed: LinearInvolution
    letters: tuple
    arrows: list = field(default_factory=list)
    block_bounds: list = field(default_factory=list)
    Z: list = field(default_factory=list)
    Zm: list = field(default_factory=list)  # signed (anti-invariant) transfers
    Q: list = field(default_factory=list)
    Qm: list = field(default_factory=list)
    states: list = field(default_factory=list)
    winners_per_block: list = field(default_factory=list)
    error: object = None

    def nblocks(self):
        return len(self.Z)

    def Q_between(self, k, l):
        """Z(k+1)...Z(l) as an exact matrix."""
        if not 0 <= k <= l <= self.nblocks():
            raise NonComposable(f"levels ({k},{l}) out of range")
        M = mat_id(len(self.letters))
        for i in range(k, l):
            M = mat_mul(M, self.Z[i])
        return M

    def state(self, k):
        return self.states[k]

    def lam(self, k):
        st = self.states[k]
        return [st.lengths[a] for a in self.letters]

    def total(self, k):
        return self.states[k].total


def accelerate(T: LinearInvolution, k_max: int):
    """Letter-coverage acceleration: run k_max blocks (or stop at a tie)."""
    letters = tuple(sorted(T.perm.alphabet))
    d = len(letters)
    path = CocyclePath(seed=T, letters=letters)
    path.states.append(T)
    path.Q.append(mat_id(d))
    path.Qm.append(mat_id(d))
    tags = initial_tags(T.perm)
    cur = T
    blockZ, blockZm = mat_id(d), mat_id(d)
    winners = set()
    nsteps_in_block = 0
    while len(path.Z) < k_max:
        try:
            nxt, arrow, B = step(cur)
        except (Tie, UndefinedMove) as e:
            path.error = e
            break
        if winners | {arrow.winner} == set(letters):
            # this arrow would complete the alphabet: close the block first
            path.Z.append(blockZ)
            path.Zm.append(blockZm)
            path.Q.append(mat_mul(path.Q[-1], blockZ))
            path.Qm.append(mat_mul(path.Qm[-1], blockZm))
            path.states.append(cur)
            path.winners_per_block.append(frozenset(winners))
            path.block_bounds.append(len(path.arrows))
            blockZ, blockZm = mat_id(d), mat_id(d)
            winners = set()
            nsteps_in_block = 0
            if len(path.Z) >= k_max:
                break
        tags, sgn = move_tags(tags, cur.perm, arrow.row)
        blockZ = mat_mul(blockZ, B)
        blockZm = mat_mul(blockZm, signed_matrix(letters, arrow.winner, arrow.loser, sgn))
        winners.add(arrow.winner)
        path.arrows.append(arrow)
        nsteps_in_block += 1
        cur = nxt
    if path.error is not None and nsteps_in_block:
        # keep the partial block so the caller sees the full prefix
        path.Z.append(blockZ)
        path.Zm.append(blockZm)
        path.Q.append(mat_mul(path.Q[-1], blockZ))
        path.Qm.append(mat_mul(path.Qm[-1], blockZm))
        path.states.append(cur)
        path.winners_per_block.append(frozenset(winners))
        path.block_bounds.append(len(path.arrows))
    return path


def zorich_step(T: LinearInvolution):
    """Maximal run of steps won by the same row."""
    arrows = []
    Z = mat_id(T.perm.d)
    cur = T
    row = None
    while True:
        try:
            nxt, arrow, B = step(cur)
        except (Tie, UndefinedMove):
            if not arrows:
                raise
            break
        if row is None:
            row = arrow.row
        elif arrow.row != row:
            break
        arrows.append(arrow)
        Z = mat_mul(Z, B)
        cur = nxt
    return cur, arrows, Z


def zorich_blocks(T: LinearInvolution, nblocks: int):
    """Sizes and transfers of the first `nblocks` same-row runs."""
    out = []
    cur = T
    for _ in range(nblocks):
        cur, arrows, Z = zorich_step(cur)
        out.append((len(arrows), Z, [a.winner for a in arrows]))
    return cur, out


def mmy_accelerate(T: LinearInvolution, k_max: int):
    return accelerate(T, k_max)


def fixed_letter(path: CocyclePath, k: int):
    """The letter that never wins in block k+1; its length is unchanged."""
    omitted = set(path.letters) - path.winners_per_block[k]
    return sorted(omitted)[0]


# ---------------------------------------------------------------------------
# diagram
# ---------------------------------------------------------------------------


@dataclass
class RauzyDiagram:
    vertices: list
    arrows: list
    out_arrows: dict  # vertex -> list of Arrow

    def arrow_count(self):
        return len(self.arrows)


def move_is_realizable(p: GeneralizedPermutation, winner_row: str):
    """True iff some positive balanced length datum makes this row win."""
    from ._feas import solve_strict

    w = (p.top if winner_row == "top" else p.bottom)[-1]
    loser = (p.bottom if winner_row == "top" else p.top)[-1]
    if w == loser:
        return False
    d = p.d
    ineqs = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
    cmp_row = [Fraction(0)] * d
    cmp_row[p.letter_index[w]] = Fraction(1)
    cmp_row[p.letter_index[loser]] = Fraction(-1)
    ineqs.append(cmp_row)
    return solve_strict(ineqs, eqs=[p.balance_form()], nvars=d) is not None


def build_diagram(seed: GeneralizedPermutation, max_vertices=100000):
    """Closure of the seed under both moves (labelled, deduplicated by rows).

    An arrow is included only when some positive balanced length datum
    realizes it, so every vertex reached carries actual dynamics.
    """
    if not irreducibility_test(seed):
        raise Reducible(f"{seed!r} is reducible")
    seen = {seed}
    order = [seed]
    arrows = []
    out = {seed: []}
    frontier = [seed]
    while frontier:
        nxt = []
        for v in sorted(frontier, key=lambda q: (q.top, q.bottom)):
            for row in ("top", "bottom"):
                w = (v.top if row == "top" else v.bottom)[-1]
                loser = (v.bottom if row == "top" else v.top)[-1]
                q = move_permutation(v, row)
                if q is None or not move_is_realizable(v, row):
                    continue
                a = Arrow(v, q, w, loser, row)
                arrows.append(a)
                out[v].append(a)
                if q not in seen:
                    seen.add(q)
                    order.append(q)
                    out[q] = []
                    nxt.append(q)
                    if len(seen) > max_vertices:
                        raise RuntimeError("diagram exceeds vertex budget")
        frontier = nxt
    return RauzyDiagram(order, arrows, out)


# ---------------------------------------------------------------------------
# paths as arrow sequences
# ---------------------------------------------------------------------------


def path_product(arrows):
    """Exact product over a composable arrow path, with its column sums."""
    if not arrows:
        raise NonComposable("empty arrow list has no base alphabet; use mat_id")
    letters = sorted(arrows[0].source.alphabet)
    Q = mat_id(len(letters))
    prev = None
    for a in arrows:
        if prev is not None and a.source != prev:
            raise NonComposable("arrows do not chain")
        Q = mat_mul(Q, a.matrix())
        prev = a.target
    return Q, col_sums(Q)


def path_column_sums(winner_loser_seq, letters):
    """Column sums of the product, updated in O(d) per arrow."""
    d = len(letters)
    idx = {a: i for i, a in enumerate(letters)}
    cols = [1] * d
    out = [list(cols)]
    for w, b in winner_loser_seq:
        cols[idx[b]] += cols[idx[w]]
        out.append(list(cols))
    return out


def simplex_volume_fraction(arrows, seed=None):
    """Exact fraction of length data whose induction starts with the path.

    Closed form 1 / prod(column sums), valid for classical data where the
    parameter polytope is the full simplex; generalized data should use the
    Monte Carlo estimator in `measure`.
    """
    if not arrows:
        return Fraction(1)
    p0 = arrows[0].source if seed is None else seed
    if not p0.is_classical():
        raise ValueError("closed volume formula only covers classical data")
    Q, cols = path_product(arrows)
    out = Fraction(1)
    for c in cols:
        out /= c
    return out


def segment_decomposition(winners, subset=None):
    """Run-length structure of a winner sequence.

    Returns (one_segments, in_subset_count, cover_count): maximal constant
    runs, how many of them are named inside `subset`, and the minimal number
    of blocks using at most len(subset)-1 distinct names needed to cover the
    sequence greedily.
    """
    segs = []
    for w in winners:
        if segs and segs[-1][0] == w:
            segs[-1] = (w, segs[-1][1] + 1)
        else:
            segs.append((w, 1))
    if subset is None:
        return segs, len(segs), None
    subset = set(subset)
    n_in = sum(1 for w, _ in segs if w in subset)
    limit = max(1, len(subset) - 1)
    cover = 0
    current = set()
    for w, _ in segs:
        if len(current | {w}) > limit:
            cover += 1
            current = {w}
        else:
            current.add(w)
    if current:
        cover += 1
    return segs, n_in, cover


# ---------------------------------------------------------------------------
# first-return oracle
# ---------------------------------------------------------------------------


def induced_first_return(T: LinearInvolution, cut):
    """Branches of the first-return map to [0, |X|-cut) x {0,1}, by simulation.

    Exact, independent of the combinatorial move: every piece returns after
    one or two applications of the map.  Returns a sorted list of
    (level, lo, hi, sign, offset, out_level).
    """
    L = T.total
    Y = L - cut
    assert exact_sign(cut) > 0 and exact_sign(Y) > 0
    pieces = []
    for b in T.branches:
        lo = b.lo
        hi = b.hi if exact_sign(b.hi - Y) <= 0 else Y
        if exact_sign(hi - lo) > 0 and exact_sign(Y - lo) > 0:
            pieces.append((b.level, lo, hi))
    out = []
    stack = list(pieces)
    while stack:
        level, lo, hi = stack.pop()
        b = T.slot_of((lo + hi) / 2, level)
        assert exact_sign(lo - b.lo) >= 0 and exact_sign(b.hi - hi) >= 0
        img_lo, img_hi = (
            (b.offset + lo, b.offset + hi) if b.sign == 1 else (b.offset - hi, b.offset - lo)
        )
        if exact_sign(img_hi - Y) <= 0:
            out.append((level, lo, hi, b.sign, b.offset, b.out_level))
            continue
        if exact_sign(img_lo - Y) >= 0:
            b2 = T.slot_of((img_lo + img_hi) / 2, b.out_level)
            sign = b.sign * b2.sign
            offset = b2.offset + b2.sign * b.offset
            f_lo, f_hi = (
                (offset + sign * lo, offset + sign * hi)
                if sign == 1
                else (offset + sign * hi, offset + sign * lo)
            )
            assert exact_sign(f_hi - Y) <= 0, "orbit did not return after two steps"
            out.append((level, lo, hi, sign, offset, b2.out_level))
            continue
        # image straddles the section boundary: split at its exact preimage
        split = (Y - b.offset) * b.sign
        stack.append((level, lo, split))
        stack.append((level, split, hi))
    out.sort(key=lambda r: (r[0], to_float(r[1])))
    return out


def branches_of(T: LinearInvolution):
    """Branch tuples of T in the induced_first_return format."""
    return [(b.level, b.lo, b.hi, b.sign, b.offset, b.out_level) for b in T.branches]


def same_induced_map(branches_a, branches_b):
    """Exact equality of two piecewise-affine maps given by branch lists."""
    by_level = {0: [], 1: []}
    for r in branches_a:
        by_level[r[0]].append((r, "a"))
    for r in branches_b:
        by_level[r[0]].append((r, "b"))
    for level in (0, 1):
        rows = by_level[level]
        cuts = set()
        for (lvl, lo, hi, *_), _tag in rows:
            cuts.add(lo)
            cuts.add(hi)
        cuts = sorted(cuts, key=to_float)
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            got = {}
            for (lvl, lo, hi, sign, off, out), tag in rows:
                if exact_sign(mid - lo) > 0 and exact_sign(hi - mid) > 0:
                    got[tag] = (sign, off, out)
            if set(got) != {"a", "b"}:
                return False
            xa, xb = got["a"], got["b"]
            if xa[0] != xb[0] or xa[2] != xb[2] or exact_sign(xa[1] - xb[1]) != 0:
                return False
    return True
