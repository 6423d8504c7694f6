"""Monte Carlo and exhaustive experiments over length data.

Sampling is Dirichlet-on-simplex followed by exact projection onto the
balance hyperplane (with rejection on lost positivity); rational mode
rounds to denominator 2**64 before the exact re-balance, so downstream
induction runs in pure rational arithmetic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rauzy
from ._feas import solve_strict
from .errors import EmptyPolytope, InvalidSubset, Tie, UndefinedMove
from .genperm import GeneralizedPermutation, has_length_data
from .involution import LinearInvolution


def sample_lengths(p: GeneralizedPermutation, seed=0, mode="rational", denominator_bits=64):
    """One length datum from the balance polytope, normalized to |X| = 1.

    Deterministic in `seed`.  Rational mode samples at denominator
    2**denominator_bits and re-balances exactly; rational data always tie
    eventually, at a depth growing with the denominator, so callers that
    need long exact inductions should raise `denominator_bits`.  Float mode
    lands within 1e-12 of the polytope.
    """
    if not has_length_data(p):
        raise EmptyPolytope(f"{p!r} admits no positive balanced lengths")
    bal = p.balance_form()
    n2 = sum(c * c for c in bal)
    if mode == "rational":
        den = 2**denominator_bits
        rng = random.Random(seed)
        for _ in range(1000):
            raw = [1 + rng.getrandbits(denominator_bits) for _ in range(p.d)]
            s = sum(raw)
            vec = [Fraction(x * den // s + 1, den) for x in raw]
            if n2:
                r = sum(c * x for c, x in zip(bal, vec))
                vec = [x - r * c / n2 for c, x in zip(bal, vec)]
            if any(x <= 0 for x in vec):
                continue
            tot = sum(vec[p.letter_index[s2]] for s2 in p.top)
            vec = [x / tot for x in vec]
            return {a: vec[p.letter_index[a]] for a in p.alphabet}
        raise EmptyPolytope("rejection sampling failed to land in the polytope")
    nrng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(1000):
        e = nrng.exponential(size=p.d)
        vec = e / e.sum()
        if n2:
            r = float(sum(c * x for c, x in zip(bal, vec)))
            vec = vec - r * np.array([float(c) for c in bal]) / float(n2)
        if (vec <= 0).any():
            continue
        tot = sum(vec[p.letter_index[s]] for s in p.top)
        vec = vec / tot
        return {a: float(vec[p.letter_index[a]]) for a in p.alphabet}
    raise EmptyPolytope("rejection sampling failed to land in the polytope")


@dataclass
class LengthSampler:
    perm: GeneralizedPermutation
    seed: int = 0
    mode: str = "rational"
    _count: int = 0

    def __iter__(self):
        return self

    def __next__(self):
        out = sample_lengths(self.perm, seed=self.seed * 1_000_003 + self._count, mode=self.mode)
        self._count += 1
        return out


def wilson_interval(successes, n, z=1.96):
    if n == 0:
        return (0.0, 1.0)
    phat = successes / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


# ---------------------------------------------------------------------------
# growth-rate condition, sampled
# ---------------------------------------------------------------------------


def _norm_pow_leq(z_norm, q_norm, eps: Fraction, c: Fraction):
    """Exact check  z_norm <= c * q_norm**eps  for integer norms, rational eps."""
    q = eps.denominator
    pnum = eps.numerator
    lhs = Fraction(z_norm) ** q
    rhs = (c**q) * Fraction(q_norm) ** pnum
    return lhs <= rhs


def montecarlo_condition_a(p, N, K, eps, c_eps, seed=0, anchored=False):
    """Fraction of sampled data whose block norms satisfy the growth bound.

    The stabilized form ||Z(k+1)|| <= c_eps ||Q(k+1)||**eps is checked
    exactly at every k < K (same condition class as the profile anchored at
    ||Q(k)||, with constants absorbed; the anchored form is degenerate at
    the first blocks, where ||Q|| is still the identity norm, and can be
    requested with anchored=True).  Samples whose induction ties before
    completing K blocks are excluded from the denominator and counted
    separately.
    """
    eps = Fraction(eps).limit_denominator(1000) if not isinstance(eps, Fraction) else eps
    c_eps = Fraction(c_eps) if not isinstance(c_eps, Fraction) else c_eps
    passed = failed = ties = 0
    for i in range(N):
        lengths = sample_lengths(p, seed=seed * 1_000_003 + i)
        T = LinearInvolution(p, lengths)
        path = rauzy.accelerate(T, K)
        if path.error is not None or path.nblocks() < K:
            ties += 1
            continue
        ok = all(
            _norm_pow_leq(
                rauzy.sum_norm(path.Z[k]),
                rauzy.sum_norm(path.Q[k if anchored else k + 1]),
                eps,
                c_eps,
            )
            for k in range(K)
        )
        if ok:
            passed += 1
        else:
            failed += 1
    n = passed + failed
    frac = passed / n if n else 0.0
    return {
        "passed": passed,
        "failed": failed,
        "ties_excluded": ties,
        "fraction": frac,
        "wilson": wilson_interval(passed, n),
        "N": N,
        "K": K,
        "eps": str(eps),
        "c_eps": str(c_eps),
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# exhaustive column-sum lemma check
# ---------------------------------------------------------------------------


def check_qext_lemma(diagram: rauzy.RauzyDiagram, subset, n_max):
    """Verify Q_ext(n) <= (2d-5) Q'(n) over every subset-named path of length <= n_max.

    Enumerates, from every vertex, all arrow paths whose winner names stay in
    `subset`; column sums are maintained incrementally.  Returns a verdict
    with the path count, the max observed ratio, and the first counterexample
    if one exists.
    """
    verts = diagram.vertices
    letters = sorted(verts[0].alphabet)
    d = len(letters)
    subset = frozenset(subset)
    if not 1 < len(subset) < d:
        raise InvalidSubset(f"need a proper subset with at least 2 names, got {sorted(subset)}")
    if 2 * d - 5 < 1:
        raise InvalidSubset(f"bound 2d-5 = {2 * d - 5} is vacuous for d = {d}")
    idx = {a: i for i, a in enumerate(letters)}
    in_sub = [a in subset for a in letters]
    bound = 2 * d - 5
    best = Fraction(0)
    count = 0
    counterexample = None

    def dfs(v, cols, depth):
        nonlocal best, count, counterexample
        if depth == n_max:
            return
        for a in diagram.out_arrows[v]:
            if a.winner not in subset:
                continue
            cols2 = list(cols)
            cols2[idx[a.loser]] += cols2[idx[a.winner]]
            qp = sum(c for c, f in zip(cols2, in_sub) if f)
            qe = sum(c for c, f in zip(cols2, in_sub) if not f)
            count += 1
            r = Fraction(qe, qp)
            if r > best:
                best = r
            if qe > bound * qp and counterexample is None:
                counterexample = {"from": v.to_json(), "depth": depth + 1}
            dfs(a.target, cols2, depth + 1)

    for v in verts:
        dfs(v, [1] * d, 0)

    # independent recount of enumerated paths
    def count_paths(v, n):
        if n == 0:
            return 0
        tot = 0
        for a in diagram.out_arrows[v]:
            if a.winner in subset:
                tot += 1 + count_paths(a.target, n - 1)
        return tot

    recount = sum(count_paths(v, n_max) for v in verts)
    return {
        "ok": counterexample is None,
        "paths_checked": count,
        "recount": recount,
        "max_ratio": best,
        "bound": bound,
        "counterexample": counterexample,
    }


# ---------------------------------------------------------------------------
# balance profiles
# ---------------------------------------------------------------------------


@dataclass
class BalanceRecord:
    n: int
    q_cols: list  # per-letter column sums Q_alpha(n, T), sorted-letter order
    names_seen: frozenset
    qprime: int
    qext: int
    flags: dict = field(default_factory=dict)  # (d1, c1) -> bool


def balance_profile(p, lengths, n_max, c1_grid=(2, 10), subset=None):
    """Column-sum balance flags along the actual induction path of one datum.

    With `subset` unset, flags are computed against the set of names seen so
    far.  Returns records for each step until n_max or a tie.
    """
    letters = sorted(p.alphabet)
    idx = {a: i for i, a in enumerate(letters)}
    T = LinearInvolution(p, lengths)
    cols = [1] * len(letters)
    seen = set()
    records = []
    cur = T
    truncated = None
    for n in range(1, n_max + 1):
        try:
            cur, arrow, _ = rauzy.step(cur)
        except (Tie, UndefinedMove) as e:
            truncated = e
            break
        cols[idx[arrow.loser]] += cols[idx[arrow.winner]]
        seen.add(arrow.winner)
        aprime = subset if subset is not None else frozenset(seen)
        qp = sum(cols[idx[a]] for a in aprime)
        qe = sum(cols) - qp
        rec = BalanceRecord(n, list(cols), frozenset(aprime), qp, qe)
        for c1 in c1_grid:
            for d1 in range(1, len(aprime) + 1):
                ok = sum(1 for a in aprime if cols[idx[a]] * c1 >= qp) >= d1
                rec.flags[(d1, c1)] = ok
        records.append(rec)
    return records, truncated


def eta_estimate(p, nsamples, n_max, c0=10, seed=0):
    """Fraction of samples reaching a fully balanced state before n_max.

    Fully balanced at step n: every name seen so far has column mass at
    least Q'(n)/c0.  A Wilson interval quantifies the positivity evidence.
    """
    hits = 0
    usable = 0
    for i in range(nsamples):
        lengths = sample_lengths(p, seed=seed * 99991 + i)
        records, truncated = balance_profile(p, lengths, n_max, c1_grid=(c0,))
        if not records:
            continue
        usable += 1
        for rec in records:
            if len(rec.names_seen) > 1 and rec.flags.get((len(rec.names_seen), c0)):
                hits += 1
                break
    return {
        "hits": hits,
        "usable": usable,
        "fraction": hits / usable if usable else 0.0,
        "wilson": wilson_interval(hits, usable),
    }


# ---------------------------------------------------------------------------
# volume fractions by simulation
# ---------------------------------------------------------------------------


def mc_volume_fraction(p, arrows, nsamples, seed=0):
    """Fraction of sampled length data whose induction starts with `arrows`."""
    hit = 0
    for i in range(nsamples):
        lengths = sample_lengths(p, seed=seed * 31337 + i)
        cur = LinearInvolution(p, lengths)
        ok = True
        for a in arrows:
            try:
                cur, got, _ = rauzy.step(cur)
            except (Tie, UndefinedMove):
                ok = False
                break
            if got.winner != a.winner or got.row != a.row:
                ok = False
                break
        hit += ok
    return hit / nsamples, wilson_interval(hit, nsamples)
