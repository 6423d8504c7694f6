"""Dev calibration: run from /root/pkg. Not part of the package."""
import itertools
import random
from fractions import Fraction as F

from linvol.genperm import (GeneralizedPermutation, irreducibility_test,
                            suspension_witness, forced_breakpoint_collision, stratum)
from linvol.involution import LinearInvolution
from linvol import rauzy
from linvol.errors import Tie, UndefinedMove, EmptyRow, NotTwoToOne


def sample_lengths_inline(p, seed):
    rng = random.Random(seed)
    bal = p.balance_form()
    n2 = sum(c * c for c in bal)
    for _ in range(200):
        lam = [F(rng.randrange(1, 2**30), 2**30) for _ in range(p.d)]
        if n2:
            r = sum(c * x for c, x in zip(bal, lam))
            lam = [x - r * c / n2 for c, x in zip(bal, lam)]
        if any(x <= 0 for x in lam):
            continue
        tot = sum(lam[p.letter_index[s]] for s in p.top)
        lam = [x / tot for x in lam]
        return {a: lam[p.letter_index[a]] for a in p.alphabet}
    return None


def dyn_probe(p, trials=12, horizon=80, seed=1):
    ok = ran = 0
    for t in range(trials):
        lengths = sample_lengths_inline(p, seed * 1000 + t)
        if lengths is None:
            return False
        T = LinearInvolution(p, lengths)
        winners = set()
        try:
            cur = T
            for _ in range(horizon):
                cur, arrow, _ = rauzy.step(cur)
                winners.add(arrow.winner)
        except (Tie, UndefinedMove):
            continue
        ran += 1
        if winners == set(p.alphabet):
            ok += 1
    return ran > 0 and ok > trials // 2


def canonical(p):
    ren = {}
    out = []
    for s in p.slots:
        if s not in ren:
            ren[s] = chr(ord("a") + len(ren))
        out.append(ren[s])
    return (tuple(out[: p.l]), tuple(out[p.l:]))


def enumerate_perms(d):
    letters = [chr(ord("a") + i) for i in range(d)]
    pool = letters * 2
    seen = set()
    out = []
    for arrangement in set(itertools.permutations(pool)):
        for l in range(1, 2 * d):
            try:
                p = GeneralizedPermutation(arrangement[:l], arrangement[l:])
            except (EmptyRow, NotTwoToOne):
                continue
            c = canonical(p)
            if c in seen:
                continue
            seen.add(c)
            out.append(GeneralizedPermutation(*c))
    return out


print("== Part A: irreducibility calibration ==")
for d in (2, 3):
    perms = enumerate_perms(d)
    print(f"d={d}: {len(perms)} canonical data")
    disagree = []
    for p in perms:
        lp = irreducibility_test(p)
        dyn = dyn_probe(p)
        if lp != dyn:
            disagree.append((p, lp, dyn))
    print(f"  disagreements (lp vs dyn): {len(disagree)}")
    for p, lp, dyn in disagree[:12]:
        print(f"    {p}  lp={lp} dyn={dyn} collision={forced_breakpoint_collision(p)}")

print()
print("== Part B: translation vector transfer ==")


def w_vector(state, total0):
    """Expected tQ(0,k) delta^(0): translation_vector formula with the level-0 total."""
    p = state.perm
    out = []
    for a in sorted(p.alphabet):
        i, j = p.letter_slots[a]
        ri, rj = p.slot_row(i), p.slot_row(j)
        lam = state.lengths[a]
        if ri == rj:
            c = state.slot_start[i] + state.slot_start[j] + lam
            v = total0 - c
            out.append(v if ri == 0 else -v)
        else:
            if ri == 1:
                i, j = j, i
            out.append(state.slot_start[j] - state.slot_start[i])
    return out


def rand_perm(d, rng):
    letters = [chr(ord("a") + i) for i in range(d)]
    while True:
        pool = letters * 2
        rng.shuffle(pool)
        l = rng.randrange(1, 2 * d)
        try:
            p = GeneralizedPermutation(pool[:l], pool[l:])
        except (EmptyRow, NotTwoToOne):
            continue
        if irreducibility_test(p):
            return p


rng = random.Random(7)
nfail_id = nfail_bound = nok = 0
for trial in range(60):
    d = rng.choice([2, 3, 4, 5])
    p = rand_perm(d, rng)
    lengths = sample_lengths_inline(p, 5000 + trial)
    if lengths is None:
        continue
    T = LinearInvolution(p, lengths)
    path = rauzy.accelerate(T, 10)
    if path.error is not None:
        continue
    delta0 = T.translation_vector()
    ok_here = True
    for k in range(path.nblocks() + 1):
        tQ = rauzy.mat_transpose(path.Q[k])
        v = rauzy.mat_vec(tQ, delta0)
        w = w_vector(path.state(k), T.total)
        if any((a - b) != 0 for a, b in zip(v, w)):
            nfail_id += 1
            ok_here = False
            if nfail_id <= 2:
                print(f"  id-FAIL {p} k={k}")
                print("    tQ.delta =", [str(x) for x in v])
                print("    w_k      =", [str(x) for x in w])
            break
        if any(abs(x) > T.total for x in v):
            nfail_bound += 1
            ok_here = False
            print(f"  bound-FAIL {p} k={k}", [float(x) for x in v])
            break
    if ok_here:
        nok += 1
print(f"  transfer identity ok on {nok} paths; id-fails {nfail_id}, bound-fails {nfail_bound}")

print()
print("== Part C: strata ==")
for rows in [("ab", "ba"), ("abcd", "dcba"), ("aabb", "cc")]:
    p = GeneralizedPermutation(*rows)
    s = stratum(p)
    print(f"  {p} -> {s.label()} genus {s.genus} orientable={s.orientable}")

p = GeneralizedPermutation("aabb", "cc")
diag = rauzy.build_diagram(p)
labels = {stratum(v).label() for v in diag.vertices}
print(f"  (aabb/cc) class: {len(diag.vertices)} vertices, strata labels: {labels}")
