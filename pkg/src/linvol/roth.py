"""Diophantine-type diagnostics for the renormalization cocycle.

Three finite-horizon conditions are profiled: block-norm growth against
the running product (growth rate), contraction of the transfer on the
kernel of the length pairing (spectral gap), and control of the quotient
by the estimated stable subspace (coherence).  Exact arithmetic is used
wherever the quantity is exact (length pairings, cocycle identities, the
translation-vector bound); exponent fits are float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rauzy
from .errors import DegenerateQuotient, Reducible, TooFewBlocks
from .genperm import double_cover, irreducibility_test
from .involution import LinearInvolution
from .numbers import exact_sign, log_big, to_float


def I_pairing(path: rauzy.CocyclePath, k, phi):
    """Exact length pairing sum(lambda^k_a phi_a) at level k."""
    lam = path.lam(k)
    return sum(l * f for l, f in zip(lam, phi))


def gamma_star_basis(lam):
    """d-1 exact vectors spanning the kernel of phi -> sum(lam_a phi_a)."""
    d = len(lam)
    basis = []
    for i in range(1, d):
        v = [Fraction(0)] * d if not lam else [0 * lam[0]] * d
        v[0] = lam[i]
        v[i] = -lam[0]
        basis.append(v)
    return basis


def special_matrix(path, k, l):
    """Exact matrix of the transfer from level k to level l on letter functions."""
    return rauzy.mat_transpose(path.Q_between(k, l))


def translation_bound_profile(path, l_max=None):
    """Exact sup-norm of the transferred translation vector at each level.

    The defining coboundary keeps every entry within the base length, so
    `ok` must hold on any correct run.
    """
    delta0 = path.seed.translation_vector()
    total = path.seed.total
    l_max = path.nblocks() if l_max is None else min(l_max, path.nblocks())
    sups = []
    ok = True
    for l in range(l_max + 1):
        v = rauzy.mat_vec(special_matrix(path, 0, l), delta0)
        sup = max((abs(x) for x in v), default=0)
        sups.append(to_float(sup))
        if exact_sign(sup - total) > 0:
            ok = False
    return {"ok": ok, "sup_by_level": sups, "total": to_float(total)}


# ---------------------------------------------------------------------------
# growth-rate condition
# ---------------------------------------------------------------------------


@dataclass
class GrowthProfile:
    eps: Fraction
    matrix_ratios: list  # ||Z(k+1)|| / ||Q(k)||^eps
    length_ratios: list  # (max lam^k / min lam^k) / ||Q(k)||^eps
    c_matrix: float  # minimal constant realizing the matrix form up to horizon
    c_length: float
    chain_ok: bool  # 2d max lam^k >= ||Z(k+1)|| min lam^(k+1), exactly, all k
    sandwich_ok: bool  # max lam^k >= |X| / ||Q(k)|| >= min lam^k, exactly, all k
    norms_Z: list
    norms_Q: list


def condition_a_profile(path: rauzy.CocyclePath, eps=Fraction(1, 2)):
    if path.nblocks() < 2:
        raise TooFewBlocks("need at least 2 blocks for a growth profile")
    eps = Fraction(eps)
    d = len(path.letters)
    total = path.seed.total
    mratios, lratios, nz, nq = [], [], [], []
    chain_ok = sandwich_ok = True
    for k in range(path.nblocks()):
        zn = rauzy.sum_norm(path.Z[k])
        qn = rauzy.sum_norm(path.Q[k])
        qpow = math.exp(eps * log_big(qn))
        lam = path.lam(k)
        mx, mn = max(lam), min(lam)
        mratios.append(zn / qpow)
        lratios.append(to_float(mx / mn) / qpow)
        nz.append(zn)
        nq.append(qn)
        # exact inequality chains
        if exact_sign(mx * qn - total) < 0 or exact_sign(total - mn * qn) < 0:
            sandwich_ok = False
        lam_next = path.lam(k + 1)
        if exact_sign(2 * d * mx - zn * min(lam_next)) < 0:
            chain_ok = False
    return GrowthProfile(
        eps, mratios, lratios, max(mratios), max(lratios), chain_ok, sandwich_ok, nz, nq
    )


def condition_a_verdict(path, eps, c_eps):
    """Exact matrix-form verdict ||Z(k+1)|| <= c_eps ||Q(k)||^eps for all blocks."""
    eps, c_eps = Fraction(eps), Fraction(c_eps)
    q = eps.denominator
    for k in range(path.nblocks()):
        zn = rauzy.sum_norm(path.Z[k])
        qn = rauzy.sum_norm(path.Q[k])
        if Fraction(zn) ** q > (c_eps**q) * Fraction(qn) ** eps.numerator:
            return False
    return True


def fixed_letter(path, k):
    """Letter whose length is untouched across block k+1 (it never wins there)."""
    a = rauzy.fixed_letter(path, k)
    i = path.letters.index(a)
    assert exact_sign(path.lam(k)[i] - path.lam(k + 1)[i]) == 0
    return a


# ---------------------------------------------------------------------------
# spectral gap
# ---------------------------------------------------------------------------


def _orthonormal_kernel(lam):
    """Float orthonormal basis (columns) of the kernel of the length pairing."""
    d = len(lam)
    B = np.array([[to_float(x) for x in v] for v in gamma_star_basis(lam)], dtype=float).T
    Q, _ = np.linalg.qr(B)
    return Q[:, : d - 1]


@dataclass
class SpectralGapReport:
    theta_hat: float
    per_k: list  # (k, restricted_norm, normQ, theta_k)
    verdict: bool
    theta_config: float
    C_config: float


def spectral_gap_estimate(path, theta=0.1, C=10.0, burn_in=1):
    """Sum-norm of the transfer restricted to the pairing kernel, per level.

    theta_k = 1 - log max(N_k, 1) / log ||Q(k)||; the estimate is the min
    over k >= burn_in, and the verdict checks N_k <= C ||Q(k)||^(1-theta).
    """
    if path.nblocks() < 5:
        raise TooFewBlocks(f"need >= 5 blocks, have {path.nblocks()}")
    B0 = _orthonormal_kernel(path.lam(0))
    rows = []
    verdict = True
    for k in range(1, path.nblocks() + 1):
        S = np.array(special_matrix(path, 0, k), dtype=float)
        Bk = _orthonormal_kernel(path.lam(k))
        M = Bk.T @ S @ B0
        nk = float(np.abs(M).sum())
        qn = rauzy.sum_norm(path.Q[k])
        lq = log_big(qn)
        theta_k = 1.0 - (math.log(max(nk, 1.0)) / lq if lq > 0 else 0.0)
        rows.append((k, nk, qn, theta_k))
        if nk > C * math.exp((1 - theta) * lq):
            verdict = False
    usable = [r[3] for r in rows[burn_in:]] or [r[3] for r in rows]
    return SpectralGapReport(min(usable), rows, verdict, theta, C)


# ---------------------------------------------------------------------------
# stable subspace
# ---------------------------------------------------------------------------


@dataclass
class StableSpaceEstimate:
    basis: np.ndarray  # columns: estimated stable directions, delta first
    sigmas: list  # fitted decay exponent per column
    consts: list  # fitted constants
    delta_bound: dict  # exact translation-vector certificate
    dim: int


def stable_space_estimate(path, K=None, sigma_min=0.05, start=0):
    """Estimated stable directions at level `start`, with decay certificates.

    Candidate directions come from the singular decomposition of the deepest
    available transfer; a direction is kept when the fitted exponent in
    ||S v|| <= C ||S||^(-sigma) ||v|| clears sigma_min.  The translation
    vector is always included; its certificate is the exact boundedness
    check.
    """
    K = path.nblocks() if K is None else min(K, path.nblocks())
    if K - start < 3:
        raise TooFewBlocks("need at least 3 blocks beyond the start level")
    d = len(path.letters)
    delta = np.array([to_float(x) for x in path.state(start).translation_vector()])
    delta = delta / np.linalg.norm(delta)
    Sfull = [np.array(special_matrix(path, start, l), dtype=float) for l in range(start, K + 1)]
    deep = Sfull[-1]
    scale = np.abs(deep).max()
    _, svals, vt = np.linalg.svd(deep / scale)
    cands = [delta] + [vt[i] for i in range(d - 1, 0, -1)]
    norms_S = np.array([abs(M).sum() for M in Sfull])
    kept, sigmas, consts = [], [], []
    for v in cands:
        if kept:
            proj = v - sum(np.dot(v, u) * u for u in kept)
            if np.linalg.norm(proj) < 1e-8:
                continue
            v = proj / np.linalg.norm(proj)
        ys = np.array([np.linalg.norm(M @ v, 1) for M in Sfull])
        xs = np.log(norms_S[1:])
        with np.errstate(divide="ignore"):
            logy = np.log(np.maximum(ys[1:], 1e-300))
        slope, intercept = np.polyfit(xs, logy, 1)
        sigma_hat = -slope
        if not kept:  # translation vector: always kept
            kept.append(v)
            sigmas.append(sigma_hat)
            consts.append(math.exp(intercept))
            continue
        if sigma_hat >= sigma_min:
            kept.append(v)
            sigmas.append(sigma_hat)
            consts.append(math.exp(intercept))
    basis = np.array(kept).T
    bound = translation_bound_profile(path, K) if start == 0 else None
    return StableSpaceEstimate(basis, sigmas, consts, bound, len(kept))


# ---------------------------------------------------------------------------
# coherence
# ---------------------------------------------------------------------------


@dataclass
class CoherenceReport:
    table: dict  # (k, l) -> (inv_norm, stable_norm, allowed)
    verdict: bool
    eps: float
    c_eps: float
    stable_dims: list


def coherence_profile(path, eps=0.5, c_eps=10.0, K=None, sigma_min=0.05):
    """Spectral norms of the inverse quotient transfer and of the stable
    restriction, for every level pair, against c_eps ||Q(l)||^eps."""
    K = path.nblocks() if K is None else min(K, path.nblocks())
    if K < 5:
        raise TooFewBlocks(f"need >= 5 blocks, have {K}")
    d = len(path.letters)
    margin = 3
    levels = list(range(0, K - margin + 1))
    stables = {}
    dims = []
    for k in levels:
        est = stable_space_estimate(path, K=K, sigma_min=sigma_min, start=k)
        stables[k] = est.basis
        dims.append(est.dim)
    if len(set(dims)) != 1:
        raise DegenerateQuotient(f"stable dimension varies across levels: {dims}")
    s = dims[0]
    if s >= d:
        raise DegenerateQuotient("stable estimate fills the whole space")
    comp = {}
    for k in levels:
        Qb, _ = np.linalg.qr(np.hstack([stables[k], np.eye(d)]))
        comp[k] = Qb[:, s:d]
    table = {}
    verdict = True
    for k in levels:
        for l in levels:
            if l < k:
                continue
            S = np.array(special_matrix(path, k, l), dtype=float)
            M = comp[l].T @ S @ comp[k]
            sv = np.linalg.svd(M, compute_uv=False)
            inv_norm = math.inf if sv[-1] < 1e-12 else 1.0 / sv[-1]
            stable_norm = float(np.linalg.norm(S @ stables[k], 2))
            allowed = c_eps * math.exp(eps * log_big(rauzy.sum_norm(path.Q[l])))
            table[(k, l)] = (inv_norm, stable_norm, allowed)
            if inv_norm > allowed or stable_norm > allowed:
                verdict = False
    return CoherenceReport(table, verdict, eps, c_eps, dims)


# ---------------------------------------------------------------------------
# Lyapunov exponents of the lifted cocycle
# ---------------------------------------------------------------------------


@dataclass
class LyapunovReport:
    family: str
    exponents: list  # normalized, descending (top plus-exponent = 1)
    raw_rates: list  # mean log growth per block
    std_errors: list  # bootstrap SEs of the normalized exponents
    blocks: int

    def top_gap_sigmas(self):
        if len(self.exponents) < 2:
            return math.inf
        se = math.hypot(self.std_errors[0], self.std_errors[1])
        return (self.exponents[0] - self.exponents[1]) / se if se else math.inf


def _float_induction_blocks(T: LinearInvolution, K, on_step, on_block):
    """Drive K letter-coverage blocks in float arithmetic, calling back per step."""
    p = T.perm
    letters = tuple(sorted(p.alphabet))
    lam = {a: to_float(T.lengths[a]) for a in p.alphabet}
    tags = rauzy.initial_tags(p)
    winners = set()
    blocks = 0
    guard = 0
    while blocks < K:
        guard += 1
        if guard > 400 * K:
            raise RuntimeError("induction stalled")
        wt, wb = p.top[-1], p.bottom[-1]
        if wt == wb or lam[wt] == lam[wb]:
            raise Reducible("float induction hit a tie; datum too symmetric")
        row = "top" if lam[wt] > lam[wb] else "bottom"
        winner, loser = (wt, wb) if lam[wt] > lam[wb] else (wb, wt)
        if winners | {winner} == set(letters):
            on_block()
            winners = set()
            blocks += 1
            if blocks >= K:
                break
        q = rauzy.move_permutation(p, row)
        if q is None:
            raise Reducible("undefined move in float induction")
        tags, sgn = rauzy.move_tags(tags, p, row)
        on_step(letters.index(winner), letters.index(loser), sgn)
        winners.add(winner)
        lam[winner] -= lam[loser]
        p = q
        s = sum(lam.values())
        if s < 1e-6:
            for a in lam:
                lam[a] /= s
    return blocks


def lyapunov_exponents(T: LinearInvolution, K, family="minus", seed=0, n_boot=200):
    """QR-deflation exponent estimates along the lifted cocycle.

    The lifted transfer preserves the deck-invariant and anti-invariant
    subspaces; 'plus' runs the plain letter cocycle, 'minus' the signed one,
    'full' concatenates both spectra.  Exponents are normalized so the top
    plus-exponent (length growth) is 1; standard errors come from a block
    bootstrap.
    """
    if K < 10:
        raise TooFewBlocks("need at least 10 blocks")
    if not irreducibility_test(T.perm):
        raise Reducible(f"{T.perm!r} is reducible")
    double_cover(T.perm)  # validates the lift exists
    d = T.perm.d
    Vp = np.eye(d)
    Vm = np.eye(d)
    logs_p, logs_m = [], []
    acc_p = np.zeros(d)
    acc_m = np.zeros(d)

    def on_step(w, b, sgn):
        # transpose of I + s E[w, b] acts by row_b += s row_w
        Vp[b] += Vp[w]
        Vm[b] += sgn * Vm[w]

    def on_block():
        nonlocal Vp, Vm
        Qp, Rp = np.linalg.qr(Vp)
        Qm, Rm = np.linalg.qr(Vm)
        logs_p.append(np.log(np.abs(np.diag(Rp))))
        logs_m.append(np.log(np.abs(np.diag(Rm))))
        Vp, Vm = Qp, Qm

    _float_induction_blocks(T, K, on_step, on_block)
    P = np.array(logs_p)
    M = np.array(logs_m)
    P.sort(axis=1)
    M.sort(axis=1)
    P = P[:, ::-1]
    M = M[:, ::-1]

    def summarize(A):
        return A.mean(axis=0)

    top_rate = summarize(P)[0]
    rng = np.random.Generator(np.random.PCG64(seed + 12345))

    def pick(A):
        if family == "plus":
            return A[0]
        if family == "minus":
            return A[1]
        return np.concatenate(A)

    rates = pick((summarize(P), summarize(M)))
    order = np.argsort(rates)[::-1]
    exps = rates[order] / top_rate
    boots = []
    nb = len(P)
    for _ in range(n_boot):
        idx = rng.integers(0, nb, nb)
        tp = P[idx].mean(axis=0)
        tm = M[idx].mean(axis=0)
        r = pick((tp, tm))[order] / tp[0]
        boots.append(r)
    ses = np.std(np.array(boots), axis=0, ddof=1)
    return LyapunovReport(family, list(exps), list(rates[order]), list(ses), len(P))


# ---------------------------------------------------------------------------
# bundled report
# ---------------------------------------------------------------------------


@dataclass
class RothConfig:
    eps: Fraction = Fraction(1, 2)
    c_eps: Fraction = Fraction(10)
    theta: float = 0.1
    C: float = 10.0
    K: int = 30
    sigma_min: float = 0.05


@dataclass
class RothReport:
    config: RothConfig
    blocks: int
    growth: GrowthProfile
    growth_verdict: bool
    eps_fit: float
    gap: SpectralGapReport
    coherence: CoherenceReport | None
    translation: dict
    verdicts: dict = field(default_factory=dict)

    def overall(self):
        return all(self.verdicts.values())


def build_report(T: LinearInvolution, config: RothConfig | None = None):
    config = config or RothConfig()
    path = rauzy.accelerate(T, config.K)
    if path.error is not None and path.nblocks() < 5:
        raise TooFewBlocks(f"induction tied after {path.nblocks()} blocks")
    growth = condition_a_profile(path, config.eps)
    xs = [log_big(q) for q in growth.norms_Q[1:]]
    ys = [math.log(z) for z in growth.norms_Z[1:]]
    eps_fit = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 and max(xs) > 0 else 0.0
    gap = spectral_gap_estimate(path, theta=config.theta, C=float(config.C))
    try:
        coh = coherence_profile(
            path, eps=float(config.eps), c_eps=float(config.c_eps), sigma_min=config.sigma_min
        )
        coh_ok = coh.verdict
    except DegenerateQuotient:
        coh, coh_ok = None, False
    trans = translation_bound_profile(path)
    ga = condition_a_verdict(path, config.eps, config.c_eps)
    report = RothReport(
        config=config,
        blocks=path.nblocks(),
        growth=growth,
        growth_verdict=ga,
        eps_fit=eps_fit,
        gap=gap,
        coherence=coh,
        translation=trans,
        verdicts={
            "growth": ga,
            "spectral_gap": gap.verdict,
            "coherence": coh_ok,
            "translation_bound": trans["ok"],
            "exact_chains": growth.chain_ok and growth.sandwich_ok,
        },
    )
    return report, path
