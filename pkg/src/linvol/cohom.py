"""Observables with bounded-variation derivative and the coboundary solver.

A function is given per letter on one occurrence; the value on the twin
slot is obtained through the involution's identification (reversed for
same-row twins) times a per-letter sign, +1 by default, so that piecewise
constant data transfer exactly through the transposed cocycle matrices.

The solver picks the piecewise-constant correction whose renormalized
sums stay smallest over the horizon, then defines the transfer function
on a long base orbit by telescoping; the telescoping residual on that
orbit is exactly zero by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import rauzy, roth
from .errors import (DiagnosticsFailed, NotConverged, OrbitHitsSingularity,
                     SingularPoint, UnsupportedRepresentation)
from .involution import LinearInvolution
from .numbers import exact_sign, to_float

MAX_DEGREE = 5


@dataclass(frozen=True)
class Piece:
    """Function data on [0, lam]: piecewise-linear nodes or polynomial coefficients."""

    kind: str  # 'pl' | 'poly'
    breaks: tuple = ()
    vals: tuple = ()
    coeffs: tuple = ()

    def __call__(self, t):
        if self.kind == "poly":
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * t + c
            return acc
        for i in range(len(self.breaks) - 1):
            if exact_sign(t - self.breaks[i]) >= 0 and exact_sign(self.breaks[i + 1] - t) >= 0:
                t0, t1 = self.breaks[i], self.breaks[i + 1]
                v0, v1 = self.vals[i], self.vals[i + 1]
                if exact_sign(t1 - t0) == 0:
                    return v0
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        raise ValueError("argument outside the piece domain")


def _pl_piece(breaks, vals):
    assert len(breaks) == len(vals) >= 2
    return Piece("pl", tuple(breaks), tuple(vals))


def _poly_piece(coeffs):
    coeffs = tuple(Fraction(c) for c in coeffs)
    if len(coeffs) > MAX_DEGREE + 1:
        raise UnsupportedRepresentation(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
    return Piece("poly", coeffs=coeffs or (Fraction(0),))


def _const_piece(lam, c):
    return _pl_piece((0 * lam, lam), (c, c))


def piece_integral(piece: Piece, lam):
    if piece.kind == "poly":
        acc = 0
        for k, c in enumerate(piece.coeffs):
            acc = acc + c * lam ** (k + 1) / (k + 1)
        return acc
    acc = 0
    for i in range(len(piece.breaks) - 1):
        acc = acc + (piece.vals[i] + piece.vals[i + 1]) * (piece.breaks[i + 1] - piece.breaks[i]) / 2
    return acc


def piece_shift(piece: Piece, c):
    if piece.kind == "poly":
        co = list(piece.coeffs)
        co[0] = co[0] + c
        return Piece("poly", coeffs=tuple(co))
    return Piece("pl", piece.breaks, tuple(v + c for v in piece.vals))


def piece_scale(piece: Piece, c):
    if piece.kind == "poly":
        return Piece("poly", coeffs=tuple(x * c for x in piece.coeffs))
    return Piece("pl", piece.breaks, tuple(v * c for v in piece.vals))


def piece_derivative_variation(piece: Piece, lam):
    """Total variation of the derivative on (0, lam); exact for pl and for
    rational polynomial data, float fallback otherwise."""
    if piece.kind == "pl":
        slopes = []
        for i in range(len(piece.breaks) - 1):
            dt = piece.breaks[i + 1] - piece.breaks[i]
            if exact_sign(dt) == 0:
                continue
            slopes.append((piece.vals[i + 1] - piece.vals[i]) / dt)
        return sum(abs(s1 - s0) for s0, s1 in zip(slopes, slopes[1:])) if len(slopes) > 1 else 0
    if all(isinstance(c, (int, Fraction)) for c in piece.coeffs) and isinstance(lam, (int, Fraction)):
        x = sympy.Symbol("x")
        p1 = sum(sympy.Rational(c) * k * x ** (k - 1) for k, c in enumerate(piece.coeffs) if k >= 1)
        p2 = sympy.diff(p1, x)
        if p2 == 0:
            return 0
        top = sympy.Rational(lam)
        roots = [r for r in sympy.real_roots(sympy.Poly(p2, x)) if 0 < r < top]
        knots = [sympy.Rational(0)] + sorted(roots) + [top]
        var = sympy.nsimplify(sum(abs(p1.subs(x, b) - p1.subs(x, a)) for a, b in zip(knots, knots[1:])))
        return Fraction(str(var)) if var.is_rational else float(var)
    # quadratic-field data: bound the variation numerically
    dcoef = [k * to_float(c) for k, c in enumerate(piece.coeffs)][1:]
    if not any(dcoef[1:]):
        return 0.0
    ts = np.linspace(0.0, to_float(lam), 257)
    dv = [sum(c * t**k for k, c in enumerate(dcoef)) for t in ts]
    return float(sum(abs(b - a) for a, b in zip(dv, dv[1:])))


def piece_compose_affine(piece: Piece, sign, offset):
    """The piece evaluated at sign*x + offset, as a new piece in x."""
    if piece.kind == "poly":
        out = [0 * offset] * len(piece.coeffs)
        for k, c in enumerate(piece.coeffs):
            for j in range(k + 1):
                term = c * math.comb(k, j) * (sign**j)
                if k - j:
                    term = term * offset ** (k - j)
                out[j] = out[j] + term
        return Piece("poly", coeffs=tuple(out))
    xs = [(b - offset) * sign for b in piece.breaks]
    vs = list(piece.vals)
    if sign == -1:
        xs.reverse()
        vs.reverse()
    return Piece("pl", tuple(xs), tuple(vs))


def _pl_as_poly(piece: Piece):
    """Affine polynomial form of a pl piece when it is globally affine, else None."""
    if piece.kind == "poly":
        return piece
    t0, v0 = piece.breaks[0], piece.vals[0]
    t1, v1 = piece.breaks[-1], piece.vals[-1]
    if exact_sign(t1 - t0) == 0:
        return None
    slope = (v1 - v0) / (t1 - t0)
    for t, v in zip(piece.breaks, piece.vals):
        if exact_sign(v - (v0 + slope * (t - t0))) != 0:
            return None
    return Piece("poly", coeffs=(v0 - slope * t0, slope))


def piece_sum(pieces):
    """Exact sum of pieces over their common domain (homogeneous kinds only)."""
    kinds = {p.kind for p in pieces}
    if kinds == {"pl", "poly"}:
        conv = [_pl_as_poly(p) for p in pieces]
        if all(c is not None for c in conv):
            pieces, kinds = conv, {"poly"}
    if kinds == {"poly"}:
        n = max(len(p.coeffs) for p in pieces)
        out = [0] * n
        for p in pieces:
            for k, c in enumerate(p.coeffs):
                out[k] = out[k] + c
        return Piece("poly", coeffs=tuple(out))
    if kinds == {"pl"}:
        lo = max((p.breaks[0] for p in pieces), key=to_float)
        hi = min((p.breaks[-1] for p in pieces), key=to_float)
        if exact_sign(hi - lo) <= 0:
            return None
        cuts = {lo, hi}
        for p in pieces:
            for b in p.breaks:
                if exact_sign(b - lo) > 0 and exact_sign(hi - b) > 0:
                    cuts.add(b)
        cuts = sorted(cuts, key=to_float)
        vals = [sum(p(t) for p in pieces) for t in cuts]
        return Piece("pl", tuple(cuts), tuple(vals))
    return None


class PiecewiseFunction:
    """Per-letter observable bound to a linear involution."""

    def __init__(self, T: LinearInvolution, pieces, signs=None, autocenter=True):
        self.T = T
        self.perm = T.perm
        self.pieces = {}
        for a in self.perm.alphabet:
            lam = T.lengths[a]
            self.pieces[a] = pieces.get(a, _const_piece(lam, Fraction(0)))
        self.signs = {a: 1 for a in self.perm.alphabet}
        if signs:
            self.signs.update(signs)
        self.centered_by = 0
        if autocenter:
            total = sum(T.lengths[a] for a in self.perm.alphabet)
            mean = self.integral() / total
            if exact_sign(mean) != 0:
                self.pieces = {a: piece_shift(p, -mean) for a, p in self.pieces.items()}
                self.centered_by = mean

    def integral(self):
        return sum(piece_integral(p, self.T.lengths[a]) for a, p in self.pieces.items())

    def derivative_variation(self):
        return sum(piece_derivative_variation(p, self.T.lengths[a]) for a, p in self.pieces.items())

    def sup_norm(self):
        out = 0.0
        for a, p in self.pieces.items():
            if p.kind == "pl":
                out = max(out, max(abs(to_float(v)) for v in p.vals))
            else:
                ts = np.linspace(0.0, to_float(self.T.lengths[a]), 64)
                out = max(out, max(abs(sum(to_float(c) * t**k for k, c in enumerate(p.coeffs))) for t in ts))
        return out

    def slot_piece(self, slot):
        """The observable on a slot, in slot-local coordinates t in [0, lam]."""
        a = self.perm.slots[slot]
        first, second = self.perm.letter_slots[a]
        base = self.pieces[a]
        if slot == first:
            return base
        lam = self.T.lengths[a]
        if self.perm.slot_row(first) == self.perm.slot_row(second):
            flipped = piece_compose_affine(base, -1, lam)  # t -> lam - t
        else:
            flipped = base
        return flipped if self.signs[a] == 1 else piece_scale(flipped, -1)

    def value(self, point):
        x, level = point
        b = self.T.slot_of(x, level)
        return self.slot_piece(b.slot)(x - b.lo)

    def is_constant(self):
        out = {}
        for a, p in self.pieces.items():
            if p.kind == "poly":
                if any(c != 0 for c in p.coeffs[1:]):
                    return None
                out[a] = p.coeffs[0]
            else:
                v0 = p.vals[0]
                if any(exact_sign(v - v0) != 0 for v in p.vals):
                    return None
                out[a] = v0
        return out

    def scaled(self, c):
        f = PiecewiseFunction(self.T, {}, autocenter=False)
        f.pieces = {a: piece_scale(p, c) for a, p in self.pieces.items()}
        f.signs = dict(self.signs)
        return f

    def plus(self, other):
        assert self.T is other.T and self.signs == other.signs
        f = PiecewiseFunction(self.T, {}, autocenter=False)
        f.pieces = {a: piece_sum([self.pieces[a], other.pieces[a]]) for a in self.pieces}
        f.signs = dict(self.signs)
        return f


def make_function(T: LinearInvolution, spec, signs=None, autocenter=True):
    """Build an observable from per-letter entries.

    Each entry: {"letter": ..., "kind": "poly", "coeffs": [...]} or
    {"letter": ..., "kind": "pl", "breakpoints": [...], "values": [...]}
    with breakpoints covering [0, lam] for that letter.
    """
    from .numbers import parse_exact

    def conv(v):
        return parse_exact(v) if isinstance(v, str) else Fraction(v)

    pieces = {}
    for entry in spec:
        a = entry["letter"]
        if a not in T.perm.letter_index:
            raise UnsupportedRepresentation(f"unknown letter {a!r}")
        kind = entry.get("kind", "pl")
        if kind == "poly":
            pieces[a] = _poly_piece([conv(c) for c in entry["coeffs"]])
        elif kind == "pl":
            breaks = [conv(b) for b in entry["breakpoints"]]
            vals = [conv(v) for v in entry["values"]]
            lam = T.lengths[a]
            if exact_sign(breaks[0]) != 0 or exact_sign(breaks[-1] - lam) != 0:
                raise UnsupportedRepresentation(f"breakpoints for {a!r} must span [0, lam]")
            pieces[a] = _pl_piece(breaks, vals)
        else:
            raise UnsupportedRepresentation(f"unknown kind {kind!r}")
    return PiecewiseFunction(T, pieces, signs=signs, autocenter=autocenter)


def piecewise_constant(T, values_by_letter, autocenter=False):
    pieces = {a: _const_piece(T.lengths[a], v) for a, v in values_by_letter.items()}
    return PiecewiseFunction(T, pieces, autocenter=autocenter)


# ---------------------------------------------------------------------------
# renormalized sums
# ---------------------------------------------------------------------------


@dataclass
class SpecialSumRow:
    letter: str
    midpoint_value: object
    return_time: int
    orbit_affines: list  # (sign, offset, slot) composing T^j on the interval
    composite: Piece | None
    var_bound: object


@dataclass
class SpecialSumResult:
    level: int
    rows: list

    def midpoint_vector(self):
        return [r.midpoint_value for r in self.rows]


def special_birkhoff_sum(phi: PiecewiseFunction, path: rauzy.CocyclePath, k: int):
    """Sums of the observable over return words to the level-k section.

    For each letter's first slot at level k, the orbit of the whole interval
    under the base map is followed until it returns to the shortened
    section; the sum function, its midpoint value, and a variation bound
    are produced.  For piecewise constant data the midpoint vector equals
    the transposed cocycle product applied to the value vector.
    """
    T0 = path.seed
    Tk = path.state(k)
    rows = []
    for a in sorted(Tk.perm.alphabet):
        slot = Tk.perm.letter_slots[a][0]
        bk = Tk.branches[slot]
        sign, offset, level = 1, 0 * T0.total, bk.level
        affines = []
        pieces = []
        var_bound = 0
        x_mid = (bk.lo + bk.hi) / 2
        total = 0
        guard = 0
        while True:
            guard += 1
            if guard > 10**7:
                raise OrbitHitsSingularity("return word did not close")
            pt = (sign * x_mid + offset, level)
            try:
                br = T0.slot_of(pt[0], pt[1])
            except SingularPoint as e:
                raise OrbitHitsSingularity(str(e))
            sp = phi.slot_piece(br.slot)
            affines.append((sign, offset, br.slot))
            # slot-local coordinate of the orbit point: t = sign*x + (offset - br.lo)
            pieces.append(piece_compose_affine(sp, sign, offset - br.lo))
            total = total + sp(pt[0] - br.lo)
            var_bound = var_bound + piece_derivative_variation(sp, br.hi - br.lo)
            # advance the affine composition through this branch
            sign, offset, level = br.sign * sign, br.sign * offset + br.offset, br.out_level
            if exact_sign(sign * x_mid + offset - Tk.total) < 0 and exact_sign(sign * x_mid + offset) > 0:
                break
        composite = piece_sum(pieces)
        rows.append(SpecialSumRow(a, total, len(affines), affines, composite, var_bound))
    return SpecialSumResult(k, rows)


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------


@dataclass
class Solution:
    chi: list  # exact per-letter constants, sorted-letter order
    chi_float: np.ndarray
    letters: tuple
    t_star: float
    base_point: tuple
    psi_points: list  # orbit points
    psi_values: list  # exact transfer-function samples along the orbit
    bound: float
    horizon: int
    stable_basis: np.ndarray
    decade_maxima: list = field(default_factory=list)


def _lp_chi(midvecs, mats, d):
    from scipy.optimize import linprog, minimize

    rows, rhs = [], []
    for m, Q in zip(midvecs, mats):
        A = np.array(Q, dtype=float).T
        for i in range(d):
            rows.append(np.append(A[i], -1.0))
            rhs.append(m[i])
            rows.append(np.append(-A[i], -1.0))
            rhs.append(-m[i])
    A_ub = np.array(rows)
    b_ub = np.array(rhs)
    c = np.zeros(d + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * d + [(0, None)], method="highs")
    if not res.success:
        raise NotConverged(f"correction search failed: {res.message}")
    t_star = res.x[-1]
    x0 = res.x[:d]
    cons = [
        {
            "type": "ineq",
            "fun": lambda x, A=A_ub[:, :d], b=b_ub, t=t_star: (t * (1 + 1e-9) + 1e-12) - (A @ x - b),
        }
    ]
    qp = minimize(lambda x: float(x @ x), x0, constraints=cons, method="SLSQP",
                  options={"maxiter": 200, "ftol": 1e-14})
    chi = qp.x if qp.success else x0
    return chi, t_star


def _midpoint_sum_values(phi: PiecewiseFunction, path: rauzy.CocyclePath, k: int):
    """Exact midpoint sums at level k, values only (no composite pieces)."""
    T0 = path.seed
    Tk = path.state(k)
    out = []
    for a in sorted(Tk.perm.alphabet):
        slot = Tk.perm.letter_slots[a][0]
        bk = Tk.branches[slot]
        pt = ((bk.lo + bk.hi) / 2, bk.level)
        total = 0
        while True:
            try:
                br = T0.slot_of(pt[0], pt[1])
            except SingularPoint as e:
                raise OrbitHitsSingularity(str(e))
            total = total + phi.slot_piece(br.slot)(pt[0] - br.lo)
            pt = (br.offset + br.sign * pt[0], br.out_level)
            if exact_sign(pt[0] - Tk.total) < 0 and exact_sign(pt[0]) > 0:
                break
        out.append(total)
    return out


def midpoint_vectors(phi: PiecewiseFunction, path: rauzy.CocyclePath, K, budget=20000):
    """Midpoint renormalized-sum vectors for levels 0..K (floats).

    Levels whose total return time fits the budget are summed exactly along
    the orbit; deeper levels use the block recursion m[k+1] = tZ(k+1) m[k],
    whose midpoint-vs-anywhere error stays bounded by the derivative
    variation while the transfer keeps growing.
    """
    out = []
    exact_levels = 0
    for k in range(K + 1):
        cost = sum(rauzy.col_sums(path.Q[k]))
        if cost > budget:
            break
        out.append([to_float(v) for v in _midpoint_sum_values(phi, path, k)])
        exact_levels += 1
    for k in range(exact_levels, K + 1):
        Zt = np.array(path.Z[k - 1], dtype=float).T
        out.append(list(Zt @ np.array(out[-1])))
    return out, exact_levels


def solve(phi: PiecewiseFunction, path: rauzy.CocyclePath, K=None, tol=1e-4,
          config: roth.RothConfig | None = None, orbit_len=2000, check_convergence=True,
          skip_diagnostics=False, budget=20000):
    """Find a per-letter constant correction with small renormalized sums,
    and the transfer function on a long base orbit.

    Raises DiagnosticsFailed when the growth/gap verdicts are negative at
    the configured parameters, and NotConverged when halving the horizon
    moves the correction (mod the estimated stable space) by more than tol.
    """
    config = config or roth.RothConfig()
    K = path.nblocks() if K is None else min(K, path.nblocks())
    if not skip_diagnostics:
        if not roth.condition_a_verdict(path, config.eps, config.c_eps):
            raise DiagnosticsFailed("growth-rate verdict negative at configured parameters")
        gap = roth.spectral_gap_estimate(path, theta=config.theta, C=float(config.C))
        if not gap.verdict:
            raise DiagnosticsFailed("spectral-gap verdict negative at configured parameters")
    letters = path.letters
    d = len(letters)
    midvecs, _ = midpoint_vectors(phi, path, K, budget=budget)
    mats = [path.Q[k] for k in range(K + 1)]
    chi_f, t_star = _lp_chi(midvecs, mats, d)

    est = roth.stable_space_estimate(path, K=K)
    if check_convergence and K >= 6:
        chi_h, _ = _lp_chi(midvecs[: K // 2 + 1], mats[: K // 2 + 1], d)
        drift = _residual_mod_stable(chi_f - chi_h, est.basis)
        if drift > max(tol, 1e-9) * max(1.0, float(np.linalg.norm(chi_f))):
            raise NotConverged(f"correction moved by {drift:.3g} between horizons {K//2} and {K}")

    chi = [Fraction(x).limit_denominator(2**48) for x in chi_f]
    base = path.seed.midpoint(0)
    pts, vals, bound, decades = transfer_on_orbit(phi, chi, base, orbit_len)
    return Solution(chi, np.array(chi_f), letters, t_star, base, pts, vals, bound, orbit_len,
                    est.basis, decades)


def transfer_on_orbit(phi: PiecewiseFunction, chi, base_point, n):
    """Telescoped transfer samples psi(T^j x0), exact, with running maxima."""
    T = phi.T
    letters = sorted(T.perm.alphabet)
    chi_by_letter = dict(zip(letters, chi))
    pts = [base_point]
    vals = [Fraction(0)]
    psi = Fraction(0)
    cur = base_point
    bound = 0.0
    decades = []
    next_decade = 10
    for j in range(n):
        x, level = cur
        b = T.slot_of(x, level)
        inc = phi.slot_piece(b.slot)(x - b.lo) - chi_by_letter[b.letter]
        psi = psi - inc
        cur = (b.offset + b.sign * x, b.out_level)
        pts.append(cur)
        vals.append(psi)
        bound = max(bound, abs(to_float(psi)))
        if j + 1 == next_decade:
            decades.append((next_decade, bound))
            next_decade *= 10
    return pts, vals, bound, decades


def _residual_mod_stable(vec, stable_basis):
    v = np.array([to_float(x) for x in vec], dtype=float)
    if stable_basis is None or stable_basis.size == 0:
        return float(np.linalg.norm(v))
    B, _ = np.linalg.qr(stable_basis)
    return float(np.linalg.norm(v - B @ (B.T @ v)))


def chi_residual_mod_stable(chi_a, chi_b, stable_basis):
    """Distance between two corrections after quotienting the stable estimate."""
    return _residual_mod_stable(
        np.array([to_float(x) for x in chi_a]) - np.array([to_float(x) for x in chi_b]),
        stable_basis,
    )


@dataclass
class VerifyReport:
    max_residual: object
    residual_exact_zero: bool
    window_maxima: list
    growth_factors: list
    flagged_unbounded: bool


def verify(phi: PiecewiseFunction, solution: Solution, n=None, unbounded_factor=4.0):
    """Check the defining identity on the stored orbit and the growth trend.

    The residual psi(x) - psi(Tx) - phi(x) + chi(x) is exactly zero on the
    defining orbit; window maxima over successive decades expose unbounded
    partial sums.
    """
    T = phi.T
    letters = solution.letters
    chi_by_letter = dict(zip(letters, solution.chi))
    n = len(solution.psi_points) - 1 if n is None else min(n, len(solution.psi_points) - 1)
    max_res = Fraction(0)
    for j in range(n):
        x, level = solution.psi_points[j]
        b = T.slot_of(x, level)
        rhs = phi.slot_piece(b.slot)(x - b.lo) - chi_by_letter[b.letter]
        res = solution.psi_values[j] - solution.psi_values[j + 1] - rhs
        if exact_sign(abs(res) - abs(max_res)) > 0:
            max_res = res
    windows = []
    lo = 10
    while lo <= n:
        hi = min(lo * 10, n)
        seg = [abs(to_float(v)) for v in solution.psi_values[lo:hi + 1]]
        if seg:
            windows.append((lo, hi, max(seg)))
        lo *= 10
    factors = []
    for (a0, _, m0), (a1, _, m1) in zip(windows, windows[1:]):
        factors.append(m1 / m0 if m0 > 0 else math.inf)
    flagged = any(f >= unbounded_factor for f in factors)
    return VerifyReport(max_res, exact_sign(max_res) == 0, windows, factors, flagged)


# ---------------------------------------------------------------------------
# manufactured data for oracle tests
# ---------------------------------------------------------------------------


def coboundary_plus_constant(T: LinearInvolution, g_breaks, g_vals, chi0_by_letter):
    """Exact data Phi = Psi0 - Psi0 o T + chi0 with Psi0(x, e) = (-1)^e g(x).

    g is piecewise linear on [0, |X|]; the level-antisymmetry of Psi0 makes
    the result take equal values on twin slots, so it is valid per-letter
    data.  Returns (phi, psi0_callable).
    """
    g = _pl_piece(tuple(g_breaks), tuple(g_vals))

    def psi0(point):
        x, level = point
        return g(x) if level == 0 else -g(x)

    pieces = {}
    for a in T.perm.alphabet:
        slot = T.perm.letter_slots[a][0]
        b = T.branches[slot]
        lam = T.lengths[a]
        sgn_in = 1 if b.level == 0 else -1
        sgn_out = 1 if b.out_level == 0 else -1
        # f(t) = sgn_in g(lo + t) - sgn_out g(sign (lo + t) + offset) + chi0
        cuts = {0 * lam, lam}
        for c in g.breaks:
            t = c - b.lo
            if exact_sign(t) > 0 and exact_sign(lam - t) > 0:
                cuts.add(t)
            u = (c - b.offset) * b.sign - b.lo
            if exact_sign(u) > 0 and exact_sign(lam - u) > 0:
                cuts.add(u)
        cuts = sorted(cuts, key=to_float)
        chi0 = chi0_by_letter.get(a, 0)
        vals = [
            sgn_in * g(b.lo + t) - sgn_out * g(b.sign * (b.lo + t) + b.offset) + chi0
            for t in cuts
        ]
        pieces[a] = _pl_piece(tuple(cuts), tuple(vals))
    phi = PiecewiseFunction(T, pieces, autocenter=False)
    return phi, psi0
