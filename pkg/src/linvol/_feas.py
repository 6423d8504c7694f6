"""Exact feasibility of small systems of strict linear inequalities.

Fourier-Motzkin elimination over rationals.  Sized for the suspension
systems that arise here (a handful of variables and constraints), where
exactness matters more than asymptotics.
"""

from __future__ import annotations

from fractions import Fraction


def _nonzero(vec):
    return any(c != 0 for c in vec)


def solve_strict(ineqs, eqs=(), nvars=None):
    """Find x with c.x > 0 for all c in ineqs and e.x = 0 for all e in eqs.

    Returns a list of Fractions, or None if the system is infeasible.
    """
    ineqs = [list(map(Fraction, c)) for c in ineqs]
    eqs = [list(map(Fraction, e)) for e in eqs]
    if nvars is None:
        nvars = max((len(c) for c in ineqs + eqs), default=0)
    for c in ineqs + eqs:
        c.extend([Fraction(0)] * (nvars - len(c)))

    # eliminate equalities by Gaussian substitution
    subs = []  # (var, expression coeffs over remaining vars)
    for e in eqs:
        e = _apply_subs(e, subs)
        piv = next((j for j in range(nvars) if e[j] != 0), None)
        if piv is None:
            continue
        expr = [-c / e[piv] for c in e]
        expr[piv] = Fraction(0)
        subs.append((piv, expr))
        ineqs = [_substitute(c, piv, expr) for c in ineqs]

    fixed = {v for v, _ in subs}
    free = [j for j in range(nvars) if j not in fixed]

    system = []
    for c in ineqs:
        if _nonzero(c):
            system.append(c)
        else:
            return None  # row collapsed to 0 > 0

    # Fourier-Motzkin on the free variables
    layers = []  # (var, lowers, uppers) kept for back-substitution
    for var in free:
        lowers, uppers, rest = [], [], []
        for c in system:
            if c[var] > 0:
                lowers.append(c)
            elif c[var] < 0:
                uppers.append(c)
            else:
                rest.append(c)
        layers.append((var, lowers, uppers))
        system = rest
        for lo in lowers:
            for up in uppers:
                comb = [lo[j] * (-up[var]) + up[j] * lo[var] for j in range(nvars)]
                comb[var] = Fraction(0)
                if _nonzero(comb):
                    system.append(comb)
                else:
                    return None

    x = [Fraction(0)] * nvars
    for var, lowers, uppers in reversed(layers):
        lo_vals = [-_dot_excl(c, x, var) / c[var] for c in lowers]
        up_vals = [-_dot_excl(c, x, var) / c[var] for c in uppers]
        lo = max(lo_vals) if lo_vals else None
        up = min(up_vals) if up_vals else None
        if lo is not None and up is not None:
            assert lo < up, "elimination left an empty interval"
            x[var] = (lo + up) / 2
        elif lo is not None:
            x[var] = lo + 1
        elif up is not None:
            x[var] = up - 1
    for var, expr in reversed(subs):
        x[var] = sum(expr[j] * x[j] for j in range(nvars))

    for c in ineqs:
        assert sum(ci * xi for ci, xi in zip(c, x)) > 0
    return x


def _dot_excl(c, x, var):
    return sum(c[j] * x[j] for j in range(len(c)) if j != var)


def _substitute(c, var, expr):
    if c[var] == 0:
        return c
    k = c[var]
    out = [c[j] + k * expr[j] for j in range(len(c))]
    out[var] = Fraction(0)
    return out


def _apply_subs(c, subs):
    for var, expr in subs:
        c = _substitute(c, var, expr)
    return c


def forms_parallel(f, g):
    """True if linear forms f, g are proportional (either may be zero)."""
    f = list(map(Fraction, f))
    g = list(map(Fraction, g))
    n = max(len(f), len(g))
    f += [Fraction(0)] * (n - len(f))
    g += [Fraction(0)] * (n - len(g))
    for i in range(n):
        for j in range(i + 1, n):
            if f[i] * g[j] != f[j] * g[i]:
                return False
    return True
