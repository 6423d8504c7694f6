"""Exact scalar arithmetic for the dynamical core.

Two kinds of scalars are supported: plain rationals (``fractions.Fraction``)
and elements a + b*sqrt(D) of a real quadratic field (``QuadExt``).  All
comparisons and arithmetic are exact; nothing here touches floating point
except the explicit ``to_float`` conversions used by diagnostics.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class QuadExt:
    """a + b*sqrt(d) with rational a, b and a fixed positive non-square d."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=5):
        self.a = _frac(a)
        self.b = _frac(b)
        self.d = int(d)
        if self.d <= 1 or math.isqrt(self.d) ** 2 == self.d:
            raise ValueError(f"d must be a non-square integer > 1, got {d}")

    # -- coercion ---------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError(f"mixed quadratic fields: sqrt({self.d}) vs sqrt({other.d})")
            d = self.d if self.b != 0 or other.b == 0 else other.d
            return QuadExt(other.a, other.b, d), d
        if isinstance(other, (int, Fraction)):
            return QuadExt(_frac(other), 0, self.d), self.d
        return NotImplemented, None

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        o, d = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o, d = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, d)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o, d = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o, d = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.a * o.a - o.b * o.b * d
        if n == 0:
            raise ZeroDivisionError("division by zero")
        inv = QuadExt(o.a / n, -o.b / n, d)
        return self * inv

    def __rtruediv__(self, other):
        o, _ = self._lift(other)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QuadExt(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- ordering ---------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        # compare a with -b*sqrt(d): both sides squared, signs tracked
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        lhs, rhs = a * a, b * b * self.d
        if a > 0:  # b < 0
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def _cmp(self, other):
        o, _ = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadExt):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.d == other.d and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    # -- conversions ------------------------------------------------------

    def to_float(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    __float__ = to_float

    def __repr__(self):
        return f"QuadExt({self.a!r}, {self.b!r}, {self.d})"

    def __str__(self):
        return format_exact(self)


Exact = (int, Fraction, QuadExt)


def to_float(x) -> float:
    return x.to_float() if isinstance(x, QuadExt) else float(x)


def exact_sign(x) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    return (x > 0) - (x < 0)


def sqrt_field(d: int) -> QuadExt:
    """sqrt(d) as an exact field element."""
    return QuadExt(0, 1, d)


_SQRT_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)?\s*(?P<sgn>[+-])?\s*"
    r"(?P<b>\d+(?:/\d+)?)?\s*(?:√|sqrt\()(?P<d>\d+)\)?\s*$"
)


def parse_exact(s: str):
    """Parse 'p/q' or 'a+b√D' (also 'a+b*sqrt(D)' style) into an exact scalar."""
    s = s.strip().replace("*", "")
    if "√" not in s and "sqrt" not in s:
        return Fraction(s)
    m = _SQRT_RE.match(s)
    if not m:
        raise ValueError(f"cannot parse exact scalar {s!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("sgn") == "-":
        b = -b
    elif m.group("sgn") is None and m.group("a") and m.group("a").lstrip("+-") != m.group("a"):
        pass  # sign already folded into a
    return QuadExt(a, b, int(m.group("d")))


def format_exact(x) -> str:
    """Serialize an exact scalar: 'p/q' or 'a+b√D'."""
    if isinstance(x, QuadExt):
        if x.b == 0:
            return str(x.a)
        bpart = f"{abs(x.b)}√{x.d}" if abs(x.b) != 1 else f"√{x.d}"
        sgn = "+" if x.b > 0 else "-"
        if x.a == 0:
            return f"{'-' if x.b < 0 else ''}{bpart}"
        return f"{x.a}{sgn}{bpart}"
    return str(_frac(x))


def log_big(n) -> float:
    """log of a (possibly huge) positive integer or Fraction, overflow-safe."""
    if isinstance(n, Fraction):
        return log_big(n.numerator) - log_big(n.denominator)
    n = int(n)
    if n <= 0:
        raise ValueError("log_big needs a positive argument")
    if n.bit_length() <= 900:
        return math.log(n)
    k = n.bit_length() - 60
    return math.log(n >> k) + k * math.log(2)
