"""Exact Gaussian rationals, ``p + q i`` with ``p, q`` in Q.

Both parts are :class:`gmpy2.mpq`, which keeps them in lowest terms with a
positive denominator.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussianRational", "as_rational", "parse_rational", "format_rational", "mpq"]

_MPQ = type(mpq(0))


def as_rational(x) -> "mpq":
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to mpq."""
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, (int, Rational)):
        return mpq(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return mpq(x)


def parse_rational(s: str) -> "mpq":
    s = s.strip()
    if s.count("/") > 1:
        raise ValueError(f"malformed rational {s!r}")
    num, _, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if den else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return mpq(p, q)


def format_rational(x) -> str:
    x = as_rational(x)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational real part with im")
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, complex):
            raise TypeError("complex floats are not exact")
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, tuple) and len(x) == 2:
            return cls(*x)
        return cls(x)

    @classmethod
    def from_strings(cls, re: str = "0", im: str = "0") -> "GaussianRational":
        return cls(parse_rational(re), parse_rational(im))

    # arithmetic -------------------------------------------------------
    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    conj = conjugate

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm2(self) -> "mpq":
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons / conversions ---------------------------------------
    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((int(self.re.numerator), int(self.re.denominator),
                     int(self.im.numerator), int(self.im.denominator)))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"
