"""Polynomials in u, ubar, v, vbar with exact Gaussian-rational coefficients.

Variables are laid out as four blocks of ``m``: ``u_1..u_m, ubar_1..ubar_m,
v_1..v_m, vbar_1..vbar_m``, and a term is addressed by the quadruple
``(A, B, C, D)`` of exponent tuples for the four blocks.
"""

from __future__ import annotations

from typing import Mapping, NamedTuple

import mpmath

from . import _sparse as sp
from .errors import DimensionMismatch, UnsupportedShape, ValidationError
from .numbers import GaussianRational, as_rational, mpq

__all__ = ["QuadIndex", "ScaledPolynomial"]

U, UBAR, V, VBAR = range(4)


class QuadIndex(NamedTuple):
    u: tuple
    ubar: tuple
    v: tuple
    vbar: tuple

    @property
    def degree(self) -> int:
        return sum(self.u) + sum(self.ubar) + sum(self.v) + sum(self.vbar)


def _block_perm(m: int, blocks: tuple) -> tuple:
    """Variable permutation that puts old block ``blocks[b]`` into block ``b``."""
    return tuple(blocks[b] * m + i for b in range(4) for i in range(m))


class ScaledPolynomial:
    """Immutable sparse polynomial; ``terms`` maps :class:`QuadIndex` to coefficients."""

    __slots__ = ("m", "_re", "_im")

    def __init__(self, m: int, terms: Mapping = ()):
        if m < 1:
            raise ValidationError("dimension must be positive")
        self.m = m
        re: dict = {}
        im: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for idx, c in items:
            parts = tuple(tuple(int(e) for e in p) for p in idx)
            if len(parts) != 4 or any(len(p) != m for p in parts):
                raise DimensionMismatch(f"index {idx} does not have four blocks of {m}")
            c = GaussianRational.coerce(c)
            key = sp.encode(sum(parts, ()))
            re[key] = re.get(key, 0) + c.re
            im[key] = im.get(key, 0) + c.im
        self._re = sp.clean(re)
        self._im = sp.clean(im)

    @classmethod
    def _raw(cls, m: int, re: dict, im: dict) -> "ScaledPolynomial":
        obj = object.__new__(cls)
        obj.m = m
        obj._re = re
        obj._im = im
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, m: int) -> "ScaledPolynomial":
        return cls._raw(m, {}, {})

    @classmethod
    def constant(cls, m: int, c) -> "ScaledPolynomial":
        c = GaussianRational.coerce(c)
        key = sp.encode((0,) * (4 * m))
        return cls._raw(m, {key: c.re} if c.re else {}, {key: c.im} if c.im else {})

    @classmethod
    def variable(cls, m: int, block: int, i: int) -> "ScaledPolynomial":
        """``block`` is 0..3 for u, ubar, v, vbar; ``i`` is 0-based."""
        return cls._raw(m, {sp.unit(block * m + i, 4 * m): mpq(1)}, {})

    @classmethod
    def from_uvbar(cls, m: int, coefficients: Mapping) -> "ScaledPolynomial":
        """Polynomial ``sum c_{P,Q} u^P vbar^Q`` from a map ``(P, Q) -> c``."""
        z = (0,) * m
        return cls(m, {QuadIndex(tuple(P), z, z, tuple(Q)): c for (P, Q), c in coefficients.items()})

    # -- inspection --------------------------------------------------------
    def _keys(self) -> list:
        return sorted(set(self._re) | set(self._im))

    def _index(self, key: int) -> QuadIndex:
        e = sp.decode(key, 4 * self.m)
        m = self.m
        return QuadIndex(e[:m], e[m:2 * m], e[2 * m:3 * m], e[3 * m:])

    @property
    def terms(self) -> dict:
        zero = mpq(0)
        return {
            self._index(k): GaussianRational(self._re.get(k, zero), self._im.get(k, zero))
            for k in self._keys()
        }

    def coefficient(self, u, ubar, v, vbar) -> GaussianRational:
        key = sp.encode(tuple(u) + tuple(ubar) + tuple(v) + tuple(vbar))
        return GaussianRational(self._re.get(key, 0), self._im.get(key, 0))

    def __len__(self):
        return len(set(self._re) | set(self._im))

    def is_zero(self) -> bool:
        return not self._re and not self._im

    def degrees(self) -> set:
        return {sp.degree(k, 4 * self.m) for k in self._keys()}

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max(self.degrees(), default=-1)

    def parity(self):
        """0 or 1 when all monomials share a degree parity, None when mixed, 0 for zero."""
        ps = {d % 2 for d in self.degrees()}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def homogeneous_part(self, d: int) -> "ScaledPolynomial":
        return self.select(lambda idx: idx.degree == d)

    def select(self, predicate) -> "ScaledPolynomial":
        keep = {k for k in self._keys() if predicate(self._index(k))}
        return ScaledPolynomial._raw(
            self.m,
            {k: v for k, v in self._re.items() if k in keep},
            {k: v for k, v in self._im.items() if k in keep},
        )

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "ScaledPolynomial":
        if isinstance(other, ScaledPolynomial):
            if other.m != self.m:
                raise DimensionMismatch(f"dimension {self.m} vs {other.m}")
            return other
        return ScaledPolynomial.constant(self.m, other)

    def _combine(self, other, sign: int) -> "ScaledPolynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        re = dict(self._re)
        im = dict(self._im)
        sp.add_into(re, other._re, sign)
        sp.add_into(im, other._im, sign)
        return ScaledPolynomial._raw(self.m, sp.clean(re), sp.clean(im))

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return ScaledPolynomial._raw(
            self.m, {k: -v for k, v in self._re.items()}, {k: -v for k, v in self._im.items()}
        )

    def __mul__(self, other):
        if isinstance(other, ScaledPolynomial):
            if other.m != self.m:
                raise DimensionMismatch(f"dimension {self.m} vs {other.m}")
            re, im = sp.mul(self._re, self._im, other._re, other._im, None)
            return ScaledPolynomial._raw(self.m, re, im)
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        re, im = sp.scale(self._re, self._im, c.re, c.im)
        return ScaledPolynomial._raw(self.m, re, im)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledPolynomial):
            return NotImplemented
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * c.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = ScaledPolynomial.constant(self.m, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, ScaledPolynomial):
            return self.m == other.m and self._re == other._re and self._im == other._im
        try:
            return self == ScaledPolynomial.constant(self.m, other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    # -- symmetries and substitutions ---------------------------------------
    def _permute_blocks(self, blocks: tuple, conjugate: bool) -> "ScaledPolynomial":
        perm = _block_perm(self.m, blocks)
        n = 4 * self.m
        im = sp.permute(self._im, n, perm)
        if conjugate:
            im = {k: -v for k, v in im.items()}
        return ScaledPolynomial._raw(self.m, sp.permute(self._re, n, perm), im)

    def conj(self) -> "ScaledPolynomial":
        """The complex conjugate function ``conj(p(u, v))``."""
        return self._permute_blocks((UBAR, U, VBAR, V), True)

    def swap(self) -> "ScaledPolynomial":
        """``p(v, u)``."""
        return self._permute_blocks((V, VBAR, U, UBAR), False)

    def hermitian_conjugate(self) -> "ScaledPolynomial":
        """``conj(p(v, u))``; a kernel coefficient is fixed by this map."""
        return self._permute_blocks((VBAR, V, UBAR, U), True)

    def is_hermitian(self) -> bool:
        return self == self.hermitian_conjugate()

    def real_part(self) -> "ScaledPolynomial":
        """``Re p(u, v)`` as a polynomial."""
        return (self + self.conj()) * mpq(1, 2)

    def is_real(self) -> bool:
        return self == self.conj()

    def on_diagonal(self) -> "ScaledPolynomial":
        """Substitute ``v <- u`` (and so ``vbar <- ubar``)."""
        m = self.m
        out_re: dict = {}
        out_im: dict = {}
        for src, dst in ((self._re, out_re), (self._im, out_im)):
            for k, c in src.items():
                idx = self._index(k)
                e = tuple(a + b for a, b in zip(idx.u, idx.v)) + tuple(a + b for a, b in zip(idx.ubar, idx.vbar))
                key = sp.encode(e + (0,) * (2 * m))
                dst[key] = dst.get(key, 0) + c
        return ScaledPolynomial._raw(m, sp.clean(out_re), sp.clean(out_im))

    def at_v_zero(self) -> "ScaledPolynomial":
        """Substitute ``v = 0``."""
        return self.select(lambda idx: not any(idx.v) and not any(idx.vbar))

    def scale_arguments(self, t) -> "ScaledPolynomial":
        """``p(t u, t v)`` for real rational ``t``: degree-d terms times ``t^d``."""
        t = as_rational(t)
        n = 4 * self.m
        f = {d: t ** d for d in self.degrees()}
        return ScaledPolynomial._raw(
            self.m,
            sp.clean({k: v * f[sp.degree(k, n)] for k, v in self._re.items()}),
            sp.clean({k: v * f[sp.degree(k, n)] for k, v in self._im.items()}),
        )

    def negate_arguments(self) -> "ScaledPolynomial":
        return self.scale_arguments(-1)

    def is_uvbar_only(self) -> bool:
        return all(not any(idx.ubar) and not any(idx.v) for idx in map(self._index, self._keys()))

    def sharp(self) -> "ScaledPolynomial":
        """``f(u, vbar) - f(u, ubar)/2 - f(v, vbar)/2`` for ``f`` in ``u, vbar`` only."""
        if not self.is_uvbar_only():
            raise UnsupportedShape("sharp expects a polynomial in u and vbar only")
        half = mpq(1, 2)
        return (
            self
            - self._permute_blocks((U, VBAR, V, UBAR), False) * half
            - self._permute_blocks((V, UBAR, U, VBAR), False) * half
        )

    # -- evaluation and display -----------------------------------------------
    def evaluate(self, u, v):
        """Numeric value at complex vectors ``u``, ``v`` (mpmath precision)."""
        if len(u) != self.m or len(v) != self.m:
            raise DimensionMismatch("point does not match the dimension")
        u = [mpmath.mpc(x) for x in u]
        v = [mpmath.mpc(x) for x in v]
        vals = u + [mpmath.conj(x) for x in u] + v + [mpmath.conj(x) for x in v]
        total = mpmath.mpc(0)
        for idx, c in self.terms.items():
            mono = mpmath.mpc(1)
            for x, e in zip(vals, idx.u + idx.ubar + idx.v + idx.vbar):
                if e:
                    mono *= x ** e
            coef = mpmath.mpc(mpmath.mpf(int(c.re.numerator)) / int(c.re.denominator),
                              mpmath.mpf(int(c.im.numerator)) / int(c.im.denominator))
            total += coef * mono
        return total

    def format(self) -> str:
        if self.is_zero():
            return "0"
        names = ("u", "ub", "v", "vb")
        parts = []
        for idx, c in self.terms.items():
            mono = []
            for name, block in zip(names, idx):
                for i, e in enumerate(block):
                    if e:
                        mono.append(f"{name}{i + 1}" + (f"^{e}" if e > 1 else ""))
            parts.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"ScaledPolynomial(m={self.m}, {self.format()})"
