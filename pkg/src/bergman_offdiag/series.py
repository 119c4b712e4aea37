"""Truncated power series in z_1..z_m and their conjugates over Q(i).

A :class:`TruncatedSeries` of order ``n`` stores every coefficient of total
degree ``|J| + |K| <= n`` of

    sum_{J,K} a_{JK} z^J zbar^K

and nothing above.  Binary operations truncate to the smaller order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import _sparse as sp
from .errors import (
    ConstantTermPresent,
    DegreeOverflow,
    DimensionMismatch,
    NonHolomorphicSubstitution,
    NonzeroConstantTerm,
    OrderTooLow,
    RealityViolation,
    SingularLeadingTerm,
    ValidationError,
)
from .numbers import GaussianRational, as_rational, mpq

__all__ = [
    "BidegreeIndex",
    "TruncatedSeries",
    "PotentialJet",
    "make_jet",
    "series_mul",
    "partial_derivative",
    "compose_holomorphic",
    "compositional_inverse",
    "series_log1p",
    "series_exp",
    "scale_jet",
    "variable",
    "identity_substitution",
]


class BidegreeIndex(NamedTuple):
    J: tuple
    K: tuple

    @property
    def hol_degree(self) -> int:
        return sum(self.J)

    @property
    def anti_degree(self) -> int:
        return sum(self.K)

    @property
    def degree(self) -> int:
        return sum(self.J) + sum(self.K)

    def conjugate(self) -> "BidegreeIndex":
        return BidegreeIndex(self.K, self.J)


def _coerce_index(idx, m: int) -> BidegreeIndex:
    J, K = idx
    J, K = tuple(int(x) for x in J), tuple(int(x) for x in K)
    if len(J) != m or len(K) != m:
        raise DimensionMismatch(f"index {idx} does not have {m} entries per half")
    if min(J + K) < 0:
        raise ValidationError(f"negative exponent in index {idx}")
    return BidegreeIndex(J, K)


class TruncatedSeries:
    """Immutable truncated series; see the module docstring."""

    __slots__ = ("m", "order", "_re", "_im")

    def __init__(self, m: int, order: int, terms: Mapping | Iterable = ()):
        if m < 1:
            raise ValidationError("dimension must be positive")
        if order < 0 or order > 200:
            raise ValidationError(f"truncation order {order} out of range")
        self.m = m
        self.order = order
        re: dict = {}
        im: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for idx, c in items:
            idx = _coerce_index(idx, m)
            if idx.degree > order:
                raise DegreeOverflow(f"term {idx} has degree {idx.degree} > order {order}")
            c = GaussianRational.coerce(c)
            key = sp.encode(idx.J + idx.K)
            re[key] = re.get(key, 0) + c.re
            im[key] = im.get(key, 0) + c.im
        self._re = sp.clean(re)
        self._im = sp.clean(im)

    @classmethod
    def _raw(cls, m: int, order: int, re: dict, im: dict) -> "TruncatedSeries":
        obj = object.__new__(cls)
        obj.m = m
        obj.order = order
        obj._re = re
        obj._im = im
        return obj

    # -- inspection ------------------------------------------------------
    @property
    def nvars(self) -> int:
        return 2 * self.m

    def _keys(self) -> list:
        return sorted(set(self._re) | set(self._im))

    def _index(self, key: int) -> BidegreeIndex:
        e = sp.decode(key, 2 * self.m)
        return BidegreeIndex(e[: self.m], e[self.m:])

    @property
    def terms(self) -> dict:
        """Nonzero terms in graded-lexicographic order."""
        zero = mpq(0)
        return {
            self._index(k): GaussianRational(self._re.get(k, zero), self._im.get(k, zero))
            for k in self._keys()
        }

    def coefficient(self, J: Sequence[int], K: Sequence[int]) -> GaussianRational:
        key = sp.encode(tuple(J) + tuple(K))
        return GaussianRational(self._re.get(key, 0), self._im.get(key, 0))

    def constant(self) -> GaussianRational:
        return self.coefficient((0,) * self.m, (0,) * self.m)

    def __len__(self):
        return len(set(self._re) | set(self._im))

    def is_zero(self) -> bool:
        return not self._re and not self._im

    def is_holomorphic(self) -> bool:
        return all(self._index(k).anti_degree == 0 for k in self._keys())

    def is_real(self) -> bool:
        """True when the series is real-valued, i.e. invariant under conjugation."""
        return self == self.conj()

    def min_degree(self) -> int | None:
        keys = self._keys()
        return sp.degree(keys[0], 2 * self.m) if keys else None

    # -- structural ------------------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        if order == self.order:
            return self
        lim = sp.limit_for(order, 2 * self.m)
        return TruncatedSeries._raw(self.m, order, sp.truncate(self._re, lim), sp.truncate(self._im, lim))

    def with_order(self, order: int) -> "TruncatedSeries":
        """Re-declare the truncation order; raises if terms would be lost."""
        if order < self.order:
            return self.truncate(order)
        return TruncatedSeries._raw(self.m, order, self._re, self._im)

    def select(self, predicate) -> "TruncatedSeries":
        """Keep the terms whose :class:`BidegreeIndex` satisfies ``predicate``."""
        keep = {k for k in self._keys() if predicate(self._index(k))}
        return TruncatedSeries._raw(
            self.m, self.order,
            {k: v for k, v in self._re.items() if k in keep},
            {k: v for k, v in self._im.items() if k in keep},
        )

    def homogeneous_part(self, d: int) -> "TruncatedSeries":
        n = 2 * self.m
        return TruncatedSeries._raw(
            self.m, self.order,
            {k: v for k, v in self._re.items() if sp.degree(k, n) == d},
            {k: v for k, v in self._im.items() if sp.degree(k, n) == d},
        )

    def conj(self) -> "TruncatedSeries":
        m = self.m
        perm = tuple(range(m, 2 * m)) + tuple(range(m))
        return TruncatedSeries._raw(
            m, self.order,
            sp.permute(self._re, 2 * m, perm),
            {k: -v for k, v in sp.permute(self._im, 2 * m, perm).items()},
        )

    conjugate = conj

    def real_part(self) -> "TruncatedSeries":
        return (self + self.conj()) * mpq(1, 2)

    def graded_scale(self, factor) -> "TruncatedSeries":
        """Multiply the degree-d part by ``factor(d)`` (a rational)."""
        n = 2 * self.m
        cache: dict = {}

        def f(k):
            d = sp.degree(k, n)
            if d not in cache:
                cache[d] = as_rational(factor(d))
            return cache[d]

        return TruncatedSeries._raw(
            self.m, self.order,
            sp.clean({k: v * f(k) for k, v in self._re.items()}),
            sp.clean({k: v * f(k) for k, v in self._im.items()}),
        )

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "TruncatedSeries") -> None:
        if other.m != self.m:
            raise DimensionMismatch(f"dimension {self.m} vs {other.m}")

    def _scalar_series(self, c) -> "TruncatedSeries":
        c = GaussianRational.coerce(c)
        key = sp.encode((0,) * (2 * self.m))
        return TruncatedSeries._raw(
            self.m, self.order, {key: c.re} if c.re else {}, {key: c.im} if c.im else {}
        )

    def _combine(self, other, sign: int) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            try:
                other = self._scalar_series(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        lim = sp.limit_for(order, 2 * self.m)
        re = dict(sp.truncate(self._re, lim))
        im = dict(sp.truncate(self._im, lim))
        sp.add_into(re, sp.truncate(other._re, lim), sign)
        sp.add_into(im, sp.truncate(other._im, lim), sign)
        return TruncatedSeries._raw(self.m, order, sp.clean(re), sp.clean(im))

    def __add__(self, other):
        return self._combine(other, 1)

    def __radd__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return TruncatedSeries._raw(
            self.m, self.order, {k: -v for k, v in self._re.items()}, {k: -v for k, v in self._im.items()}
        )

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        re, im = sp.scale(self._re, self._im, c.re, c.im)
        return TruncatedSeries._raw(self.m, self.order, re, im)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "TruncatedSeries":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = one(self.m, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if other.m != self.m:
                return False
            order = min(self.order, other.order)
            lim = sp.limit_for(order, 2 * self.m)
            return (
                sp.truncate(self._re, lim) == sp.truncate(other._re, lim)
                and sp.truncate(self._im, lim) == sp.truncate(other._im, lim)
            )
        try:
            return self == self._scalar_series(other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def derivative(self, var: int, bar: bool = False) -> "TruncatedSeries":
        return partial_derivative(self, var, bar)

    def __repr__(self):
        return f"TruncatedSeries(m={self.m}, order={self.order}, {format_series(self)})"


def format_series(a: TruncatedSeries) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for idx, c in a.terms.items():
        mono = []
        for i, e in enumerate(idx.J):
            if e:
                mono.append(f"z{i + 1}" + (f"^{e}" if e > 1 else ""))
        for i, e in enumerate(idx.K):
            if e:
                mono.append(f"zb{i + 1}" + (f"^{e}" if e > 1 else ""))
        parts.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
    return " + ".join(parts)


# -- constructors --------------------------------------------------------------

def zero(m: int, order: int) -> TruncatedSeries:
    return TruncatedSeries._raw(m, order, {}, {})


def one(m: int, order: int) -> TruncatedSeries:
    return TruncatedSeries._raw(m, order, {sp.encode((0,) * (2 * m)): mpq(1)}, {})


def variable(m: int, order: int, i: int, bar: bool = False) -> TruncatedSeries:
    """The coordinate ``z_i`` (or ``zbar_i``), 0-based ``i``."""
    if order < 1:
        return zero(m, order)
    return TruncatedSeries._raw(m, order, {sp.unit(i + (m if bar else 0), 2 * m): mpq(1)}, {})


def identity_substitution(m: int, order: int) -> list:
    return [variable(m, order, i) for i in range(m)]


# -- operations ------------------------------------------------------------------

def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.m != b.m:
        raise DimensionMismatch(f"dimension {a.m} vs {b.m}")
    order = min(a.order, b.order)
    re, im = sp.mul(a._re, a._im, b._re, b._im, sp.limit_for(order, 2 * a.m))
    return TruncatedSeries._raw(a.m, order, re, im)


def partial_derivative(a: TruncatedSeries, var: int, bar: bool = False) -> TruncatedSeries:
    """d/dz_var (or d/dzbar_var) of ``a``; the result has order ``a.order - 1``."""
    if a.order < 1:
        raise OrderTooLow("cannot differentiate a series of order 0")
    if not 0 <= var < a.m:
        raise DimensionMismatch(f"variable index {var} out of range for m={a.m}")
    n = 2 * a.m
    slot = var + (a.m if bar else 0)
    step = sp.unit(slot, n)

    def d(part):
        out = {}
        for k, v in part.items():
            e = sp.exponent(k, slot)
            if e:
                out[k - step] = v * e
        return out

    return TruncatedSeries._raw(a.m, a.order - 1, d(a._re), d(a._im))


def _check_substitution(m: int, substitution: Sequence[TruncatedSeries]) -> None:
    if len(substitution) != m:
        raise DimensionMismatch(f"need {m} substitution series, got {len(substitution)}")
    for s in substitution:
        if s.m != m:
            raise DimensionMismatch("substitution series has the wrong dimension")
        if not s.is_holomorphic():
            raise NonHolomorphicSubstitution("substitution series must not involve zbar")
        if s.constant():
            raise ConstantTermPresent("substitution series must vanish at the origin")


def compose_holomorphic(a: TruncatedSeries, substitution: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """``a(w(z), conj(w)(zbar))`` truncated at ``a.order``.

    Evaluated as a bilinear form: terms are grouped by their antiholomorphic
    exponent K, the holomorphic side is substituted first, then each group is
    multiplied by ``conj(w)^K``.
    """
    m = a.m
    _check_substitution(m, substitution)
    order = a.order
    subs = [s.truncate(order) for s in substitution]
    powers: dict = {(0,) * m: one(m, order)}

    def power(J: tuple) -> TruncatedSeries:
        if J not in powers:
            i = max(k for k, e in enumerate(J) if e)
            prev = J[:i] + (J[i] - 1,) + J[i + 1:]
            powers[J] = power(prev) * subs[i]
        return powers[J]

    groups: dict = {}
    for key in a._keys():
        idx = a._index(key)
        groups.setdefault(idx.K, []).append((idx.J, key))

    result = zero(m, order)
    for K in sorted(groups):
        room = order - sum(K)
        hol = zero(m, room)
        for J, key in groups[K]:
            c = GaussianRational(a._re.get(key, 0), a._im.get(key, 0))
            hol = hol + power(J).truncate(room) * c
        result = result + (hol.with_order(order) * power(K).conj())
    return result


def _invert_matrix(mat: list) -> list:
    """Exact Gauss-Jordan inverse of a square matrix of GaussianRational."""
    n = len(mat)
    aug = [[GaussianRational.coerce(x) for x in row] + [GaussianRational(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise SingularLeadingTerm("leading matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def compositional_inverse(substitution: Sequence[TruncatedSeries], order: int | None = None) -> list:
    """Inverse map v with ``w(v(z)) = z`` up to ``order``.

    Fixed-point recursion ``v <- A^{-1}(z - p(v))`` where ``w = A z + p``; each
    pass fixes one more degree.
    """
    m = len(substitution)
    if order is None:
        order = min(s.order for s in substitution)
    _check_substitution(m, substitution)
    subs = [s.truncate(order) for s in substitution]
    lin = [[s.coefficient(tuple(int(k == j) for k in range(m)), (0,) * m) for j in range(m)] for s in subs]
    a_inv = _invert_matrix(lin)
    higher = [s.select(lambda idx: idx.degree >= 2) for s in subs]
    z = identity_substitution(m, order)
    v = [sum((z[j] * a_inv[i][j] for j in range(m)), zero(m, order)) for i in range(m)]
    for _ in range(order):
        pv = [compose_holomorphic(h, v) for h in higher]
        rhs = [z[j] - pv[j] for j in range(m)]
        v = [sum((rhs[j] * a_inv[i][j] for j in range(m)), zero(m, order)) for i in range(m)]
    return v


def _require_zero_constant(a: TruncatedSeries) -> None:
    if a.constant():
        raise NonzeroConstantTerm("series must have zero constant term")


def series_log1p(a: TruncatedSeries) -> TruncatedSeries:
    """Formal ``log(1 + a)``."""
    _require_zero_constant(a)
    result = zero(a.m, a.order)
    p = one(a.m, a.order)
    for n in range(1, a.order + 1):
        p = p * a
        if p.is_zero():
            break
        result = result + p * mpq((-1) ** (n + 1), n)
    return result


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    """Formal ``exp(a)``."""
    _require_zero_constant(a)
    result = one(a.m, a.order)
    p = one(a.m, a.order)
    for n in range(1, a.order + 1):
        p = p * a
        if p.is_zero():
            break
        result = result + p * mpq(1, math.factorial(n))
    return result


# -- potential jets --------------------------------------------------------------

@dataclass(frozen=True)
class PotentialJet:
    """Taylor jet of a real Kähler potential at the base point."""

    series: TruncatedSeries

    def __post_init__(self):
        s = self.series
        if s != s.conj():
            for idx, c in s.terms.items():
                if idx.J == idx.K and not c.is_real():
                    raise RealityViolation(f"coefficient at {idx} is {c}; it must be real")
                if c != s.coefficient(idx.K, idx.J).conj():
                    raise RealityViolation(
                        f"coefficient at {idx} is {c} but at {idx.conjugate()} it is "
                        f"{s.coefficient(idx.K, idx.J)}; they must be conjugate"
                    )

    @property
    def m(self) -> int:
        return self.series.m

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def is_centered(self) -> bool:
        md = self.series.min_degree()
        return md is None or md >= 2

    def quadratic_block(self) -> list:
        m = self.m
        e = [tuple(int(i == j) for i in range(m)) for j in range(m)]
        return [[self.series.coefficient(e[j], e[k]) for k in range(m)] for j in range(m)]

    @property
    def has_mixed_identity(self) -> bool:
        """The ``z_j zbar_k`` block is the identity (pure terms unconstrained)."""
        if self.order < 2:
            return False
        block = self.quadratic_block()
        return all(block[j][k] == int(j == k) for j in range(self.m) for k in range(self.m))

    @property
    def has_identity_quadratic(self) -> bool:
        if not self.has_mixed_identity:
            return False
        return not any(
            idx.degree <= 2 and (idx.hol_degree == 0 or idx.anti_degree == 0)
            for idx in self.series.terms
        )

    def coefficient(self, J, K) -> GaussianRational:
        return self.series.coefficient(J, K)

    def truncate(self, order: int) -> "PotentialJet":
        return PotentialJet(self.series.truncate(order))


def _identity_quadratic_terms(m: int) -> dict:
    out = {}
    for j in range(m):
        e = tuple(int(i == j) for i in range(m))
        out[BidegreeIndex(e, e)] = GaussianRational(1)
    return out


def make_jet(m: int, order: int, coefficients: Mapping | Iterable = (), identity_quadratic: bool = False) -> PotentialJet:
    """Validate coefficients into a :class:`PotentialJet`.

    ``identity_quadratic=True`` adds ``sum_j z_j zbar_j``; the mixed quadratic
    block must then be absent from ``coefficients``.
    """
    items = list(coefficients.items() if isinstance(coefficients, Mapping) else coefficients)
    seen: dict = {}
    for idx, c in items:
        idx = _coerce_index(idx, m)
        if idx in seen:
            raise ValidationError(f"duplicate coefficient for index {idx}")
        if idx.degree > order:
            raise DegreeOverflow(f"term {idx} has degree {idx.degree} > order {order}")
        seen[idx] = GaussianRational.coerce(c)
    if identity_quadratic:
        if order < 2:
            raise OrderTooLow("identity quadratic part needs order >= 2")
        if any(k.hol_degree == 1 and k.anti_degree == 1 for k in seen):
            raise ValidationError("identity_quadratic given together with explicit z_j zbar_k terms")
        seen.update(_identity_quadratic_terms(m))
    return PotentialJet(TruncatedSeries(m, order, seen))


def scale_jet(jet: PotentialJet, t) -> PotentialJet:
    """The jet of ``t^-2 phi(t z)``: degree-d coefficients pick up ``t^(d-2)``."""
    t = as_rational(t)
    if t == 0:
        raise ValidationError("scaling factor must be nonzero")
    return PotentialJet(jet.series.graded_scale(lambda d: t ** (d - 2)))
