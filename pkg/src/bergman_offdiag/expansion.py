"""Coefficients b_r of the scaled off-diagonal kernel expansion.

Two independent routes produce ``b_1..b_4``:

* ``closed``: curvature invariants at the base point plugged into the
  explicit formulas for b_2, b_3, b_4;
* ``generic``: the log-kernel coefficients beta_j read off the normalized
  potential and the diagonal coefficients alpha_1, alpha_2, then
  exponentiated.

Only the second route reaches ``b_5``.  Polynomials are in ``(u, v)`` at
``theta_1 = theta_2 = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CrossValidationMismatch,
    InsufficientCurvatureDepth,
    MissingBeta,
    NotKForm,
    OrderTooLow,
    UnsupportedJ,
    ValidationError,
)
from .normal_form import NormalizationRecord, normalize_to_K, verify_K_form
from .numbers import GaussianRational, as_rational, mpq
from .polynomials import U, UBAR, V, VBAR, ScaledPolynomial
from .series import PotentialJet, TruncatedSeries, scale_jet
from .tensors import (
    CurvatureData,
    JetGeometry,
    curvature_data_at_point,
    laplacian_series,
    norm2_series,
    ricci_series,
)

__all__ = [
    "ExpansionResult",
    "HomogeneityReport",
    "sharp",
    "tensor_form",
    "b_closed_form",
    "alpha_series",
    "beta_coefficient",
    "b_from_beta",
    "beta_from_b",
    "compute_expansion",
    "pn_expansion",
    "homogeneity_check",
]

METHODS = ("closed", "generic", "both")
MAX_CLOSED_R = 4
MAX_GENERIC_R = 5
B6_MESSAGE = "b6 requires alpha3 (out of scope)"


def sharp(f: ScaledPolynomial) -> ScaledPolynomial:
    """``f(u, vbar) - f(u, ubar)/2 - f(v, vbar)/2``."""
    return f.sharp()


def tensor_form(T: np.ndarray, blocks: Sequence[int], m: int, coeff=1) -> ScaledPolynomial:
    """``coeff * sum T[i1..ik] x1_{i1} ... xk_{ik}`` where slot ``a`` uses variable block ``blocks[a]``."""
    acc: dict = {}
    for index in itertools.product(range(m), repeat=len(blocks)):
        c = T[index]
        if not c:
            continue
        exps = [[0] * m for _ in range(4)]
        for b, i in zip(blocks, index):
            exps[b][i] += 1
        key = tuple(tuple(e) for e in exps)
        acc[key] = acc.get(key, 0) + c
    return ScaledPolynomial(m, {k: v for k, v in acc.items() if v}) * coeff


# -- closed forms ------------------------------------------------------------------

_DEPTH_FOR_R = {1: 0, 2: 0, 3: 1, 4: 2}


def _S(data: CurvatureData) -> ScaledPolynomial:
    return tensor_form(data.R, (U, VBAR, U, VBAR), data.m, -1)


def _L(data: CurvatureData) -> ScaledPolynomial:
    m = data.m
    return (tensor_form(data.dR_hol, (U, VBAR, U, VBAR, U), m, -1)
            + tensor_form(data.dR_anti, (U, VBAR, U, VBAR, VBAR), m, -1))


def _K1(data: CurvatureData) -> ScaledPolynomial:
    R = data.R
    T = (-data.ddR_mixed
         + np.einsum("pjkl,ipst->ijklst", R, R)
         + np.einsum("ijpl,kpst->ijklst", R, R)
         + np.einsum("ipkt,pjsl->ijklst", R, R))
    return tensor_form(T, (U, VBAR, U, VBAR, U, VBAR), data.m)


def _K2(data: CurvatureData) -> ScaledPolynomial:
    m = data.m
    return (tensor_form(data.ddR_holhol, (U, VBAR, U, VBAR, U, U), m, -1)
            + tensor_form(data.ddR_antianti, (U, VBAR, U, VBAR, VBAR, VBAR), m, -1))


def _grad_rho(data: CurvatureData) -> ScaledPolynomial:
    hol, anti = data.grad_rho
    return tensor_form(hol, (U,), data.m) + tensor_form(anti, (VBAR,), data.m)


def _hess_rho(data: CurvatureData) -> ScaledPolynomial:
    hh, ha, aa = data.hess_rho
    m = data.m
    return tensor_form(hh, (U, U), m) + tensor_form(ha, (U, VBAR), m, 2) + tensor_form(aa, (VBAR, VBAR), m)


def b_closed_form(data: CurvatureData, r: int) -> ScaledPolynomial:
    """b_r for r = 1..4 from curvature invariants at the base point."""
    if r not in _DEPTH_FOR_R:
        raise UnsupportedJ(f"closed forms exist for r = 1..4, not r = {r}")
    if data.depth < _DEPTH_FOR_R[r]:
        raise InsufficientCurvatureDepth(
            f"b{r} needs covariant derivatives of order {_DEPTH_FOR_R[r]}; data has {data.depth}"
        )
    m = data.m
    if r == 1:
        return ScaledPolynomial.zero(m)
    half = mpq(1, 2)
    S_sharp = _S(data).sharp()
    if r == 2:
        return ScaledPolynomial.constant(m, data.rho * half) + S_sharp * mpq(1, 4)
    if r == 3:
        return _grad_rho(data) * half + _L(data).sharp() * mpq(1, 12)
    q = ScaledPolynomial.constant(m, data.rho) + S_sharp * half
    const = data.lap_rho * mpq(1, 3) + (data.normR2 - data.normRic2 * 4) * mpq(1, 24)
    return (
        ScaledPolynomial.constant(m, const)
        + _hess_rho(data) * mpq(1, 4)
        + _K1(data).sharp() * mpq(1, 36)
        + _K2(data).sharp() * mpq(1, 48)
        + q * q * mpq(1, 8)
    )


# -- generic route -------------------------------------------------------------------

def alpha_series(jet: PotentialJet, r: int, geometry: Optional[JetGeometry] = None) -> TruncatedSeries:
    """Diagonal log-coefficient ``alpha_r`` as a function of z.

    ``alpha_1 = rho/2`` has order ``jet.order - 4``;
    ``alpha_2 = Lap(rho)/3 + |R|^2/24 - |Ric|^2/6`` has order ``jet.order - 6``.
    All contractions use the full inverse-metric series.
    """
    geom = geometry if geometry is not None else JetGeometry(jet)
    if r == 1:
        if jet.order < 4:
            raise OrderTooLow("alpha_1 needs jet order >= 4")
        return geom.scalar_curvature(jet.order - 4) * mpq(1, 2)
    if r == 2:
        if jet.order < 6:
            raise OrderTooLow("alpha_2 needs jet order >= 6")
        order = jet.order - 6
        rho = geom.scalar_curvature(jet.order - 4)
        ginv = geom.inverse_metric
        lap = laplacian_series(rho, ginv.truncate(order))
        R = geom.curvature(order)
        g0 = ginv.truncate(order)
        normR = norm2_series(R, g0)
        normRic = norm2_series(ricci_series(R, g0), g0)
        return lap * mpq(1, 3) + normR * mpq(1, 24) - normRic * mpq(1, 6)
    raise UnsupportedJ(f"alpha_{r} is not available (only alpha_1, alpha_2)")


def _uvbar(series: TruncatedSeries, degree: int) -> ScaledPolynomial:
    """Degree-``degree`` Taylor part ``sum c z^P zbar^Q`` as ``sum c u^P vbar^Q``."""
    part = series.homogeneous_part(degree)
    return ScaledPolynomial.from_uvbar(series.m, {(idx.J, idx.K): c for idx, c in part.terms.items()})


class _GenericPipeline:
    def __init__(self, jet: PotentialJet):
        self.jet = jet
        self.geometry = JetGeometry(jet)
        self._alpha: dict = {}

    def alpha(self, r: int) -> TruncatedSeries:
        if r not in self._alpha:
            self._alpha[r] = alpha_series(self.jet, r, self.geometry)
        return self._alpha[r]

    def beta(self, j: int) -> ScaledPolynomial:
        out = _uvbar(self.jet.series, j + 2).sharp()
        for r in range(1, j // 2 + 1):
            out = out + _uvbar(self.alpha(r), j - 2 * r)
        return out


def _check_beta_request(jet: PotentialJet, j: int) -> None:
    if j >= 6:
        raise UnsupportedJ(f"beta_{j} requires alpha3 (out of scope)")
    if j < 2:
        raise UnsupportedJ("beta_j is defined for j >= 2")
    if jet.order < j + 2:
        raise OrderTooLow(f"beta_{j} needs jet order >= {j + 2}, got {jet.order}")
    ok, bad = verify_K_form(jet, j + 2)
    if not ok:
        raise NotKForm(f"jet is not in K-form to order {j + 2}; offending terms {bad[:5]}")


def beta_coefficient(jet_normalized: PotentialJet, j: int) -> ScaledPolynomial:
    """Log-kernel coefficient beta_j (j = 2..5) for a jet in K-form of order >= j + 2."""
    _check_beta_request(jet_normalized, j)
    return _GenericPipeline(jet_normalized.truncate(j + 2)).beta(j)


def b_from_beta(betas: Sequence[ScaledPolynomial], r_max: Optional[int] = None) -> list:
    """Coefficients of ``exp(sum_j eps^j beta_j) = 1 + sum_r eps^r b_r``.

    ``betas[0]`` is beta_2.  Returns ``[b_1, ..., b_{r_max}]`` with b_1 = 0.
    Uses ``r b_r = sum_j j beta_j b_{r-j}``.
    """
    if r_max is None:
        r_max = len(betas) + 1
    if len(betas) < r_max - 1:
        raise MissingBeta(f"b_{r_max} needs beta_2..beta_{r_max}; got {len(betas)} betas")
    if r_max < 1:
        return []
    m = betas[0].m if betas else 1
    beta = {j: betas[j - 2] for j in range(2, r_max + 1)}
    b = [ScaledPolynomial.constant(m, 1)]
    for r in range(1, r_max + 1):
        acc = ScaledPolynomial.zero(m)
        for j in range(2, r + 1):
            acc = acc + beta[j] * b[r - j] * j
        b.append(acc * mpq(1, r))
    return b[1:]


def beta_from_b(bs: Sequence[ScaledPolynomial]) -> list:
    """Inverse of :func:`b_from_beta`: ``[beta_2, ...]`` from ``[b_1, b_2, ...]``."""
    if not bs:
        return []
    m = bs[0].m
    b = [ScaledPolynomial.constant(m, 1)] + list(bs)
    beta: dict = {}
    for r in range(2, len(bs) + 1):
        acc = b[r] * r
        for j in range(2, r):
            acc = acc - beta[j] * b[r - j] * j
        beta[r] = acc * mpq(1, r)
    return [beta[j] for j in range(2, len(bs) + 1)]


# -- driver ------------------------------------------------------------------------

@dataclass
class ExpansionResult:
    """``bs[r - 1]`` is b_r; ``betas[j - 2]`` is beta_j."""

    betas: list
    bs: list
    method: str
    jet_digest: str
    normalization_order: int
    record: NormalizationRecord
    single_method: tuple = ()
    normalized_jet: Optional[PotentialJet] = field(default=None, repr=False)

    @property
    def r_max(self) -> int:
        return len(self.bs)

    def b(self, r: int) -> ScaledPolynomial:
        return self.bs[r - 1]

    def beta(self, j: int) -> ScaledPolynomial:
        return self.betas[j - 2]


def _first_difference(a: ScaledPolynomial, b: ScaledPolynomial):
    diff = a - b
    idx, _ = next(iter(diff.terms.items()))
    return idx, a.terms.get(idx, GaussianRational(0)), b.terms.get(idx, GaussianRational(0))


def _validate_request(r_max: int, method: str) -> None:
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")
    if r_max >= 6:
        raise UnsupportedJ(B6_MESSAGE)
    if r_max < 1:
        raise ValidationError("r_max must be at least 1")
    if method == "closed" and r_max > MAX_CLOSED_R:
        raise UnsupportedJ("closed forms cover r <= 4; use the generic method for b5")


def compute_expansion(jet: PotentialJet, r_max: int, method: str = "both") -> ExpansionResult:
    """Normalize to order ``r_max + 2`` and compute b_1..b_{r_max}.

    With ``method="both"`` the two routes must agree exactly on every
    ``r <= 4``; b_5 comes from the generic route alone and is listed in
    ``single_method``.
    """
    from .serialize import jet_digest

    _validate_request(r_max, method)
    n = r_max + 2
    if jet.order < n:
        raise OrderTooLow(f"b{r_max} needs a jet of order >= {n}, got {jet.order}")
    normalized, record = normalize_to_K(jet, n)
    m = jet.m

    generic = closed = None
    if method in ("generic", "both"):
        pipe = _GenericPipeline(normalized)
        betas = [pipe.beta(j) for j in range(2, r_max + 1)]
        generic = b_from_beta(betas, r_max)
    if method in ("closed", "both"):
        r_closed = min(r_max, MAX_CLOSED_R)
        if r_closed >= 2:
            data = curvature_data_at_point(normalized)
            closed = [b_closed_form(data, r) for r in range(1, r_closed + 1)]
        else:
            closed = [ScaledPolynomial.zero(m)]

    if generic is not None and closed is not None:
        for r, (c, g) in enumerate(zip(closed, generic), start=1):
            if c != g:
                mono, cc, gc = _first_difference(c, g)
                raise CrossValidationMismatch(r, mono, cc, gc)
    bs = generic if generic is not None else closed
    single = (5,) if (method == "both" and r_max == 5) else ()
    if generic is None:
        betas = beta_from_b(bs)
    return ExpansionResult(
        betas=betas,
        bs=bs,
        method=method,
        jet_digest=jet_digest(jet),
        normalization_order=n,
        record=record,
        single_method=single,
        normalized_jet=normalized,
    )


# -- normalized kernel ----------------------------------------------------------------

def pn_expansion(data: CurvatureData) -> tuple:
    """Corrections to ``P_N(u/sqrt N, v/sqrt N) e^{|u-v|^2/2}`` at orders 1/N and N^{-3/2}.

    Returns ``(Re S#/4, Re L#/12)`` with Re the real part of the function.
    """
    if data.depth < 1:
        raise InsufficientCurvatureDepth("the N^{-3/2} term needs first covariant derivatives of R")
    first = _S(data).sharp().real_part() * mpq(1, 4)
    second = _L(data).sharp().real_part() * mpq(1, 12)
    return first, second


# -- scaling ---------------------------------------------------------------------------

@dataclass
class HomogeneityReport:
    """Per-r outcome of the scaling, parity and degree checks."""

    t: object
    rows: list

    @property
    def passed(self) -> bool:
        return all(row["scaling"] and row["parity"] and row["degree"] for row in self.rows)

    def failures(self) -> list:
        return [row for row in self.rows if not (row["scaling"] and row["parity"] and row["degree"])]


def degree_bound(r: int) -> int:
    return 2 * r if r % 2 == 0 else 2 * r - 1


def homogeneity_check(jet: PotentialJet, t, r_max: int, method: str = "generic",
                      base: Optional[ExpansionResult] = None) -> HomogeneityReport:
    """Compare ``b_r`` of ``t^-2 phi(t z)`` with ``t^r b_r`` and check parity and degree."""
    t = as_rational(t)
    if base is None:
        base = compute_expansion(jet, r_max, method)
    scaled = compute_expansion(scale_jet(jet, t), r_max, method)
    rows = []
    for r in range(1, r_max + 1):
        b = base.b(r)
        expected = b * (t ** r)
        got = scaled.b(r)
        row = {
            "r": r,
            "scaling": got == expected,
            "parity": b.negate_arguments() == b * ((-1) ** r),
            "degree": b.degree() <= degree_bound(r),
            "degree_value": b.degree(),
        }
        if not row["scaling"]:
            row["witness"] = _first_difference(got, expected)
        rows.append(row)
    return HomogeneityReport(t=t, rows=rows)
