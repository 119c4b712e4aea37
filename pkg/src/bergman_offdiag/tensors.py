"""Metric, Christoffel symbols, curvature and covariant derivatives of a jet.

Conventions, for a potential ``phi`` with ``omega = (i/2) dd-bar phi``:

* ``g[i, j]``       = g_{i jbar}       = d^2 phi / dz_i dzbar_j
* ``g_inv[p, q]``   = g^{p qbar}, with  sum_q g^{p qbar} g_{i qbar} = delta_{pi}
* ``gamma[i, j, k]``= Gamma^i_{jk}      = g^{i lbar} d g_{j lbar} / dz_k
* ``R[i, j, k, l]`` = R_{i jbar k lbar} = -d_k d_lbar g_{i jbar}
                                          + g^{p qbar} d_k g_{i qbar} d_lbar g_{p jbar}

Tensor components are :class:`~bergman_offdiag.series.TruncatedSeries` held in
numpy object arrays.  Only lower-index tensors are differentiated; indices
are raised with the full inverse-metric series when a scalar is needed as a
function, and against ``delta`` at the base point otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import NonIdentityQuadratic, OrderTooLow, UnsupportedSignature
from .numbers import GaussianRational
from .series import PotentialJet, TruncatedSeries, _invert_matrix, partial_derivative, zero

HOL = "h"
ANTI = "a"
HOL_UP = "H"
ANTI_UP = "A"

_LETTERS = "abcdefghijklmnopqr"


@dataclass(frozen=True, eq=False)
class TensorSeries:
    signature: tuple
    components: np.ndarray
    m: int

    def __post_init__(self):
        if self.components.shape != (self.m,) * len(self.signature):
            raise ValueError("component array shape does not match the signature")

    @property
    def rank(self) -> int:
        return len(self.signature)

    @property
    def order(self) -> int:
        return min(c.order for c in self.components.flat)

    def __getitem__(self, idx) -> TruncatedSeries:
        return self.components[idx]

    def map(self, f) -> "TensorSeries":
        out = np.empty(self.components.shape, dtype=object)
        for idx in np.ndindex(out.shape):
            out[idx] = f(self.components[idx])
        return TensorSeries(self.signature, out, self.m)

    def truncate(self, order: int) -> "TensorSeries":
        return self.map(lambda c: c.truncate(order))

    def conj(self) -> "TensorSeries":
        """Componentwise conjugate; holomorphic and antiholomorphic slots swap roles."""
        swap = {HOL: ANTI, ANTI: HOL, HOL_UP: ANTI_UP, ANTI_UP: HOL_UP}
        t = self.map(lambda c: c.conj())
        return TensorSeries(tuple(swap[s] for s in self.signature), t.components, self.m)

    def at_origin(self) -> np.ndarray:
        out = np.empty(self.components.shape, dtype=object)
        for idx in np.ndindex(out.shape):
            out[idx] = self.components[idx].constant()
        return out

    def __eq__(self, other):
        if not isinstance(other, TensorSeries) or other.signature != self.signature:
            return False
        return all(a == b for a, b in zip(self.components.flat, other.components.flat))

    __hash__ = None


def _array(shape, fill) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(shape):
        out[idx] = fill(*idx)
    return out


def metric_from_potential(jet: PotentialJet) -> TensorSeries:
    if jet.order < 2:
        raise OrderTooLow("the metric needs a jet of order >= 2")
    m = jet.m
    dz = [partial_derivative(jet.series, i) for i in range(m)]
    comps = _array((m, m), lambda i, j: partial_derivative(dz[i], j, bar=True))
    return TensorSeries((HOL, ANTI), comps, m)


def inverse_metric(g: TensorSeries) -> TensorSeries:
    """g^{p qbar} by a geometric series around the constant term."""
    if g.signature != (HOL, ANTI):
        raise UnsupportedSignature("inverse_metric expects a (hol, anti) lower-index metric")
    m = g.m
    order = g.order
    # the sum over q pairs g_inv with the transpose of g
    gt = g.components.T
    lead = [[gt[i, j].constant() for j in range(m)] for i in range(m)]
    lead_inv = _invert_matrix(lead)
    lead_inv_arr = _array((m, m), lambda i, j: zero(m, order) + lead_inv[i][j])
    pert = _array((m, m), lambda i, j: gt[i, j] - lead[i][j])
    step = -np.dot(lead_inv_arr, pert)
    term = lead_inv_arr
    total = lead_inv_arr
    for _ in range(order):
        term = np.dot(step, term)
        if all(c.is_zero() for c in term.flat):
            break
        total = total + term
    return TensorSeries((HOL_UP, ANTI_UP), total, m)


def christoffel(g: TensorSeries, g_inv: TensorSeries) -> TensorSeries:
    """Gamma^i_{jk} = g^{i lbar} d_k g_{j lbar}, stored as ``[i, j, k]``."""
    m = g.m
    dg = _array((m, m, m), lambda j, l, k: partial_derivative(g[j, l], k))
    comps = np.einsum("il,jlk->ijk", g_inv.components, dg)
    return TensorSeries((HOL_UP, HOL, HOL), comps, m)


def _curvature_from(g: TensorSeries, gamma: TensorSeries, order: Optional[int] = None) -> TensorSeries:
    m = g.m
    if order is not None:
        g = g.truncate(order + 2)
        gamma = gamma.truncate(order)
    dbar_g = _array((m, m, m), lambda p, j, l: partial_derivative(g[p, j], l, bar=True))
    second = _array(
        (m, m, m, m),
        lambda i, j, k, l: partial_derivative(partial_derivative(g[i, j], k), l, bar=True),
    )
    # Gamma^p_{ik} d_lbar g_{p jbar} equals g^{p qbar} d_k g_{i qbar} d_lbar g_{p jbar}
    quad = np.einsum("pik,pjl->ijkl", gamma.components, dbar_g)
    return TensorSeries((HOL, ANTI, HOL, ANTI), quad - second, m)


def curvature_series(jet: PotentialJet, order: Optional[int] = None) -> TensorSeries:
    """R_{i jbar k lbar} as series of order ``jet.order - 4`` (or less if asked)."""
    if jet.order < 4:
        raise OrderTooLow("curvature needs a jet of order >= 4")
    geom = JetGeometry(jet)
    return geom.curvature(order)


def covariant_derivative(T: TensorSeries, gamma: TensorSeries, bar: bool = False) -> TensorSeries:
    """Append one lower slot: ``T_{...,s}`` (bar=False) or ``T_{...,sbar}``."""
    if any(s not in (HOL, ANTI) for s in T.signature):
        raise UnsupportedSignature("covariant_derivative handles lower-index tensors only")
    m = T.m
    rank = T.rank
    target = ANTI if bar else HOL
    conn = gamma.conj().components if bar else gamma.components
    deriv = np.empty((m,) * (rank + 1), dtype=object)
    for idx in np.ndindex(T.components.shape):
        for s in range(m):
            deriv[idx + (s,)] = partial_derivative(T.components[idx], s, bar=bar)
    result = deriv
    letters = _LETTERS[:rank]
    for axis, slot in enumerate(T.signature):
        if slot != target:
            continue
        t_sub = letters[:axis] + "x" + letters[axis + 1:]
        spec = f"x{letters[axis]}s,{t_sub}->{letters}s"
        result = result - np.einsum(spec, conn, T.components)
    return TensorSeries(T.signature + (target,), result, m)


# -- scalar contractions as series ------------------------------------------------

def ricci_series(R: TensorSeries, g_inv: TensorSeries) -> TensorSeries:
    """Ric_{i jbar} = g^{k lbar} R_{i jbar k lbar}."""
    comps = np.einsum("kl,ijkl->ij", g_inv.components, R.components)
    return TensorSeries((HOL, ANTI), comps, R.m)


def trace_series(h: TensorSeries, g_inv: TensorSeries) -> TruncatedSeries:
    """g^{i jbar} h_{i jbar}."""
    return np.einsum("ij,ij->", g_inv.components, h.components)


def norm2_series(T: TensorSeries, g_inv: TensorSeries) -> TruncatedSeries:
    """Full contraction of a (hol, anti, hol, anti, ...) tensor with its conjugate.

    ``|T|^2 = T_{i jbar ...} T_{p qbar ...} g^{i qbar} g^{p jbar} ...``, which is
    ``sum |T_{i jbar ...}|^2`` where the metric is the identity.
    """
    if any(s not in (HOL, ANTI) for s in T.signature) or len(T.signature) % 2:
        raise UnsupportedSignature("norm2_series expects paired lower indices")
    pairs = len(T.signature) // 2
    first = _LETTERS[: 2 * pairs]
    second = _LETTERS[2 * pairs: 4 * pairs]
    metric_terms = []
    for k in range(pairs):
        i, j = first[2 * k], first[2 * k + 1]
        p, q = second[2 * k], second[2 * k + 1]
        metric_terms += [i + q, p + j]
    spec = ",".join([first] + metric_terms + [second]) + "->"
    ops = [T.components] + [g_inv.components] * (2 * pairs) + [T.components]
    return np.einsum(spec, *ops, optimize="greedy")


def laplacian_series(f: TruncatedSeries, g_inv: TensorSeries) -> TruncatedSeries:
    """g^{s tbar} d_s d_tbar f for a scalar ``f``."""
    m = f.m
    total = zero(m, f.order - 2)
    for s in range(m):
        ds = partial_derivative(f, s)
        for t in range(m):
            total = total + g_inv[s, t] * partial_derivative(ds, t, bar=True)
    return total


# -- cached geometry of one jet ------------------------------------------------------

class JetGeometry:
    """Lazily computed metric data for one jet, shared between callers."""

    def __init__(self, jet: PotentialJet):
        self.jet = jet
        self.m = jet.m
        self._curv: dict = {}

    @cached_property
    def metric(self) -> TensorSeries:
        return metric_from_potential(self.jet)

    @cached_property
    def inverse_metric(self) -> TensorSeries:
        return inverse_metric(self.metric)

    @cached_property
    def christoffel(self) -> TensorSeries:
        return christoffel(self.metric, self.inverse_metric)

    def curvature(self, order: Optional[int] = None) -> TensorSeries:
        full = self.jet.order - 4
        if full < 0:
            raise OrderTooLow("curvature needs a jet of order >= 4")
        order = full if order is None else min(order, full)
        if order not in self._curv:
            bigger = [k for k in self._curv if k > order]
            if bigger:
                self._curv[order] = self._curv[min(bigger)].truncate(order)
            else:
                self._curv[order] = _curvature_from(self.metric, self.christoffel, order)
        return self._curv[order]

    def scalar_curvature(self, order: int) -> TruncatedSeries:
        R = self.curvature(order)
        ginv = self.inverse_metric.truncate(order)
        return trace_series(ricci_series(R, ginv), ginv)


# -- point data -----------------------------------------------------------------------

def _gr_abs2(x: GaussianRational) -> GaussianRational:
    return GaussianRational(x.norm2())


@dataclass
class CurvatureData:
    """Curvature quantities at the base point; derivative fields may be None.

    Index order of arrays follows the names: ``dR[i, j, k, l, s]`` is
    R_{i jbar k lbar, s}; ``ddR_mixed[..., s, t]`` is R_{..., s tbar}.
    ``hess_rho`` holds the blocks ``(rho_{,st}, rho_{,s tbar}, rho_{,sbar tbar})``.
    """

    m: int
    R: np.ndarray
    Ric: np.ndarray
    rho: GaussianRational
    normR2: GaussianRational
    normRic2: GaussianRational
    dR_hol: Optional[np.ndarray] = None
    dR_anti: Optional[np.ndarray] = None
    grad_rho: Optional[tuple] = None
    ddR_mixed: Optional[np.ndarray] = None
    ddR_holhol: Optional[np.ndarray] = None
    ddR_antianti: Optional[np.ndarray] = None
    hess_rho: Optional[tuple] = None
    lap_rho: Optional[GaussianRational] = None
    absent: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        """0: curvature only, 1: plus first derivatives, 2: plus second derivatives."""
        if self.ddR_mixed is not None:
            return 2
        if self.dR_hol is not None:
            return 1
        return 0


FIELD_ORDERS = {
    "R": 4, "Ric": 4, "rho": 4, "normR2": 4, "normRic2": 4,
    "dR_hol": 5, "dR_anti": 5, "grad_rho": 5,
    "ddR_mixed": 6, "ddR_holhol": 6, "ddR_antianti": 6, "hess_rho": 6, "lap_rho": 6,
}


def curvature_data_at_point(jet: PotentialJet, geometry: Optional[JetGeometry] = None) -> CurvatureData:
    if jet.order < 4:
        raise OrderTooLow(
            "curvature data needs jet order >= 4 (R, Ric, rho, norms); "
            ">= 5 for first derivatives; >= 6 for second derivatives"
        )
    if not jet.has_mixed_identity:
        raise NonIdentityQuadratic("the z_j zbar_k block of the jet must be the identity")
    geom = geometry if geometry is not None else JetGeometry(jet)
    m = jet.m
    depth = min(jet.order - 4, 2)
    R = geom.curvature(depth)
    gamma = geom.christoffel.truncate(max(depth - 1, 0))
    R0 = R.at_origin()
    Ric0 = _array((m, m), lambda i, j: sum((R0[i, k, k, j] for k in range(m)), GaussianRational(0)))
    rho = sum((Ric0[i, i] for i in range(m)), GaussianRational(0))
    normR2 = sum((_gr_abs2(x) for x in R0.flat), GaussianRational(0))
    normRic2 = sum((_gr_abs2(x) for x in Ric0.flat), GaussianRational(0))
    data = CurvatureData(m=m, R=R0, Ric=Ric0, rho=rho, normR2=normR2, normRic2=normRic2)
    data.absent = [name for name, need in FIELD_ORDERS.items() if jet.order < need]
    if depth == 0:
        return data

    dR = covariant_derivative(R, gamma, bar=False)
    dRb = covariant_derivative(R, gamma, bar=True)
    data.dR_hol = dR.at_origin()
    data.dR_anti = dRb.at_origin()
    rho_s = geom.scalar_curvature(depth)
    grad = TensorSeries((HOL,), _array((m,), lambda s: partial_derivative(rho_s, s)), m)
    grad_b = TensorSeries((ANTI,), _array((m,), lambda s: partial_derivative(rho_s, s, bar=True)), m)
    data.grad_rho = (grad.at_origin(), grad_b.at_origin())
    if depth == 1:
        return data

    data.ddR_mixed = covariant_derivative(dR, gamma, bar=True).at_origin()
    data.ddR_holhol = covariant_derivative(dR, gamma, bar=False).at_origin()
    data.ddR_antianti = covariant_derivative(dRb, gamma, bar=True).at_origin()
    h_hh = covariant_derivative(grad, gamma, bar=False).at_origin()
    h_ha = covariant_derivative(grad, gamma, bar=True).at_origin()
    h_aa = covariant_derivative(grad_b, gamma, bar=True).at_origin()
    data.hess_rho = (h_hh, h_ha, h_aa)
    data.lap_rho = sum((h_ha[s, s] for s in range(m)), GaussianRational(0))
    return data
