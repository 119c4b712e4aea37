"""Invariant suites run over seeded jet batches.

Each suite returns a :class:`SuiteReport`; a failure carries the offending jet
so it can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .corpus import jet_corpus
from .errors import BergmanError, CrossValidationMismatch
from .expansion import compute_expansion, degree_bound, homogeneity_check, tensor_form
from .normal_form import normalize_to_K, verify_K_form
from .numbers import GaussianRational, mpq
from .polynomials import U, UBAR, ScaledPolynomial
from .serialize import jet_to_dict
from .series import PotentialJet
from .tensors import CurvatureData, curvature_data_at_point

__all__ = [
    "SuiteReport",
    "potential_derivative",
    "k_form_order",
    "derivative_identities",
    "expansion_properties",
    "suite_identities",
    "suite_homogeneity",
    "suite_cross",
    "suite_properties",
    "SUITES",
]


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, what: str, jet: Optional[PotentialJet] = None, **extra) -> None:
        entry = {"check": what, **{k: str(v) for k, v in extra.items()}}
        if jet is not None:
            entry["jet"] = jet_to_dict(jet)
        self.failures.append(entry)

    def to_dict(self) -> dict:
        return {"suite": self.name, "checked": self.checked, "passed": self.passed,
                "failures": self.failures, "notes": self.notes}


# -- derivatives of the potential at the base point -----------------------------------

def potential_derivative(jet: PotentialJet, hol: Sequence[int], anti: Sequence[int]) -> GaussianRational:
    """``d^{|hol|+|anti|} phi / dz_hol dzbar_anti`` at 0 (0-based indices)."""
    m = jet.m
    J = [0] * m
    K = [0] * m
    for i in hol:
        J[i] += 1
    for i in anti:
        K[i] += 1
    weight = math.prod(math.factorial(e) for e in J + K)
    return jet.coefficient(tuple(J), tuple(K)) * weight


def k_form_order(jet: PotentialJet) -> int:
    """Largest n <= jet.order for which the jet is in K-form of order n (2 if none)."""
    bad = [idx.degree for idx in verify_K_form(jet, jet.order)[1]]
    return min(bad) - 1 if bad else jet.order


# -- derivatives of phi versus curvature ----------------------------

def _identity_tensors(data: CurvatureData) -> dict:
    """Expected values of the phi-derivatives, keyed by identity label."""
    R = data.R
    out = {"i": -R}
    if data.dR_hol is not None:
        out["ii"] = -data.dR_hol
        out["iii"] = -data.dR_anti
    if data.ddR_mixed is not None:
        out["iv"] = (-data.ddR_mixed
                     + np.einsum("pjkl,ipst->ijklst", R, R)
                     + np.einsum("ijpl,kpst->ijklst", R, R)
                     + np.einsum("ipkt,pjsl->ijklst", R, R))
        out["v"] = -data.ddR_holhol
        out["vi"] = -data.ddR_antianti
    return out


# slot layout of each identity: which tensor slots are holomorphic
_HOL_SLOTS = {
    "i": (0, 2), "ii": (0, 2, 4), "iii": (0, 2), "iv": (0, 2, 4),
    "v": (0, 2, 4, 5), "vi": (0, 2),
}
_NEEDS_K = {"i": 3, "ii": 3, "iii": 3, "iv": 4, "v": 4, "vi": 4}


def derivative_identities(jet: PotentialJet, data: Optional[CurvatureData] = None) -> tuple:
    """Check the six derivative identities that apply at this jet's K-form order.

    Returns ``(checked_labels, failures)``; a failure is ``(label, index, lhs, rhs)``.
    """
    k = k_form_order(jet)
    data = data if data is not None else curvature_data_at_point(jet)
    expected = _identity_tensors(data)
    checked = []
    failures = []
    for label, T in expected.items():
        if k < _NEEDS_K[label]:
            continue
        checked.append(label)
        hol_slots = _HOL_SLOTS[label]
        for index in np.ndindex(*T.shape):
            hol = [index[a] for a in range(len(index)) if a in hol_slots]
            anti = [index[a] for a in range(len(index)) if a not in hol_slots]
            lhs = potential_derivative(jet, hol, anti)
            if lhs != T[index]:
                failures.append((label, index, lhs, T[index]))
    return checked, failures


# -- properties of the coefficients -----------------------------------------------------

def expansion_properties(bs: Sequence[ScaledPolynomial], data: Optional[CurvatureData] = None) -> list:
    """Names of the failed checks among: b1 = 0, Hermitian symmetry, parity,
    degree bounds and (given ``data``) the diagonal values of b2 and b3."""
    bad = []
    for r, b in enumerate(bs, start=1):
        if r == 1 and not b.is_zero():
            bad.append("b1 nonzero")
        if not b.is_hermitian():
            bad.append(f"b{r} not Hermitian")
        if b.negate_arguments() != b * ((-1) ** r):
            bad.append(f"b{r} parity")
        if b.degree() > degree_bound(r):
            bad.append(f"b{r} degree {b.degree()} > {degree_bound(r)}")
    if data is not None and len(bs) >= 2:
        m = data.m
        if bs[1].on_diagonal() != ScaledPolynomial.constant(m, data.rho * mpq(1, 2)):
            bad.append("b2(u,u) != rho/2")
        if len(bs) >= 3 and data.grad_rho is not None:
            hol, anti = data.grad_rho
            want = (tensor_form(hol, (U,), m) + tensor_form(anti, (UBAR,), m)) * mpq(1, 2)
            if bs[2].on_diagonal() != want:
                bad.append("b3(u,u) != grad rho(u + ubar)/2")
    return bad


# -- suites ---------------------------------------------------------------------------

def suite_identities(seed: int = 7, count: int = 20, order: int = 7) -> SuiteReport:
    """K-form corpus jets, plus general jets after normalization to ``order``."""
    rep = SuiteReport("lemma34")
    batches = [("k-form", jet_corpus(seed, count, order=order)),
               ("normalized", jet_corpus(seed + 1, count, order=order, k_form=False))]
    for kind, jets in batches:
        for jet in jets:
            if kind == "normalized":
                jet, _ = normalize_to_K(jet, order)
            checked, failures = derivative_identities(jet)
            rep.checked += 1
            if len(checked) < 6:
                rep.fail(f"only identities {checked} applicable", jet)
            for label, index, lhs, rhs in failures[:1]:
                rep.fail(f"identity ({label}) at {index}", jet, lhs=lhs, rhs=rhs)
    return rep


def suite_cross(seed: int = 1, count: int = 20, r_max: int = 4, order: int = 7) -> SuiteReport:
    rep = SuiteReport("cross")
    for jet in jet_corpus(seed, count, order=order):
        rep.checked += 1
        try:
            compute_expansion(jet, r_max, "both")
        except CrossValidationMismatch as exc:
            rep.fail(str(exc), jet)
    return rep


def suite_homogeneity(seed: int = 3, count: int = 20, r_max: int = 4, ts: Sequence = (2, 3),
                      order: int = 7) -> SuiteReport:
    rep = SuiteReport("homogeneity")
    for jet in jet_corpus(seed, count, order=order):
        base = compute_expansion(jet, r_max, "generic")
        for t in ts:
            report = homogeneity_check(jet, t, r_max, "generic", base=base)
            rep.checked += 1
            for row in report.failures():
                rep.fail(f"t={t} r={row['r']}", jet, **{k: v for k, v in row.items() if k != "r"})
    return rep


def suite_properties(seed: int = 5, count: int = 20, r_max: int = 5, order: int = 7) -> SuiteReport:
    rep = SuiteReport("properties")
    for jet in jet_corpus(seed, count, order=order):
        res = compute_expansion(jet, r_max, "generic")
        data = curvature_data_at_point(res.normalized_jet) if res.normalized_jet.order >= 5 else None
        rep.checked += 1
        for what in expansion_properties(res.bs, data):
            rep.fail(what, jet)
    return rep


SUITES = {
    "lemma34": suite_identities,
    "cross": suite_cross,
    "homogeneity": suite_homogeneity,
    "properties": suite_properties,
}
