"""JSON (and plain-text) encodings of jets, series, records and results.

Rationals are strings ``"p/q"``; every list is emitted in a fixed order so
that equal objects serialize to identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .errors import ValidationError
from .normal_form import NormalizationRecord
from .numbers import GaussianRational, format_rational, parse_rational
from .polynomials import QuadIndex, ScaledPolynomial
from .series import PotentialJet, TruncatedSeries, make_jet

__all__ = [
    "jet_to_dict",
    "jet_from_dict",
    "series_to_dict",
    "series_from_dict",
    "record_to_dict",
    "record_from_dict",
    "polynomial_to_dict",
    "polynomial_from_dict",
    "curvature_to_dict",
    "expansion_to_dict",
    "jet_digest",
    "dumps",
    "load_jet",
]


def _coeff_fields(c: GaussianRational) -> dict:
    return {"re": format_rational(c.re), "im": format_rational(c.im)}


def _coeff_from(entry: dict) -> GaussianRational:
    try:
        return GaussianRational(parse_rational(str(entry.get("re", "0"))), parse_rational(str(entry.get("im", "0"))))
    except ValueError as exc:
        raise ValidationError(f"bad coefficient in {entry}: {exc}") from None


# -- series and jets ----------------------------------------------------------------

def series_to_dict(s: TruncatedSeries) -> dict:
    return {
        "m": s.m,
        "order": s.order,
        "terms": [{"J": list(idx.J), "K": list(idx.K), **_coeff_fields(c)} for idx, c in s.terms.items()],
    }


def _terms_from(d: dict) -> list:
    out = []
    for t in d.get("terms", []):
        if "J" not in t or "K" not in t:
            raise ValidationError(f"term {t} lacks J or K")
        out.append(((tuple(t["J"]), tuple(t["K"])), _coeff_from(t)))
    return out


def _header(d: dict) -> tuple:
    try:
        return int(d["m"]), int(d["order"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("expected integer fields 'm' and 'order'") from None


def series_from_dict(d: dict) -> TruncatedSeries:
    m, order = _header(d)
    return TruncatedSeries(m, order, _terms_from(d))


def jet_to_dict(jet: PotentialJet) -> dict:
    return series_to_dict(jet.series)


def jet_from_dict(d: dict) -> PotentialJet:
    m, order = _header(d)
    return make_jet(m, order, _terms_from(d), identity_quadratic=bool(d.get("identity_quadratic", False)))


def load_jet(path: str) -> PotentialJet:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return jet_from_dict(data)


def jet_digest(jet: PotentialJet) -> str:
    """sha256 of the canonical JSON of the jet."""
    return hashlib.sha256(dumps(jet_to_dict(jet)).encode()).hexdigest()


# -- records -----------------------------------------------------------------------

def record_to_dict(record: NormalizationRecord) -> dict:
    return {
        "frame_change": series_to_dict(record.frame_change),
        "coordinate_change": [series_to_dict(w) for w in record.coordinate_change],
        "order": record.order,
    }


def record_from_dict(d: dict) -> NormalizationRecord:
    return NormalizationRecord(
        series_from_dict(d["frame_change"]),
        tuple(series_from_dict(w) for w in d["coordinate_change"]),
        int(d["order"]),
    )


# -- polynomials -------------------------------------------------------------------

def polynomial_to_dict(p: ScaledPolynomial) -> dict:
    return {
        "m": p.m,
        "terms": [
            {"u": list(idx.u), "ubar": list(idx.ubar), "v": list(idx.v), "vbar": list(idx.vbar), **_coeff_fields(c)}
            for idx, c in p.terms.items()
        ],
    }


def polynomial_from_dict(d: dict) -> ScaledPolynomial:
    m = int(d["m"])
    return ScaledPolynomial(
        m,
        [(QuadIndex(tuple(t["u"]), tuple(t["ubar"]), tuple(t["v"]), tuple(t["vbar"])), _coeff_from(t))
         for t in d.get("terms", [])],
    )


# -- curvature data ------------------------------------------------------------------

def _tensor_entries(name: str, arr: np.ndarray) -> dict:
    out = {}
    for index in np.ndindex(*arr.shape):
        c = arr[index]
        if c:
            out[f"{name}[{','.join(str(i + 1) for i in index)}]"] = _coeff_fields(c)
    return out


def curvature_to_dict(data) -> dict:
    """Nonzero tensor entries keyed like ``"R[1,1,2,2]"`` (1-based, order i, jbar, k, lbar, ...)."""
    out: dict[str, Any] = {"m": data.m, "absent": list(data.absent)}
    scalars = {"rho": data.rho, "normR2": data.normR2, "normRic2": data.normRic2, "lap_rho": data.lap_rho}
    out["scalars"] = {k: _coeff_fields(v) for k, v in scalars.items() if v is not None}
    tensors = {"R": data.R, "Ric": data.Ric, "dR_hol": data.dR_hol, "dR_anti": data.dR_anti,
               "ddR_mixed": data.ddR_mixed, "ddR_holhol": data.ddR_holhol, "ddR_antianti": data.ddR_antianti}
    if data.grad_rho is not None:
        tensors["grad_rho_hol"], tensors["grad_rho_anti"] = data.grad_rho
    if data.hess_rho is not None:
        tensors["hess_rho_hh"], tensors["hess_rho_ha"], tensors["hess_rho_aa"] = data.hess_rho
    out["tensors"] = {name: _tensor_entries(name, arr) for name, arr in tensors.items() if arr is not None}
    return out


# -- expansion results --------------------------------------------------------------

def expansion_to_dict(result) -> dict:
    return {
        "method": result.method,
        "jet_digest": result.jet_digest,
        "normalization_order": result.normalization_order,
        "single_method": [f"b{r}" for r in result.single_method],
        "betas": {f"beta{j}": polynomial_to_dict(p) for j, p in enumerate(result.betas, start=2)},
        "bs": {f"b{r}": polynomial_to_dict(p) for r, p in enumerate(result.bs, start=1)},
        "record": record_to_dict(result.record),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
