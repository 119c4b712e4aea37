"""Bochner normalization of a potential jet to K-coordinates with a K-frame.

After normalization to order ``n`` every term of degree 3..n has at least two
``z`` and at least two ``zbar`` factors.  The linear part of the coordinate
change is pinned to the identity, so no unitary freedom is used.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonIdentityQuadratic, NotCentered, OrderTooLow, ValidationError
from .series import (
    BidegreeIndex,
    PotentialJet,
    TruncatedSeries,
    compose_holomorphic,
    identity_substitution,
    zero,
)

__all__ = ["NormalizationRecord", "normalize_to_K", "verify_K_form", "apply_record"]


@dataclass(frozen=True)
class NormalizationRecord:
    """``phi_new(z) = phi_old(w(z)) - 2 Re h(z)`` up to ``order``.

    ``frame_change`` is h and ``coordinate_change`` is the tuple ``w_1..w_m``.
    """

    frame_change: TruncatedSeries
    coordinate_change: tuple
    order: int

    def __post_init__(self):
        m = self.frame_change.m
        if len(self.coordinate_change) != m:
            raise ValidationError("coordinate change needs one series per dimension")
        if not self.frame_change.is_holomorphic():
            raise ValidationError("frame change must be holomorphic")
        ident = identity_substitution(m, self.order)
        for k, w in enumerate(self.coordinate_change):
            if not w.is_holomorphic() or w.constant():
                raise ValidationError("coordinate change must be holomorphic and fix the origin")
            if w.homogeneous_part(1) != ident[k]:
                raise ValidationError("coordinate change must have identity linear part")

    @classmethod
    def identity(cls, m: int, order: int) -> "NormalizationRecord":
        return cls(zero(m, order), tuple(identity_substitution(m, order)), order)

    @property
    def m(self) -> int:
        return self.frame_change.m

    def is_identity(self) -> bool:
        return self.frame_change.is_zero() and all(
            w == z for w, z in zip(self.coordinate_change, identity_substitution(self.m, self.order))
        )


def _offending(jet: PotentialJet, n: int) -> list:
    return [
        idx for idx in jet.series.terms
        if 3 <= idx.degree <= n and (idx.hol_degree < 2 or idx.anti_degree < 2)
    ]


def verify_K_form(jet: PotentialJet, n: int) -> tuple:
    """``(ok, offending_indices)`` for K-coordinates with a K-frame of order n."""
    bad = _offending(jet, n)
    return (not bad, bad)


def _pure_holomorphic(series: TruncatedSeries, d: int) -> TruncatedSeries:
    return series.select(lambda idx: idx.degree == d and idx.anti_degree == 0)


def _subtract_pluriharmonic(series: TruncatedSeries, h: TruncatedSeries) -> TruncatedSeries:
    return series - h - h.conj()


def normalize_to_K(jet: PotentialJet, n: int) -> tuple:
    """Return ``(normalized_jet, record)`` with the normalized jet of order ``n``.

    Degree by degree from 3 to n: pure (anti)holomorphic terms are absorbed
    into the frame, then the ``|K| = 1`` terms are removed by the coordinate
    change ``z_k <- z_k - sum_J a_{J,e_k} z^J`` and the jet is recomposed.
    Each step only disturbs degrees above the current one.
    """
    if jet.order < n:
        raise OrderTooLow(f"cannot normalize to order {n}: jet has order {jet.order}")
    if n < 2:
        raise OrderTooLow("normalization order must be at least 2")
    if not jet.is_centered:
        raise NotCentered("jet has constant or linear terms")
    if not jet.has_mixed_identity:
        raise NonIdentityQuadratic("the z_j zbar_k block of the jet must be the identity")
    m = jet.m
    phi = jet.series.truncate(n)
    frame = zero(m, n)
    coords = identity_substitution(m, n)

    h2 = _pure_holomorphic(phi, 2)
    if not h2.is_zero():
        frame = frame + h2
        phi = _subtract_pluriharmonic(phi, h2)

    units = [tuple(int(i == k) for i in range(m)) for k in range(m)]
    for d in range(3, n + 1):
        h = _pure_holomorphic(phi, d)
        if not h.is_zero():
            frame = frame + h
            phi = _subtract_pluriharmonic(phi, h)

        shifts = []
        for k in range(m):
            f = TruncatedSeries(
                m, n,
                {BidegreeIndex(idx.J, (0,) * m): c
                 for idx, c in phi.select(lambda idx, k=k: idx.degree == d and idx.K == units[k]).terms.items()},
            )
            shifts.append(f)
        if all(f.is_zero() for f in shifts):
            continue
        w = [coords_k - f for coords_k, f in zip(identity_substitution(m, n), shifts)]
        phi = compose_holomorphic(phi, w)
        coords = [compose_holomorphic(c, w) for c in coords]
        frame = compose_holomorphic(frame, w)

    out = PotentialJet(phi)
    ok, bad = verify_K_form(out, n)
    if not ok:  # pragma: no cover - guarded by the triangular structure
        raise AssertionError(f"normalization left non-K terms {bad}")
    return out, NormalizationRecord(frame, tuple(coords), n)


def apply_record(jet: PotentialJet, record: NormalizationRecord) -> PotentialJet:
    """Compose with the coordinate change, then subtract ``2 Re(frame_change)``.

    Applying a record twice is not the same as once; no idempotence is implied.
    """
    if record.m != jet.m:
        raise ValidationError("record and jet have different dimensions")
    order = min(jet.order, record.order)
    phi = compose_holomorphic(jet.series.truncate(order), [w.truncate(order) for w in record.coordinate_change])
    h = record.frame_change.truncate(order)
    return PotentialJet(_subtract_pluriharmonic(phi, h))
