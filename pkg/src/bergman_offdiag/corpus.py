"""Seeded random potential jets for the verification suites.

Coefficients are Gaussian rationals whose numerators and denominators are
bounded by 10; conjugate terms are added so every jet is real.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .numbers import GaussianRational, mpq
from .series import PotentialJet, make_jet

__all__ = ["random_coefficient", "random_jet", "jet_corpus"]

BOUND = 10


def random_coefficient(rng: np.random.Generator, real: bool = False) -> GaussianRational:
    den = int(rng.integers(1, BOUND + 1))
    re = mpq(int(rng.integers(-BOUND, BOUND + 1)), den)
    if real:
        return GaussianRational(re)
    return GaussianRational(re, mpq(int(rng.integers(-BOUND, BOUND + 1)), int(rng.integers(1, BOUND + 1))))


def _random_index(rng: np.random.Generator, m: int, degree: int, k_form: bool) -> tuple:
    """Holomorphic degree in ``[2, degree - 2]`` for K-form, anything otherwise."""
    split = int(rng.integers(2, degree - 1)) if k_form else int(rng.integers(0, degree + 1))
    J = np.bincount(rng.integers(0, m, size=split), minlength=m)
    K = np.bincount(rng.integers(0, m, size=degree - split), minlength=m)
    return tuple(int(x) for x in J), tuple(int(x) for x in K)


def random_jet(rng: np.random.Generator, m: int, order: int, n_terms: int = 10, k_form: bool = True) -> PotentialJet:
    """A centered jet with identity quadratic part and ``n_terms`` random terms (plus conjugates).

    With ``k_form=True`` every term has degree >= 4 and at least two z and
    two zbar factors; otherwise degrees 3..order with any split.  Each
    allowed degree gets at least one term.
    """
    lo = 4 if k_form else 3
    if order < lo:
        raise ValueError(f"order must be at least {lo}")
    terms: dict = {}
    degrees = list(range(lo, order + 1))
    degrees += [int(d) for d in rng.integers(lo, order + 1, size=max(n_terms - len(degrees), 0))]
    for d in degrees:
        J, K = _random_index(rng, m, d, k_form)
        c = random_coefficient(rng, real=(J == K))
        terms[(J, K)] = c
        terms[(K, J)] = c.conj()
    return make_jet(m, order, terms, identity_quadratic=True)


def jet_corpus(seed: int, count: int, dims: Sequence[int] = (1, 2, 3), order: int = 7,
               k_form: bool = True, n_terms: int = 10) -> list:
    """``count`` jets cycling through ``dims``; the seed fixes the whole batch."""
    rng = np.random.default_rng(seed)
    return [random_jet(rng, dims[i % len(dims)], order, n_terms, k_form) for i in range(count)]
