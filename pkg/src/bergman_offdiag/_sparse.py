"""Packed-monomial sparse arithmetic shared by series and polynomials.

A monomial in ``n`` variables is packed into one Python int: exponent ``i``
occupies bits ``[8i, 8i+8)`` and the total degree sits in the digit above the
last variable.  Multiplying monomials is then integer addition (exponent sums
stay below 256, so digits never carry), integer order is graded order, and
truncating to total degree ``d`` is the test ``key < (d + 1) << (8 n)``.

Coefficients are kept as two dicts ``re`` and ``im`` of mpq values, so real
inputs never pay for complex multiplication.
"""

from __future__ import annotations

from functools import lru_cache

SHIFT = 8
MASK = (1 << SHIFT) - 1
MAX_EXPONENT = MASK


def encode(exps) -> int:
    key = 0
    total = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (SHIFT * i)
        total += e
    return key | (total << (SHIFT * len(exps)))


@lru_cache(maxsize=None)
def decode(key: int, n: int) -> tuple:
    return tuple((key >> (SHIFT * i)) & MASK for i in range(n))


def degree(key: int, n: int) -> int:
    return key >> (SHIFT * n)


def limit_for(order, n: int):
    """Smallest key of total degree ``order + 1``; None means no truncation."""
    if order is None:
        return None
    return (order + 1) << (SHIFT * n)


def unit(i: int, n: int) -> int:
    return (1 << (SHIFT * i)) | (1 << (SHIFT * n))


def exponent(key: int, i: int) -> int:
    return (key >> (SHIFT * i)) & MASK


def clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


def truncate(d: dict, limit) -> dict:
    if limit is None:
        return d
    return {k: v for k, v in d.items() if k < limit}


def add_into(out: dict, src: dict, coeff=1) -> None:
    get = out.get
    if coeff == 1:
        for k, v in src.items():
            out[k] = get(k, 0) + v
    elif coeff == -1:
        for k, v in src.items():
            out[k] = get(k, 0) - v
    else:
        for k, v in src.items():
            out[k] = get(k, 0) + coeff * v


def _conv(x: dict, y: dict, limit, out: dict, negate: bool) -> None:
    if not x or not y:
        return
    if len(x) > len(y):
        x, y = y, x
    ys = sorted(y.items())
    get = out.get
    if limit is None:
        for kx, cx in x.items():
            for ky, cy in ys:
                k = kx + ky
                out[k] = get(k, 0) - cx * cy if negate else get(k, 0) + cx * cy
        return
    for kx, cx in x.items():
        room = limit - kx
        if room <= 0:
            continue
        if negate:
            for ky, cy in ys:
                if ky >= room:
                    break
                k = kx + ky
                out[k] = get(k, 0) - cx * cy
        else:
            for ky, cy in ys:
                if ky >= room:
                    break
                k = kx + ky
                out[k] = get(k, 0) + cx * cy


def mul(a_re: dict, a_im: dict, b_re: dict, b_im: dict, limit):
    re: dict = {}
    im: dict = {}
    _conv(a_re, b_re, limit, re, False)
    _conv(a_im, b_im, limit, re, True)
    _conv(a_re, b_im, limit, im, False)
    _conv(a_im, b_re, limit, im, False)
    return clean(re), clean(im)


def scale(re: dict, im: dict, c_re, c_im):
    """Multiply ``re + i im`` by the scalar ``c_re + i c_im``."""
    if not c_im:
        return clean({k: v * c_re for k, v in re.items()}), clean({k: v * c_re for k, v in im.items()})
    if not c_re:
        return clean({k: -v * c_im for k, v in im.items()}), clean({k: v * c_im for k, v in re.items()})
    out_re = {k: v * c_re for k, v in re.items()}
    add_into(out_re, {k: v * c_im for k, v in im.items()}, -1)
    out_im = {k: v * c_re for k, v in im.items()}
    add_into(out_im, {k: v * c_im for k, v in re.items()})
    return clean(out_re), clean(out_im)


@lru_cache(maxsize=None)
def _permuted_key(key: int, n: int, perm: tuple) -> int:
    exps = decode(key, n)
    return encode([exps[p] for p in perm])


def permute(d: dict, n: int, perm: tuple) -> dict:
    """Relabel variables: new exponent ``i`` is old exponent ``perm[i]``."""
    return {_permuted_key(k, n, perm): v for k, v in d.items()}
