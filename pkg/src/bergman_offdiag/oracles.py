"""Model geometries and exact kernels used as ground truth.

Everything numeric lives here; the rest of the package is exact.  Kernels are
evaluated with mpmath at an explicit working precision, and the log of the
degree-N kernel is always taken in closed form (never by summing and then
taking a log) except in the CP^1 finite-sum cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np
import sympy

from .errors import LogBranchNearSingularity, PrecisionExhausted, ValidationError
from .numbers import GaussianRational, mpq
from .polynomials import U, UBAR, V, VBAR, ScaledPolynomial
from .series import PotentialJet, make_jet, series_log1p, variable, zero

__all__ = [
    "flat_jet",
    "fubini_study_jet",
    "mixed_tail_jet",
    "ModelKernel",
    "exact_cpm_log_kernel",
    "cp1_finite_sum_log_kernel",
    "bargmann_fock_log_kernel",
    "normalized_kernel",
    "cpm_symbolic_coefficients",
    "default_sample_points",
    "doubling_grid",
    "ConvergenceFit",
    "convergence_fit",
    "pn_fit",
    "derivative_growth_demo",
]

DEFAULT_BITS = 256


# -- jets -------------------------------------------------------------------------

def flat_jet(m: int, order: int = 2) -> PotentialJet:
    """``|z|^2`` as a jet of the given order."""
    return make_jet(m, order, identity_quadratic=True)


def fubini_study_jet(m: int, order: int) -> PotentialJet:
    """Taylor jet of ``log(1 + |z|^2)``."""
    if order < 2:
        raise ValidationError("the Fubini-Study jet needs order >= 2")
    x = sum((variable(m, order, i) * variable(m, order, i, bar=True) for i in range(m)), zero(m, order))
    return PotentialJet(series_log1p(x))


def mixed_tail_jet(order: int, diagonal_coefficient=2) -> PotentialJet:
    """``|z|^2 + sum_{j>=2} (z^2 zbar^j + z^j zbar^2)`` for m = 1.

    At ``j = 2`` both orientations are ``z^2 zbar^2``; the literal sum gives
    coefficient 2 there, which is the default.
    """
    if order < 4:
        raise ValidationError("this jet needs order >= 4")
    terms = {((2,), (2,)): diagonal_coefficient}
    for j in range(3, order - 1):
        terms[((2,), (j,))] = 1
        terms[((j,), (2,))] = 1
    return make_jet(1, order, terms, identity_quadratic=True)


# -- numeric helpers -------------------------------------------------------------

def _mpc(x) -> mpmath.mpc:
    if isinstance(x, GaussianRational):
        return mpmath.mpc(mpmath.mpf(int(x.re.numerator)) / int(x.re.denominator),
                          mpmath.mpf(int(x.im.numerator)) / int(x.im.denominator))
    if isinstance(x, tuple):
        return _mpc(GaussianRational(*x))
    if isinstance(x, str):
        return mpmath.mpc(mpmath.mpmathify(x))
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpmath.mpc(mpmath.mpf(int(x.numerator)) / int(x.denominator))
    return mpmath.mpc(x)


def _vec(x) -> list:
    """A point of C^m given as a list/tuple of coordinates (or one bare coordinate)."""
    if isinstance(x, (list, tuple)):
        return [_mpc(c) for c in x]
    return [_mpc(x)]


def _dot(u: list, v: list):
    """``u . vbar``."""
    return mpmath.fsum(a * mpmath.conj(b) for a, b in zip(u, v))


def _norm2(u: list):
    return mpmath.fsum(abs(a) ** 2 for a in u)


# -- model kernels ------------------------------------------------------------------

def bargmann_fock_log_kernel(u, v, theta1=0, theta2=0, precision_bits: int = DEFAULT_BITS):
    """``i(theta1 - theta2) + u.vbar - (|u|^2 + |v|^2)/2 - m log pi``."""
    with mpmath.workprec(precision_bits):
        u, v = _vec(u), _vec(v)
        m = len(u)
        return (mpmath.mpc(0, 1) * (mpmath.mpf(theta1) - mpmath.mpf(theta2))
                + _dot(u, v) - (_norm2(u) + _norm2(v)) / 2 - m * mpmath.log(mpmath.pi))


def exact_cpm_log_kernel(m: int, N: int, u, v, precision_bits: int = DEFAULT_BITS):
    """log of the degree-N Bergman kernel of O(N) on CP^m in the standard frame.

    ``log((N+m)!/(pi^m N!)) + N log(1 + u.vbar) - N/2 log(1+|u|^2) - N/2 log(1+|v|^2)``
    """
    with mpmath.workprec(precision_bits):
        u, v = _vec(u), _vec(v)
        if len(u) != m or len(v) != m:
            raise ValidationError("points do not match the dimension")
        w = 1 + _dot(u, v)
        if abs(w) < mpmath.mpf(2) ** (-(precision_bits // 2)):
            raise LogBranchNearSingularity(f"|1 + u.vbar| = {mpmath.nstr(abs(w), 5)} is too small")
        const = mpmath.fsum(mpmath.log(N + k) for k in range(1, m + 1)) - m * mpmath.log(mpmath.pi)
        return (const + N * mpmath.log(w)
                - mpmath.mpf(N) / 2 * mpmath.log(1 + _norm2(u))
                - mpmath.mpf(N) / 2 * mpmath.log(1 + _norm2(v)))


def cp1_finite_sum_log_kernel(N: int, z, w, precision_bits: int = DEFAULT_BITS):
    """CP^1 kernel from the orthonormal monomial basis.

    ``||z^j||^2 = pi * j! (N-j)! / (N+1)!`` for the weight ``(1+|z|^2)^-N`` and
    the area form of the Fubini-Study metric, so
    ``B_N(z, w) = sum_j (z wbar)^j / ||z^j||^2``.
    """
    with mpmath.workprec(precision_bits + 32):
        z, w = _mpc(z), _mpc(w)
        x = z * mpmath.conj(w)
        total = mpmath.fsum(
            x ** j * mpmath.factorial(N + 1) / (mpmath.pi * mpmath.factorial(j) * mpmath.factorial(N - j))
            for j in range(N + 1)
        )
        out = (mpmath.log(total) - mpmath.mpf(N) / 2 * mpmath.log(1 + abs(z) ** 2)
               - mpmath.mpf(N) / 2 * mpmath.log(1 + abs(w) ** 2))
    with mpmath.workprec(precision_bits):
        return +out


@dataclass(frozen=True)
class ModelKernel:
    """A model geometry with a closed-form kernel.

    ``kind`` is ``"fubini_study"``, ``"flat"`` or ``"bargmann_fock"``; for the
    flat model the degree-N kernel is ``(N/pi)^m exp(N(z.wbar - |z|^2/2 - |w|^2/2))``.
    """

    kind: str
    m: int

    def __post_init__(self):
        if self.kind not in ("fubini_study", "flat", "bargmann_fock"):
            raise ValidationError(f"unknown model kind {self.kind!r}")

    def jet(self, order: int) -> PotentialJet:
        if self.kind == "fubini_study":
            return fubini_study_jet(self.m, order)
        return flat_jet(self.m, order)

    def log_kernel(self, N: int, z, w, precision_bits: int = DEFAULT_BITS):
        if self.kind == "fubini_study":
            return exact_cpm_log_kernel(self.m, N, z, w, precision_bits)
        with mpmath.workprec(precision_bits):
            z, w = _vec(z), _vec(w)
            return (self.m * mpmath.log(mpmath.mpf(N) / mpmath.pi)
                    + N * (_dot(z, w) - (_norm2(z) + _norm2(w)) / 2))

    def scaled_log_ratio(self, N: int, u, v, precision_bits: int = DEFAULT_BITS):
        """``log( N^-m Pi_N(u/sqrt N, v/sqrt N) / Pi_BF(u, v) )``."""
        with mpmath.workprec(precision_bits):
            u, v = _vec(u), _vec(v)
            s = mpmath.sqrt(N)
            lk = self.log_kernel(N, [a / s for a in u], [b / s for b in v], precision_bits)
            return lk - self.m * mpmath.log(N) - bargmann_fock_log_kernel(u, v, precision_bits=precision_bits)


def normalized_kernel(model: ModelKernel, N: int, u, v, precision_bits: int = DEFAULT_BITS):
    """``P_N(u/sqrt N, v/sqrt N) = |Pi_N(z,w)| / sqrt(Pi_N(z,z) Pi_N(w,w))``."""
    with mpmath.workprec(precision_bits):
        u, v = _vec(u), _vec(v)
        s = mpmath.sqrt(N)
        z = [a / s for a in u]
        w = [b / s for b in v]
        log_p = (mpmath.re(model.log_kernel(N, z, w, precision_bits))
                 - mpmath.re(model.log_kernel(N, z, z, precision_bits)) / 2
                 - mpmath.re(model.log_kernel(N, w, w, precision_bits)) / 2)
        return mpmath.exp(log_p)


# -- symbolic oracle ------------------------------------------------------------

def _invariant_polys(m: int) -> tuple:
    """``(u.vbar, |u|^2, |v|^2)`` as ScaledPolynomials."""
    def var(block, i):
        return ScaledPolynomial.variable(m, block, i)

    x = sum((var(U, i) * var(VBAR, i) for i in range(m)), ScaledPolynomial.zero(m))
    a = sum((var(U, i) * var(UBAR, i) for i in range(m)), ScaledPolynomial.zero(m))
    b = sum((var(V, i) * var(VBAR, i) for i in range(m)), ScaledPolynomial.zero(m))
    return x, a, b


def cpm_symbolic_coefficients(m: int, r_max: int) -> list:
    """b_1..b_{r_max} for CP^m by expanding the closed-form kernel in ``eps = N^{-1/2}``.

    With ``N = eps^-2`` the scaled log-ratio is
    ``sum_k log(1 + k eps^2) + (log(1 + eps^2 x) - eps^2 x)/eps^2 - (a, b terms)``
    in ``x = u.vbar, a = |u|^2, b = |v|^2``.  sympy expands, exponentiates and
    the ``eps^r`` coefficients are mapped back to polynomials in u, v.
    """
    eps, x, a, b = sympy.symbols("eps x a b")
    order = r_max + 1

    def g(y):
        return (sympy.log(1 + eps ** 2 * y) - eps ** 2 * y) / eps ** 2

    expr = sum(sympy.log(1 + k * eps ** 2) for k in range(1, m + 1)) + g(x) - g(a) / 2 - g(b) / 2
    log_series = sympy.series(expr, eps, 0, order).removeO()
    kernel = sympy.series(sympy.exp(log_series), eps, 0, order).removeO()
    kernel = sympy.expand(kernel)
    xp, ap, bp = _invariant_polys(m)
    out = []
    for r in range(1, r_max + 1):
        coeff = sympy.Poly(kernel.coeff(eps, r), x, a, b)
        poly = ScaledPolynomial.zero(m)
        for (px, pa, pb), c in coeff.terms():
            c = sympy.Rational(c)
            poly = poly + (xp ** px) * (ap ** pa) * (bp ** pb) * mpq(int(c.p), int(c.q))
        out.append(poly)
    return out


# -- convergence fits --------------------------------------------------------------

def default_sample_points(m: int) -> list:
    """Eight fixed rational points ``(u, v)`` with ``|u| + |v| <= 2``."""
    base = [
        (GaussianRational(mpq(1, 2)), GaussianRational(0)),
        (GaussianRational(0), GaussianRational(0, 1)),
        (GaussianRational(mpq(1, 2)), GaussianRational(mpq(1, 2))),
        (GaussianRational(1), GaussianRational(mpq(-1, 2))),
        (GaussianRational(mpq(1, 2), mpq(1, 2)), GaussianRational(mpq(1, 4), mpq(-1, 3))),
        (GaussianRational(0, 1), GaussianRational(mpq(1, 2), mpq(-1, 2))),
        (GaussianRational(mpq(3, 4)), GaussianRational(0, mpq(3, 4))),
        (GaussianRational(1), GaussianRational(1)),
    ]
    pts = []
    for p, q in base:
        u = tuple(p * mpq(1, m) for _ in range(m))
        v = tuple(q * mpq((-1) ** k, m) for k in range(m))
        pts.append((u, v))
    return pts


def doubling_grid(lo: int = 64, hi: int = 4096) -> list:
    if lo < 1 or hi < lo:
        raise ValidationError(f"bad N range {lo}..{hi}")
    out = [lo]
    while out[-1] * 2 <= hi:
        out.append(out[-1] * 2)
    return out


@dataclass
class ConvergenceFit:
    """Residual sup-norms over the sample points, one per N, and the fitted log-log slope.

    ``fitted_exponent`` is None when every residual is zero to working
    precision (an exact model).
    """

    N_grid: list
    residual_norms: list
    fitted_exponent: Optional[float]
    precision_bits: int
    label: str = ""
    exact: bool = False

    def within(self, target: float, tol: float) -> bool:
        return self.fitted_exponent is not None and abs(self.fitted_exponent - target) <= tol

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "precision_bits": self.precision_bits,
            "N": list(self.N_grid),
            "residuals": [mpmath.nstr(r, 12) for r in self.residual_norms],
            "fitted_exponent": self.fitted_exponent,
            "exact": self.exact,
        }

    def table(self) -> str:
        lines = [f"# {self.label}  (precision {self.precision_bits} bits)", f"{'N':>8}  {'residual':>22}"]
        for N, r in zip(self.N_grid, self.residual_norms):
            lines.append(f"{N:>8}  {mpmath.nstr(r, 12):>22}")
        slope = "exact (all residuals zero)" if self.fitted_exponent is None else f"{self.fitted_exponent:.4f}"
        lines.append(f"fitted exponent: {slope}")
        return "\n".join(lines)


def _fit(N_grid: Sequence[int], residuals: Sequence, precision_bits: int, label: str) -> ConvergenceFit:
    floor = mpmath.mpf(2) ** (-(precision_bits // 2))
    tiny = [r < floor for r in residuals]
    if all(tiny):
        return ConvergenceFit(list(N_grid), list(residuals), None, precision_bits, label, exact=True)
    if any(tiny):
        raise PrecisionExhausted(
            f"{label}: residual fell below 2^-{precision_bits // 2}; raise --precision-bits"
        )
    xs = np.array([math.log(N) for N in N_grid])
    ys = np.array([float(mpmath.log(r)) for r in residuals])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return ConvergenceFit(list(N_grid), list(residuals), slope, precision_bits, label)


def convergence_fit(model: ModelKernel, bs: Sequence[ScaledPolynomial], r_used: int,
                    N_grid: Optional[Sequence[int]] = None, sample_points=None,
                    precision_bits: int = DEFAULT_BITS) -> ConvergenceFit:
    """Slope of ``log max_pts |ratio_N - (1 + sum_{r<=r_used} N^{-r/2} b_r)|`` against ``log N``.

    ``bs[r - 1]`` is b_r (an :class:`ExpansionResult`'s ``bs`` list fits).
    """
    N_grid = list(N_grid or doubling_grid())
    if any(b >= a for a, b in zip(N_grid[1:], N_grid)):
        raise ValidationError("N_grid must be strictly increasing")
    if r_used > len(bs):
        raise ValidationError(f"r_used={r_used} but only {len(bs)} coefficients supplied")
    pts = sample_points or default_sample_points(model.m)
    residuals = []
    with mpmath.workprec(precision_bits):
        values = [[bs[r - 1].evaluate([_mpc(c) for c in u], [_mpc(c) for c in v]) for r in range(1, r_used + 1)]
                  for u, v in pts]
        for N in N_grid:
            worst = mpmath.mpf(0)
            for (u, v), bvals in zip(pts, values):
                ratio = mpmath.exp(model.scaled_log_ratio(N, u, v, precision_bits))
                approx = 1 + mpmath.fsum(bv * mpmath.mpf(N) ** (-mpmath.mpf(r) / 2)
                                         for r, bv in enumerate(bvals, start=1))
                worst = max(worst, abs(ratio - approx))
            residuals.append(worst)
    return _fit(N_grid, residuals, precision_bits, f"{model.kind} m={model.m} r_used={r_used}")


def pn_fit(model: ModelKernel, corrections: tuple, N_grid: Optional[Sequence[int]] = None,
           sample_points=None, precision_bits: int = DEFAULT_BITS) -> tuple:
    """Check ``0 < P_N <= 1`` and fit the remainder after the N^-1 and N^-3/2 corrections.

    ``corrections`` is the pair returned by ``pn_expansion``.  Returns
    ``(fit, bound_ok)``.
    """
    N_grid = list(N_grid or doubling_grid())
    pts = sample_points or default_sample_points(model.m)
    first, second = corrections
    residuals = []
    bound_ok = True
    with mpmath.workprec(precision_bits):
        coeffs = []
        for u, v in pts:
            uu = [_mpc(c) for c in u]
            vv = [_mpc(c) for c in v]
            diff2 = _norm2([a - b for a, b in zip(uu, vv)])
            coeffs.append((mpmath.re(first.evaluate(uu, vv)), mpmath.re(second.evaluate(uu, vv)), diff2))
        for N in N_grid:
            worst = mpmath.mpf(0)
            for (u, v), (c1, c2, diff2) in zip(pts, coeffs):
                p = normalized_kernel(model, N, u, v, precision_bits)
                if not (0 < p <= 1 + mpmath.mpf(2) ** (-(precision_bits - 8))):
                    bound_ok = False
                lead = p * mpmath.exp(diff2 / 2)
                approx = 1 + c1 / N + c2 * mpmath.mpf(N) ** mpmath.mpf(-1.5)
                worst = max(worst, abs(lead - approx))
            residuals.append(worst)
    return _fit(N_grid, residuals, precision_bits, f"P_N {model.kind} m={model.m}"), bound_ok


# -- derivative growth ---------------------------------------------------------------

def _dlog1p(p, q, a: int, b: int, tol):
    """``d_p^a d_q^b log(1 + p q)`` by its power series (|pq| < 1)."""
    total = mpmath.mpc(0)
    n = max(a, b, 1)
    while True:
        term = ((-1) ** (n + 1) / mpmath.mpf(n)
                * mpmath.factorial(n) / mpmath.factorial(n - a)
                * mpmath.factorial(n) / mpmath.factorial(n - b)
                * p ** (n - a) * q ** (n - b))
        total += term
        if n > max(a, b) + 2 and abs(term) < tol * (1 + abs(total)):
            return total
        if n > 10000:  # pragma: no cover
            raise PrecisionExhausted("derivative series failed to converge")
        n += 1


def _dk_norm(N: int, u, v, k: int, tol) -> mpmath.mpf:
    """Sum over multi-indices of |d^alpha log Pi_N| in (u, ubar, v, vbar), |alpha| = k."""
    ub, vb = mpmath.conj(u), mpmath.conj(v)
    t1 = {a: N * _dlog1p(u, vb, a, k - a, tol) for a in range(k + 1)}         # (u, vbar)
    t2 = {a: -N / mpmath.mpf(2) * _dlog1p(u, ub, a, k - a, tol) for a in range(k + 1)}  # (u, ubar)
    t3 = {a: -N / mpmath.mpf(2) * _dlog1p(v, vb, a, k - a, tol) for a in range(k + 1)}  # (v, vbar)
    total = mpmath.mpf(0)
    for au in range(k + 1):
        for aub in range(k + 1 - au):
            for av in range(k + 1 - au - aub):
                avb = k - au - aub - av
                val = mpmath.mpc(0)
                if aub == 0 and av == 0:
                    val += t1[au]
                if av == 0 and avb == 0:
                    val += t2[au]
                if au == 0 and aub == 0:
                    val += t3[av]
                total += abs(val)
    return total


def derivative_growth_demo(ks: Sequence[int] = (1, 2, 3, 4, 5, 6), N_grid: Optional[Sequence[int]] = None,
                           precision_bits: int = 64, radius=1) -> list:
    """Growth of ``sup |D^k log Pi_N|`` over ``|u| + |v| < radius/sqrt N`` on CP^1.

    The constant of the kernel drops out for k >= 1, so only the three
    ``log(1 + p q)`` terms are differentiated.  Returns one dict per k.
    """
    N_grid = list(N_grid or doubling_grid())
    rows = []
    fracs = [mpq(0), mpq(1, 4), mpq(1, 2), mpq(3, 4), mpq(99, 100)]
    angles = [0, 1, 2, 3]
    with mpmath.workprec(precision_bits):
        tol = mpmath.mpf(2) ** (-precision_bits)
        for k in ks:
            sups = []
            for N in N_grid:
                scale = mpmath.mpf(radius) / mpmath.sqrt(N)
                best = mpmath.mpf(0)
                for fu in fracs:
                    for fv in fracs:
                        if fu + fv > mpq(99, 100):
                            continue
                        for au in angles:
                            for av in angles:
                                u = scale * _mpc(fu) * mpmath.expjpi(mpmath.mpf(au) / 2)
                                v = scale * _mpc(fv) * mpmath.expjpi(mpmath.mpf(av) / 2 + mpmath.mpf(1) / 4)
                                best = max(best, _dk_norm(N, u, v, k, tol))
                sups.append(best)
            xs = np.array([math.log(N) for N in N_grid])
            ys = np.array([float(mpmath.log(s)) for s in sups])
            slope = float(np.polyfit(xs, ys, 1)[0])
            expected = 1.0 if k % 2 == 0 else 0.5
            rows.append({"k": k, "N": N_grid, "sup": sups, "exponent": slope, "expected": expected})
    return rows
