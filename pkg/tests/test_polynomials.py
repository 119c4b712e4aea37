import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bergman_offdiag.errors import DimensionMismatch, UnsupportedShape
from bergman_offdiag.numbers import GaussianRational, mpq
from bergman_offdiag.polynomials import U, UBAR, V, VBAR, QuadIndex, ScaledPolynomial

from conftest import gaussian_rationals
from helpers import var


@st.composite
def polys(draw, m=1, max_terms=4, max_exp=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = draw(st.lists(st.integers(0, max_exp), min_size=4 * m, max_size=4 * m))
        key = QuadIndex(*(tuple(exps[k * m:(k + 1) * m]) for k in range(4)))
        terms[key] = draw(gaussian_rationals)
    return ScaledPolynomial(m, terms)


@st.composite
def uvbar_polys(draw, m=1):
    return ScaledPolynomial.from_uvbar(m, {
        ((draw(st.integers(0, 3)),), (draw(st.integers(0, 3)),)): draw(gaussian_rationals)
        for _ in range(draw(st.integers(0, 3)))
    })


def test_sharp_examples():
    u, ub, v, vb = (var(1, b) for b in (U, UBAR, V, VBAR))
    assert (u * vb).sharp() == u * vb - u * ub / 2 - v * vb / 2
    S = u * u * vb * vb * -2
    assert S.sharp() == S + u * u * ub * ub + v * v * vb * vb
    assert ScaledPolynomial.zero(1).sharp().is_zero()
    with pytest.raises(UnsupportedShape):
        (u * ub).sharp()


@given(uvbar_polys())
def test_sharp_vanishes_on_diagonal(f):
    assert f.sharp().on_diagonal().is_zero()


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(polys(), polys())
def test_conjugations(a, b):
    assert a.conj().conj() == a
    assert a.hermitian_conjugate().hermitian_conjugate() == a
    assert (a * b).hermitian_conjugate() == a.hermitian_conjugate() * b.hermitian_conjugate()
    assert a.real_part().is_real()
    assert (a + a.hermitian_conjugate()).is_hermitian()


@given(polys(), st.sampled_from([mpq(1, 2), mpq(-3), mpq(2)]))
def test_scale_arguments_is_graded(a, t):
    got = a.scale_arguments(t)
    for d in a.degrees():
        assert got.homogeneous_part(d) == a.homogeneous_part(d) * t ** d


@given(polys(), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_evaluate_matches_symmetries(a, u, v):
    mpmath.mp.prec = 100
    val = a.evaluate([u], [v])
    assert abs(a.swap().evaluate([u], [v]) - a.evaluate([v], [u])) < 1e-20
    assert abs(a.hermitian_conjugate().evaluate([u], [v]) - mpmath.conj(a.evaluate([v], [u]))) < 1e-20
    assert abs(a.real_part().evaluate([u], [v]) - mpmath.re(val)) < 1e-20
    assert abs(a.on_diagonal().evaluate([u], [0]) - a.evaluate([u], [u])) < 1e-20


def test_parity_and_degree():
    p = var(1, U) * var(1, VBAR) + 3
    assert p.parity() == 0 and p.degree() == 2
    assert (p * var(1, V)).parity() == 1
    assert (p + var(1, V)).parity() is None
    assert ScaledPolynomial.zero(1).degree() == -1


def test_from_uvbar_and_at_v_zero():
    p = ScaledPolynomial.from_uvbar(1, {((2,), (1,)): 5, ((3,), (0,)): 1})
    assert p.at_v_zero() == var(1, U) ** 3
    assert p.coefficient((2,), (0,), (0,), (1,)) == 5
    assert p.is_uvbar_only()


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        var(1, U) * var(2, U)
    with pytest.raises(DimensionMismatch):
        var(1, U).evaluate([1, 2], [0])


def test_format():
    p = var(1, U) * var(1, VBAR) * GaussianRational(mpq(1, 2))
    assert p.format() == "(1/2)*u1*vb1"
    assert ScaledPolynomial.zero(2).format() == "0"
