import pytest
from hypothesis import given

from bergman_offdiag.errors import (
    ConstantTermPresent,
    DegreeOverflow,
    DimensionMismatch,
    NonHolomorphicSubstitution,
    NonzeroConstantTerm,
    OrderTooLow,
    RealityViolation,
    ValidationError,
)
from bergman_offdiag.numbers import GaussianRational, mpq
from bergman_offdiag.oracles import fubini_study_jet
from bergman_offdiag.series import (
    TruncatedSeries,
    compose_holomorphic,
    compositional_inverse,
    identity_substitution,
    make_jet,
    partial_derivative,
    series_exp,
    series_log1p,
    series_mul,
    variable,
)

from conftest import series


def z(m, order, i=0):
    return variable(m, order, i)


def zb(m, order, i=0):
    return variable(m, order, i, bar=True)


# -- jets ---------------------------------------------------------------------

def test_fs_jet_from_coefficients():
    jet = make_jet(1, 4, {((2,), (2,)): mpq(-1, 2)}, identity_quadratic=True)
    assert jet == fubini_study_jet(1, 4)
    assert jet.has_identity_quadratic and jet.is_centered


def test_flat_jet_flags():
    jet = make_jet(2, 2, identity_quadratic=True)
    assert jet.has_identity_quadratic
    assert len(jet.series) == 2


def test_reality_violation_on_diagonal():
    with pytest.raises(RealityViolation):
        make_jet(1, 4, {((2,), (2,)): GaussianRational(0, 1)}, identity_quadratic=True)


def test_reality_violation_off_diagonal():
    with pytest.raises(RealityViolation):
        make_jet(1, 5, {((3,), (2,)): 1, ((2,), (3,)): 2})


def test_degree_overflow_and_duplicates():
    with pytest.raises(DegreeOverflow):
        make_jet(1, 3, {((2,), (2,)): 1})
    with pytest.raises(ValidationError):
        make_jet(1, 4, [(((2,), (2,)), 1), (((2,), (2,)), 1)])
    with pytest.raises(DimensionMismatch):
        make_jet(2, 4, {((2,), (2,)): 1})


def test_identity_quadratic_clash():
    with pytest.raises(ValidationError):
        make_jet(1, 4, {((1,), (1,)): 1}, identity_quadratic=True)


def test_pure_quadratic_terms_break_identity_flag():
    jet = make_jet(1, 4, {((2,), (0,)): 1, ((0,), (2,)): 1}, identity_quadratic=True)
    assert jet.has_mixed_identity and not jet.has_identity_quadratic


# -- arithmetic -----------------------------------------------------------------

def test_mul_examples():
    x = z(1, 4) * zb(1, 4)
    assert series_mul(x, x) == TruncatedSeries(1, 4, {((2,), (2,)): 1})
    assert x * 1 == x
    s = z(1, 4) + zb(1, 4)
    assert s * s == TruncatedSeries(1, 4, {((2,), (0,)): 1, ((1,), (1,)): 2, ((0,), (2,)): 1})


def test_mixed_orders_truncate_to_minimum():
    a = TruncatedSeries(1, 6, {((3,), (3,)): 1, ((1,), (0,)): 1})
    b = TruncatedSeries(1, 3, {((1,), (0,)): 1})
    assert (a + b).order == 3
    assert (a + b) == TruncatedSeries(1, 3, {((1,), (0,)): 2})


def test_equality_after_truncation():
    a = TruncatedSeries(1, 6, {((3,), (3,)): 1, ((1,), (0,)): 1})
    assert a == TruncatedSeries(1, 2, {((1,), (0,)): 1})


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        z(1, 3) * z(2, 3)


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@given(series(m=2, order=3), series(m=2, order=3))
def test_conjugation_is_multiplicative(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.conj().conj() == a


# -- derivatives -------------------------------------------------------------------

def test_derivative_examples():
    s = TruncatedSeries(1, 4, {((2,), (2,)): 1})
    assert partial_derivative(s, 0) == TruncatedSeries(1, 3, {((1,), (2,)): 2})
    assert partial_derivative(s, 0).order == 3
    assert partial_derivative(TruncatedSeries(2, 3, {((1, 0), (0, 0)): 1}), 1).is_zero()


def test_fourth_derivative_of_fs():
    s = fubini_study_jet(1, 6).series
    d = partial_derivative(partial_derivative(partial_derivative(partial_derivative(s, 0), 0), 0, True), 0, True)
    assert d.constant() == -2


def test_derivative_of_order_zero():
    with pytest.raises(OrderTooLow):
        partial_derivative(TruncatedSeries(1, 0, {((0,), (0,)): 1}), 0)


@given(series(m=2, order=4), series(m=2, order=4))
def test_leibniz_and_commuting_partials(a, b):
    for var in (0, 1):
        for bar in (False, True):
            lhs = partial_derivative(a * b, var, bar)
            rhs = partial_derivative(a, var, bar) * b + a * partial_derivative(b, var, bar)
            assert lhs == rhs
    assert partial_derivative(partial_derivative(a, 0), 1, True) == partial_derivative(partial_derivative(a, 1, True), 0)


# -- composition --------------------------------------------------------------------

def test_compose_examples():
    x = z(1, 3) * zb(1, 3)
    assert compose_holomorphic(x, identity_substitution(1, 3)) == x
    w = [z(1, 3) + z(1, 3) * z(1, 3)]
    want = TruncatedSeries(1, 3, {((1,), (1,)): 1, ((2,), (1,)): 1, ((1,), (2,)): 1})
    assert compose_holomorphic(x, w) == want
    fs = fubini_study_jet(1, 4).series
    got = compose_holomorphic(fs, [z(1, 4) * 2])
    assert got == TruncatedSeries(1, 4, {((1,), (1,)): 4, ((2,), (2,)): -8})


def test_compose_rejects_bad_substitutions():
    x = z(1, 3) * zb(1, 3)
    with pytest.raises(NonHolomorphicSubstitution):
        compose_holomorphic(x, [zb(1, 3)])
    with pytest.raises(ConstantTermPresent):
        compose_holomorphic(x, [z(1, 3) + 1])


@given(series(m=2, order=4, max_terms=6), series(m=2, order=4), series(m=2, order=4))
def test_inverse_substitution_round_trip(a, p, q):
    hol = lambda s: s.select(lambda idx: idx.anti_degree == 0 and idx.degree >= 2)
    w = [z(2, 4, 0) + hol(p), z(2, 4, 1) + hol(q)]
    v = compositional_inverse(w)
    assert [compose_holomorphic(wi, v) for wi in w] == identity_substitution(2, 4)
    assert compose_holomorphic(compose_holomorphic(a, w), v) == a


def test_composition_preserves_reality():
    jet = fubini_study_jet(2, 5)
    w = [z(2, 5, 0) + GaussianRational(1, 2) * z(2, 5, 1) ** 2, z(2, 5, 1)]
    assert compose_holomorphic(jet.series, w).is_real()


# -- log / exp ------------------------------------------------------------------------

def test_log_exp_examples():
    x = z(1, 4) * zb(1, 4)
    assert series_log1p(x) == TruncatedSeries(1, 4, {((1,), (1,)): 1, ((2,), (2,)): mpq(-1, 2)})
    assert series_exp(TruncatedSeries(1, 4)) == 1
    with pytest.raises(NonzeroConstantTerm):
        series_exp(x + 1)


@given(series(m=1, order=6, max_terms=5))
def test_exp_inverts_log1p(a):
    a = a - a.constant()
    assert series_exp(series_log1p(a)) - (1 + a) == 0
