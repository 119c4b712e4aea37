import numpy as np
import pytest

from bergman_offdiag.corpus import jet_corpus
from bergman_offdiag.errors import NonIdentityQuadratic, OrderTooLow
from bergman_offdiag.numbers import GaussianRational
from bergman_offdiag.oracles import flat_jet, fubini_study_jet
from bergman_offdiag.series import make_jet, scale_jet, series_mul
from bergman_offdiag.tensors import (
    FIELD_ORDERS,
    JetGeometry,
    christoffel,
    curvature_data_at_point,
    curvature_series,
    inverse_metric,
    metric_from_potential,
)

GENERAL = jet_corpus(11, 20, order=6, k_form=False)


def test_fs_metric_and_inverse():
    g = metric_from_potential(fubini_study_jet(1, 6))
    assert g.order == 4
    assert g[0, 0].coefficient((1,), (1,)) == -2
    h = inverse_metric(g)
    assert series_mul(g[0, 0], h[0, 0]) == 1


@pytest.mark.parametrize("jet", GENERAL[:6], ids=lambda j: f"m{j.m}")
def test_metric_times_inverse(jet):
    g = metric_from_potential(jet)
    h = inverse_metric(g)
    m = jet.m
    for p in range(m):
        for i in range(m):
            total = sum((h[p, q] * g[i, q] for q in range(m)), 0 * g[0, 0])
            assert total == (1 if p == i else 0)


@pytest.mark.parametrize("jet", GENERAL[:6], ids=lambda j: f"m{j.m}")
def test_christoffel_symmetric_in_lower_indices(jet):
    geo = JetGeometry(jet)
    gamma = geo.christoffel
    m = jet.m
    for i in range(m):
        for j in range(m):
            for k in range(m):
                assert gamma[i, j, k] == gamma[i, k, j]


def test_fs_point_values():
    d = curvature_data_at_point(fubini_study_jet(1, 6))
    assert d.R[0, 0, 0, 0] == 2
    assert (d.rho, d.Ric[0, 0], d.normR2, d.normRic2) == (2, 2, 4, 4)
    assert d.lap_rho == 0
    assert d.dR_hol[0, 0, 0, 0, 0] == 0 and d.grad_rho[0][0] == 0
    d2 = curvature_data_at_point(fubini_study_jet(2, 6))
    assert (d2.R[0, 0, 1, 1], d2.R[0, 1, 1, 0], d2.R[0, 0, 0, 1]) == (1, 1, 0)


def test_fs_curvature_is_parallel_series():
    # R_{i jbar k lbar} = g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar} on CP^m
    jet = fubini_study_jet(2, 7)
    R = curvature_series(jet)
    g = metric_from_potential(jet).truncate(R.order)
    for idx in np.ndindex(2, 2, 2, 2):
        i, j, k, l = idx
        assert R[idx] == g[i, j] * g[k, l] + g[i, l] * g[k, j]


def test_flat_is_flat():
    d = curvature_data_at_point(flat_jet(2, 6))
    assert all(x == 0 for x in d.R.flat) and d.rho == 0 and d.lap_rho == 0


@pytest.mark.parametrize("jet", GENERAL, ids=lambda j: f"m{j.m}")
def test_curvature_data_invariants(jet):
    d = curvature_data_at_point(jet)
    m = jet.m
    R = d.R
    for i, j, k, l in np.ndindex(m, m, m, m):
        assert R[i, j, k, l] == R[k, j, i, l] == R[i, l, k, j]
        assert R[i, j, k, l].conj() == R[j, i, l, k]
    for i, j in np.ndindex(m, m):
        assert d.Ric[i, j].conj() == d.Ric[j, i]
    for x in (d.rho, d.lap_rho, d.normR2, d.normRic2):
        assert x.is_real()
    # second Bianchi: R_{i jbar k lbar, s} is symmetric in i, k, s
    for i, j, k, l, s in np.ndindex(m, m, m, m, m):
        assert d.dR_hol[i, j, k, l, s] == d.dR_hol[s, j, k, l, i]
        assert d.dR_anti[i, j, k, l, s] == d.dR_anti[i, s, k, l, j]
    assert d.depth == 2 and d.absent == []


@pytest.mark.parametrize("t", [2, 3])
def test_scaling_covariance(t):
    for jet in GENERAL[:6]:
        a = curvature_data_at_point(jet)
        b = curvature_data_at_point(scale_jet(jet, t))
        assert np.array_equal(b.R, a.R * t**2)
        assert np.array_equal(b.dR_hol, a.dR_hol * t**3)
        assert np.array_equal(b.ddR_mixed, a.ddR_mixed * t**4)
        assert b.rho == a.rho * t**2
        assert b.lap_rho == a.lap_rho * t**4
        assert b.normR2 == a.normR2 * t**4 and b.normRic2 == a.normRic2 * t**4


def test_order_requirements():
    with pytest.raises(OrderTooLow):
        curvature_data_at_point(fubini_study_jet(1, 3))
    d = curvature_data_at_point(fubini_study_jet(1, 5))
    assert d.depth == 1
    assert set(d.absent) == {k for k, v in FIELD_ORDERS.items() if v == 6}
    assert d.ddR_mixed is None and d.lap_rho is None


def test_non_identity_quadratic_rejected():
    jet = make_jet(1, 4, {((1,), (1,)): 2})
    with pytest.raises(NonIdentityQuadratic):
        curvature_data_at_point(jet)


def test_geometry_caches_truncations():
    geo = JetGeometry(fubini_study_jet(1, 7))
    full = geo.curvature()
    assert geo.curvature(1) == full.truncate(1)
    assert geo.scalar_curvature(0).constant() == GaussianRational(2)
