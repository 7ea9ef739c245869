import numpy as np
import pytest

from conftest import sample_points
from hermlab import catalog
from hermlab.chern import (
    balanced_identity_residual,
    bianchi_residual,
    curvature_identity_residual,
    del_omega_residual,
    delbar_eta_residual,
    kahler_like_residual,
    normal_frame_at,
    skew_hermitian_residual,
    theta_wedge_phi_residual,
)
from hermlab.fd import fd_direction_derivative


def test_euclidean_everything_vanishes(geo, metric):
    ch, _ = geo(metric("euclidean"), [0.3 + 0.1j, -0.2 + 0.4j])
    assert np.max(np.abs(ch.T)) == 0.0
    assert np.max(np.abs(ch.Rh)) == 0.0
    assert np.max(np.abs(ch.eta)) == 0.0
    assert np.max(np.abs(ch.covT)) == 0.0


def test_iwasawa_flat_balanced_with_torsion(geo, metric):
    m = metric("iwasawa")
    for p in sample_points(m, 5, seed=21):
        ch, _ = geo(m, p)
        assert np.max(np.abs(ch.Rh)) < 1e-9
        assert np.max(np.abs(ch.eta)) < 1e-9
        # the torsion norm is frame independent
        assert ch.torsion_norm_sq() == pytest.approx(0.5, abs=1e-12)


def test_iwasawa_torsion_component_on_invariant_slice(geo, metric):
    # at z1 = 0 the canonical frame coincides with the invariant coframe
    # (dz1, dz2, dz3 - z1 dz2), whose third element differentiates to
    # -dz1^dz2; the all-ordered-pairs convention then reads off -1/2
    m = metric("iwasawa")
    ch, _ = geo(m, [0j, 0.25 + 0.1j, -0.3 + 0.65j])
    assert ch.T[2, 0, 1] == pytest.approx(-0.5, abs=1e-12)
    assert ch.T[2, 1, 0] == pytest.approx(0.5, abs=1e-12)


def test_torsion_antisymmetry_exact(geo, metric):
    m = metric("random_polynomial(3)")
    for p in sample_points(m, 3, seed=5):
        ch, _ = geo(m, p)
        assert np.max(np.abs(ch.T + ch.T.transpose(0, 2, 1))) == 0.0


def test_structure_bianchi_on_catalog(geo, metric):
    for name in ["iwasawa", "gkl_surface", "conformal_klike", "random_polynomial(4)"]:
        m = metric(name)
        for p in sample_points(m, 4, seed=11):
            ch, _ = geo(m, p)
            assert bianchi_residual(ch) < 1e-8


def test_curvature_type_and_skew_hermitian(geo, metric):
    for name in ["fubini_study_chart_n2", "gkl_surface", "random_polynomial(6)"]:
        m = metric(name)
        p = sample_points(m, 1, seed=3)[0]
        ch, _ = geo(m, p)
        assert ch.Rh_type_residual < 1e-10
        assert skew_hermitian_residual(ch) < 1e-10


def test_kahler_like_iff_theta_wedge_phi(geo, metric):
    # the component symmetry residual and the wedge residual vanish together
    for name, expect_zero in [("conformal_klike", True), ("gkl_surface", False)]:
        m = metric(name)
        p = sample_points(m, 1, seed=9)[0]
        ch, _ = geo(m, p)
        comp = kahler_like_residual(ch)
        wedge = theta_wedge_phi_residual(ch)
        if expect_zero:
            assert comp < 1e-10 and wedge < 1e-10
        else:
            assert comp > 1e-3 and wedge > 1e-3


def test_curvature_identity_eq_ddbar_omega(geo, metric):
    for name in ["iwasawa", "gkl_surface", "random_polynomial(7)"]:
        m = metric(name)
        for p in sample_points(m, 3, seed=13):
            ch, _ = geo(m, p)
            assert curvature_identity_residual(ch) < 1e-8
            assert del_omega_residual(ch) < 1e-8


def test_balanced_identity_on_iwasawa(geo, metric):
    m = metric("iwasawa")
    for p in sample_points(m, 20, seed=17):
        ch, _ = geo(m, p)
        assert balanced_identity_residual(ch) < 1e-9


def test_klike_content_on_scaled_flat_metric(geo, metric):
    # Kahler-like: i del delbar omega = sigma and eta is holomorphic
    from hermlab.classify import klike_sigma_residual

    m = metric("conformal_klike")
    for p in sample_points(m, 5, seed=19):
        ch, _ = geo(m, p)
        assert klike_sigma_residual(ch) < 1e-8
        assert delbar_eta_residual(ch) < 1e-8


def test_covderiv_identity_on_klike_metric(geo, metric):
    # 2 T^k_{ij,lbar} agrees with the Chern curvature antisymmetrization
    m = metric("conformal_klike")
    p = sample_points(m, 1, seed=23)[0]
    ch, _ = geo(m, p)
    lhs = 2 * ch.covT_bar
    rhs = np.einsum("jlik->kijl", ch.Rh) - np.einsum("iljk->kijl", ch.Rh)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_covderiv_euclidean_zero(geo, metric):
    ch, _ = geo(metric("euclidean"), [0.1 + 0.2j, 0.3 - 0.4j])
    assert np.max(np.abs(ch.covT)) == 0.0
    assert np.max(np.abs(ch.covT_bar)) == 0.0


def test_covderiv_against_fd_transport(geo, metric):
    # finite differences of the normal-frame torsion field reproduce the
    # connection-corrected derivatives at the base point
    m = metric("iwasawa")
    rng = np.random.default_rng(31)
    for p in sample_points(m, 3, seed=29):
        ch, _ = geo(m, p)
        nf = normal_frame_at(m, p, data=ch)
        n = m.n
        for l in range(n):
            e_l = ch.Pv[l]  # frame direction in coordinates
            d_hol = fd_direction_derivative(
                lambda q: nf.torsion_values_at(q), p, e_l, h=1e-5
            )
            d_anti = fd_direction_derivative(
                lambda q: nf.torsion_values_at(q), p, 1j * e_l, h=1e-5
            )
            # e_l = (d/dt along e_l - i d/dt along i e_l) / 2
            fd_el = (d_hol - 1j * d_anti) / 2
            fd_elbar = (d_hol + 1j * d_anti) / 2
            assert np.max(np.abs(fd_el - ch.covT[:, :, :, l])) < 1e-5
            assert np.max(np.abs(fd_elbar - ch.covT_bar[:, :, :, l])) < 1e-5


def test_normal_frame_euclidean_is_cholesky(geo, metric):
    m = metric("euclidean")
    p = np.array([0.2 + 0.1j, -0.4 + 0.3j])
    nf = normal_frame_at(m, p)
    F = nf.frame_jets(p)
    assert np.allclose(F.values(), np.eye(2))


def test_normal_frame_kills_connection(geo, metric):
    for name in ["iwasawa", "gkl_surface", "random_polynomial(8)"]:
        m = metric(name)
        p = sample_points(m, 1, seed=37)[0]
        nf = normal_frame_at(m, p)
        assert nf.theta_norm_at_base() < 1e-9


def test_normal_frame_covderiv_equals_raw_derivative(geo, metric):
    m = metric("gkl_surface")
    p = sample_points(m, 1, seed=41)[0]
    ch, _ = geo(m, p)
    nf = normal_frame_at(m, p, data=ch)
    Tj = nf.torsion_jets_at(p)
    n = m.n
    dT = np.array(
        [[[Tj[k][i][j].d1 for j in range(n)] for i in range(n)] for k in range(n)]
    )
    raw_l = np.einsum("la,kija->kijl", ch.Pv, dT[..., :n])
    raw_lb = np.einsum("la,kija->kijl", np.conj(ch.Pv), dT[..., n:])
    assert np.max(np.abs(raw_l - ch.covT)) < 1e-7
    assert np.max(np.abs(raw_lb - ch.covT_bar)) < 1e-7
