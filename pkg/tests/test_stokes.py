import numpy as np
import pytest

from isokz import stokes as sk


def skew_system(rng, n, norm=0.3, u=None):
    a = rng.standard_normal((n, n))
    v = a - a.T
    v *= norm / max(np.max(np.abs(v)), 1e-12)
    if u is None:
        u = np.sort(rng.standard_normal(n))[::-1] * 2.0
    return sk.IrregularSystem(u=u, V=v, skew=True)


def test_system_validation():
    with pytest.raises(sk.StokesError):
        sk.IrregularSystem(u=[1.0, 1.0], V=np.zeros((2, 2)))
    with pytest.raises(sk.StokesError):
        sk.IrregularSystem(u=[1.0, -1.0], V=[[0, 1], [1, 0]], skew=True)


# -- asymptotic series --------------------------------------------------------

def test_series_vanishes_for_zero_and_diagonal_V():
    sys0 = sk.IrregularSystem(u=[1.0, -1.0], V=np.zeros((2, 2)))
    assert all(np.max(np.abs(h)) == 0 for h in sk.asymptotic_coefficients(sys0, 8))
    sysd = sk.IrregularSystem(u=[1.0, -1.0], V=np.diag([0.3, -0.1]))
    assert all(np.max(np.abs(h)) == 0 for h in sk.asymptotic_coefficients(sysd, 8))


def test_series_residual_decay_order():
    rng = np.random.default_rng(0)
    v = rng.standard_normal((2, 2)) * 0.4
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=v)
    for K in (3, 5):
        coeffs = sk.asymptotic_coefficients(sys, K)
        r20 = sk.series_residual(sys, coeffs, 20j)
        r40 = sk.series_residual(sys, coeffs, 40j)
        # drop by at least half of the nominal 2^{K+1}
        assert r20 / r40 >= 2 ** (K + 1) / 2


def test_series_loglog_slope():
    rng = np.random.default_rng(1)
    v = rng.standard_normal((3, 3)) * 0.3
    sys = sk.IrregularSystem(u=[1.5, 0.2, -1.1], V=v)
    K = 4
    coeffs = sk.asymptotic_coefficients(sys, K)
    radii = np.array([15.0, 25.0, 40.0, 60.0])
    res = [sk.series_residual(sys, coeffs, 1j * r) for r in radii]
    slope = np.polyfit(np.log(radii), np.log(res), 1)[0]
    assert slope <= -(K + 1) + 0.3


def test_formal_series_transpose_identity_for_skew():
    # coefficient-level version of H^T(-z) H(z) = 1:
    # sum_{i+j=k} (-1)^i H_i^T H_j = 0 for k >= 1
    rng = np.random.default_rng(2)
    sys = skew_system(rng, 3)
    K = 6
    hs = [np.eye(3)] + sk.asymptotic_coefficients(sys, K)
    for k in range(1, K + 1):
        acc = sum((-1.0) ** i * hs[i].T @ hs[k - i] for i in range(k + 1))
        assert np.max(np.abs(acc)) < 1e-12


# -- integrate_ode ------------------------------------------------------------

def test_integrate_ode_closed_form_v_zero():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=np.zeros((2, 2)))
    z0, z1 = 1.0 + 1.0j, 2.0 - 0.5j
    f0 = np.eye(2, dtype=complex)
    got = sk.integrate_ode(sys, z0, z1, f0, tol=1e-13)
    expect = np.diag(np.exp((z1 - z0) * sys.u))
    assert np.max(np.abs(got - expect)) < 1e-12 * np.max(np.abs(expect))


def test_integrate_ode_closed_form_v_diagonal():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=np.diag([0.25, -0.4]))
    z0, z1 = 2.0j, 1.0 + 1.0j
    f0 = np.diag(np.exp(np.log(z0) * np.diag(sys.V)) * np.exp(z0 * sys.u))
    got = sk.integrate_ode(sys, z0, z1, f0, tol=1e-12)
    expect = np.diag(np.exp(np.log(z1) * np.diag(sys.V)) * np.exp(z1 * sys.u))
    assert np.max(np.abs(got - expect)) < 1e-11


def test_integrate_ode_self_convergence():
    rng = np.random.default_rng(3)
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=rng.standard_normal((2, 2)) * 0.5)
    z0, z1 = 1.0j, 1.0 + 2.0j
    f0 = np.eye(2, dtype=complex)
    ref = sk.integrate_ode(sys, z0, z1, f0, tol=1e-13)
    errs = [np.max(np.abs(sk.integrate_ode(sys, z0, z1, f0, tol=t) - ref))
            for t in (1e-6, 5e-7)]
    assert errs[1] <= 0.6 * errs[0]


def test_integrate_ode_rejects_segment_through_origin():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=np.zeros((2, 2)))
    with pytest.raises(sk.IntegrationError):
        sk.integrate_ode(sys, -1.0 + 0j, 1.0 + 0j, np.eye(2, dtype=complex))


# -- sector solutions ---------------------------------------------------------

def test_sector_solution_exact_for_v_zero():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=np.zeros((2, 2)))
    sol = sk.sector_solution(sys, "plus", tol=1e-11)
    z = 0.7 + 1.3j
    assert np.max(np.abs(sol.f_at(z) - np.diag(np.exp(z * sys.u)))) < 1e-11


def test_anchor_independence():
    rng = np.random.default_rng(4)
    sys = skew_system(rng, 2, u=np.array([1.0, -1.0]))
    sol1 = sk.sector_solution(sys, "plus", tol=1e-11)
    sol2 = sk.sector_solution(sys, "plus", tol=1e-11,
                              anchor_radius=2 * sol1.anchor_radius)
    z = 2.0j
    assert np.max(np.abs(sol1.h_at(z) - sol2.h_at(z))) < 1e-9


def test_h_tends_to_identity_along_bisector():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=[[0, 0.05], [-0.05, 0]], skew=True)
    sol = sk.sector_solution(sys, "plus", tol=1e-10)
    d1 = np.max(np.abs(sol.h_at(3j) - np.eye(2)))
    d2 = np.max(np.abs(sol.h_at(9j) - np.eye(2)))
    assert d2 < d1 < 0.1


def test_abel_liouville_det_identity():
    # log det F - (z tr U + tr V log z) is constant along continuation
    rng = np.random.default_rng(5)
    sys = skew_system(rng, 3)
    sol = sk.sector_solution(sys, "plus", tol=1e-11)
    vals = []
    for theta in (np.pi / 2, np.pi / 3, 3 * np.pi / 4):
        r = 1.5
        z = r * np.exp(1j * theta)
        f = sol.f_at(z, sheet_angle=theta)
        val = np.log(np.linalg.det(f)) - (z * np.sum(sys.u)
                                          + np.trace(sys.V) * (np.log(r) + 1j * theta))
        vals.append(val)
    assert max(abs(v - vals[0]) for v in vals) < 1e-9


# -- Stokes matrices ----------------------------------------------------------

def test_trivial_stokes_v_zero_and_diagonal():
    for n in (2, 3, 4):
        u = np.linspace(1.0, -1.0, n) * (1 + 0.1 * np.arange(n))
        u = np.sort(u)[::-1]
        for v in (np.zeros((n, n)), np.diag(np.linspace(0.2, -0.3, n))):
            sys = sk.IrregularSystem(u=u, V=v)
            pair = sk.stokes_matrices(sys, tol=1e-13)
            assert np.max(np.abs(pair.s_plus - np.eye(n))) < 1e-12
            assert np.max(np.abs(pair.s_minus - np.eye(n))) < 1e-12


def test_stokes_n2_skew_closed_form():
    # for u=(1,-1), V=[[0,a],[-a,0]] the loop monodromy around 0 has
    # eigenvalues e^{∓2πa}, so tr(S+ S-) = 2 cosh(2πa); here [V] = 0 and the
    # extraction convention gives S+_{12} = -2i sinh(πa).
    a = 0.3
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=[[0, a], [-a, 0]], skew=True)
    pair = sk.stokes_matrices(sys, tol=1e-11)
    assert abs(pair.s_plus[0, 1] - (-2j * np.sinh(np.pi * a))) < 1e-9
    assert abs(np.trace(pair.s_plus @ pair.s_minus) - 2 * np.cosh(2 * np.pi * a)) < 1e-9


def test_monodromy_consistency_random_skew():
    rng = np.random.default_rng(6)
    for n in (2, 3):
        sys = skew_system(rng, n, norm=0.5)
        mono = sk.monodromy_consistency(sys, tol=1e-11)
        assert mono["loop"] < 1e-8
        assert mono["loop_larger_circle"] < 1e-8


def test_triangularity_against_continuation_oracle():
    rng = np.random.default_rng(7)
    for n in (2, 3):
        for _ in range(2):
            sys = skew_system(rng, n, norm=0.8)
            pair = sk.stokes_matrices(sys, tol=1e-11)
            tri = sk.triangularity_residual(sys, pair)
            assert max(tri.values()) < 1e-8


def test_triangularity_general_nonskew_v():
    # the branch normalization keeps S± unipotent for arbitrary V
    rng = np.random.default_rng(12)
    for n in (2, 3):
        v = rng.standard_normal((n, n)) * 0.5 + 0.2j * rng.standard_normal((n, n))
        u = np.sort(rng.standard_normal(n))[::-1] * 1.5
        sys = sk.IrregularSystem(u=u, V=v)
        pair = sk.stokes_matrices(sys, tol=1e-11)
        tri = sk.triangularity_residual(sys, pair)
        assert max(tri.values()) < 1e-8


def test_monodromy_consistency_nonskew_v():
    rng = np.random.default_rng(13)
    v = rng.standard_normal((2, 2)) * 0.4
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=v)
    mono = sk.monodromy_consistency(sys, tol=1e-11)
    assert mono["loop"] < 1e-8


def test_stokes_relation_reproduces_f_values():
    rng = np.random.default_rng(8)
    sys = skew_system(rng, 2, u=np.array([1.0, -1.0]))
    pair = sk.stokes_matrices(sys, tol=1e-11)
    assert max(pair.residuals.values()) < 1e-9


# -- skew identity ------------------------------------------------------------

def test_skew_identity_small_v():
    rng = np.random.default_rng(9)
    for n in (2, 3):
        sys = skew_system(rng, n, norm=0.3)
        res = sk.skew_symmetry_identity(sys, [1.5j, 0.4 + 1.2j, -0.8 + 1.1j,
                                              2.5j, 0.9 + 0.9j], tol=1e-11)
        assert max(res) < 1e-8


def test_skew_identity_negative_control():
    rng = np.random.default_rng(10)
    v = rng.standard_normal((2, 2)) * 0.4
    v[0, 0] = 0.3  # decidedly not skew
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=v, skew=False)
    hp = sk.sector_solution(sys, "plus", tol=1e-10)
    hm = sk.sector_solution(sys, "minus", tol=1e-10)
    z = 1.3j
    resid = np.max(np.abs(hm.h_at(-z).T @ hp.h_at(z) - np.eye(2)))
    assert resid > 1e-3
    with pytest.raises(sk.StokesError):
        sk.skew_symmetry_identity(sys, [1.3j])


def test_skew_flag_required_and_samples_in_upper_half_plane():
    sys = sk.IrregularSystem(u=[1.0, -1.0], V=[[0, 0.1], [-0.1, 0]], skew=True)
    with pytest.raises(sk.StokesError):
        sk.skew_symmetry_identity(sys, [-1.0j])
