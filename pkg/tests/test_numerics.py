import numpy as np
import pytest

from isokz import numerics as nm


def test_scalar_exponential():
    lam = 0.7 - 1.3j
    y, _ = nm.solve_ivp_dopri5(lambda t, y: lam * y, 0.0, 2.0,
                               np.array([1.0 + 0j]), rtol=1e-12, atol=1e-14)
    assert abs(y[0] - np.exp(2 * lam)) < 1e-11


def test_matrix_rotation_reversed_interval():
    a = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    y0 = np.array([1.0, 0.0], dtype=complex)
    y, _ = nm.solve_ivp_dopri5(lambda t, y: a @ y, 1.5, 0.0, y0,
                               rtol=1e-12, atol=1e-14)
    # integrating backwards from 1.5 to 0 of y' = Ay starting at y0
    expect = np.array([np.cos(1.5), np.sin(1.5)])
    assert np.allclose(y, expect, atol=1e-11)


def test_dense_points():
    lam = -0.4 + 0.9j
    pts = [0.25, 0.5, 1.0]
    _, samples = nm.solve_ivp_dopri5(lambda t, y: lam * y, 0.0, 1.0,
                                     np.array([1.0 + 0j]), rtol=1e-12,
                                     atol=1e-14, dense_points=pts)
    for p, s in zip(pts, samples):
        assert abs(s[0] - np.exp(lam * p)) < 1e-10


def test_self_convergence_halving_tolerance():
    # stiff-ish oscillator; reference = much tighter run
    def f(t, y):
        return np.array([y[1], -25.0 * y[0] + 0.3 * np.sin(5 * t) * y[1]],
                        dtype=complex)

    y0 = np.array([1.0, 0.0], dtype=complex)
    ref, _ = nm.solve_ivp_dopri5(f, 0.0, 3.0, y0, rtol=1e-13, atol=1e-15)
    errs = []
    for rtol in (1e-6, 1e-7):
        y, _ = nm.solve_ivp_dopri5(f, 0.0, 3.0, y0, rtol=rtol, atol=rtol * 1e-2)
        errs.append(np.max(np.abs(y - ref)))
    assert errs[1] <= 0.5 * errs[0]


def test_step_underflow_near_singularity():
    with pytest.raises(nm.IntegrationError):
        nm.solve_ivp_dopri5(lambda t, y: y / (1.0 - t), 0.0, 1.0,
                            np.array([1.0 + 0j]), rtol=1e-10, atol=1e-12,
                            max_steps=5000)


def test_path_pieces_geometry():
    arc = nm.Arc(2.0, np.pi / 2, np.pi / 2 - 2 * np.pi)
    assert abs(arc.point(0.0) - 2j) < 1e-15
    assert abs(arc.point(1.0) - 2j) < 1e-14  # same physical point, new sheet
    seg = nm.Segment(1j, 3j)
    assert abs(seg.point(0.5) - 2j) < 1e-15


def test_integrate_along_arc_against_closed_form():
    # y' = y / z along a full ccw circle multiplies by e^{2*pi*i} = 1,
    # but y' = 0.5 y / z (square root) flips sign.
    arc = [nm.Arc(1.5, 0.0, 2 * np.pi)]
    y = nm.integrate_along(lambda z, y: 0.5 * y / z, arc,
                           np.array([1.0 + 0j]), rtol=1e-12, atol=1e-14)
    assert abs(y[0] + 1.0) < 1e-10


def test_working_dtype_env(monkeypatch):
    monkeypatch.delenv("ISOKZ_PRECISION", raising=False)
    assert nm.working_dtype() == np.complex128
    monkeypatch.setenv("ISOKZ_PRECISION", "longdouble")
    assert nm.working_dtype() == np.clongdouble
    monkeypatch.setenv("ISOKZ_PRECISION", "bogus")
    with pytest.raises(ValueError):
        nm.working_dtype()
