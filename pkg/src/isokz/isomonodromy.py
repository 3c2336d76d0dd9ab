"""Isomonodromic deformation of (U, V) in the regular chamber.

The u-direction connection form is Λ(u) = Σ_k V_k du^k with
V_k = ad_{E_kk} ad_U^{-1} V (zero diagonal), and the deformation equation is

    ∂_k V = [V_k, V],

the zero-curvature condition of the joint system d_z F = (U + V/z) F dz,
d_h F = (z d_hU + Λ) F.  Along its flow the Stokes pair of (U, V) is constant;
``stokes_drift`` measures that numerically and is the oracle that pins the
commutator orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import stokes as sk
from .numerics import solve_ivp_dopri5

_DEGENERACY_GUARD = 1e-9
_BLOWUP_FACTOR = 1e3


class IsomonodromyError(RuntimeError):
    pass


class BlowupError(IsomonodromyError):
    """The flow left the trust region (movable singularity suspected)."""

    def __init__(self, message, t_last, v_last):
        super().__init__(message)
        self.t_last = t_last
        self.v_last = v_last


@dataclass(frozen=True)
class CartanPath:
    """Piecewise-linear path of regular real u with a fixed coordinate ordering."""

    waypoints: tuple

    def __post_init__(self):
        pts = tuple(np.asarray(w, dtype=float) for w in self.waypoints)
        if len(pts) < 1:
            raise IsomonodromyError("path needs at least one waypoint")
        n = pts[0].shape[0]
        order0 = tuple(np.argsort(-pts[0]))
        for w in pts:
            if w.shape != (n,):
                raise IsomonodromyError("inconsistent waypoint dimensions")
            gaps = [abs(w[i] - w[j]) for i in range(n) for j in range(i + 1, n)]
            if n > 1 and min(gaps) < _DEGENERACY_GUARD:
                raise IsomonodromyError(f"waypoint {w} is not regular")
            if tuple(np.argsort(-w)) != order0:
                raise IsomonodromyError("coordinate ordering changes along the path "
                                        "(wall crossing is not allowed)")
        object.__setattr__(self, "waypoints", pts)

    @property
    def n(self):
        return self.waypoints[0].shape[0]

    @property
    def length(self):
        return float(sum(np.linalg.norm(b - a)
                         for a, b in zip(self.waypoints, self.waypoints[1:])))

    def point(self, t: float) -> np.ndarray:
        """Piecewise-linear point at global parameter t in [0, 1]."""
        m = len(self.waypoints) - 1
        if m == 0:
            return self.waypoints[0].copy()
        s = min(max(t, 0.0), 1.0) * m
        k = min(int(s), m - 1)
        f = s - k
        return (1 - f) * self.waypoints[k] + f * self.waypoints[k + 1]

    def velocity(self, t: float) -> np.ndarray:
        m = len(self.waypoints) - 1
        if m == 0:
            return np.zeros(self.n)
        s = min(max(t, 0.0), 1.0 - 1e-15) * m
        k = min(int(s), m - 1)
        return (self.waypoints[k + 1] - self.waypoints[k]) * m


def ad_u_inverse(u: Sequence, V: np.ndarray) -> np.ndarray:
    """Entrywise division by u_i - u_j off the diagonal, zero on it."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    gaps = np.abs(u[:, None] - u[None, :]) + np.eye(n)
    if np.min(gaps) < _DEGENERACY_GUARD:
        raise IsomonodromyError("u is nearly degenerate; ad_U is not invertible")
    denom = u[:, None] - u[None, :] + np.eye(n)
    out = np.asarray(V, dtype=complex) / denom
    np.fill_diagonal(out, 0.0)
    return out


def lambda_form(u: Sequence, V: np.ndarray) -> list:
    """Coefficients V_k of Λ = Σ V_k du^k; each has zero diagonal, Σ_k V_k = 0."""
    m = ad_u_inverse(u, V)
    out = []
    n = len(u)
    for k in range(n):
        vk = np.zeros((n, n), dtype=complex)
        vk[k, :] = m[k, :]
        vk[:, k] -= m[:, k]
        vk[k, k] = 0.0
        out.append(vk)
    return out


def iso_vector_field(u: Sequence, V: np.ndarray, k: int) -> np.ndarray:
    """∂_k V = [V_k, V] with V_k = ad_{E_kk} ad_U^{-1} V."""
    vk = lambda_form(u, V)[k]
    V = np.asarray(V, dtype=complex)
    return vk @ V - V @ vk


@dataclass
class IsoFlowResult:
    path: CartanPath
    params: np.ndarray          # global path parameters of the samples
    points: list                # u at the samples
    values: list                # V(u) at the samples
    v_end: np.ndarray
    tol: float


def integrate_iso_flow(path: CartanPath, v0: np.ndarray, tol=1e-10,
                       samples=0) -> IsoFlowResult:
    """Integrate the deformation equation along the path.

    ``samples`` evenly spaced interior+endpoint values are recorded (the
    start point is always included).  Blow-up beyond 1e3·max(‖V0‖, 1) aborts
    with the last good point: the equation has movable singularities and we
    stop rather than integrate through one.
    """
    v0 = np.asarray(v0, dtype=complex)
    n = path.n
    if v0.shape != (n, n):
        raise IsomonodromyError("V0 shape does not match the path dimension")
    guard = _BLOWUP_FACTOR * max(1.0, float(np.max(np.abs(v0))))
    t_grid = np.linspace(0.0, 1.0, samples) if samples >= 2 else np.array([0.0, 1.0])

    def rhs(t, y):
        v = y.reshape(n, n)
        if np.max(np.abs(v)) > guard:
            raise BlowupError("‖V‖ grew beyond the movable-singularity guard",
                              t, v.copy())
        u = path.point(t)
        du = path.velocity(t)
        m = ad_u_inverse(u, v)
        out = np.zeros((n, n), dtype=complex)
        for k in range(n):
            if du[k] == 0.0:
                continue
            vk = np.zeros((n, n), dtype=complex)
            vk[k, :] = m[k, :]
            vk[:, k] -= m[:, k]
            vk[k, k] = 0.0
            out += du[k] * (vk @ v - v @ vk)
        return out.reshape(-1)

    interior = [float(t) for t in t_grid if 0.0 < t]
    y_end, recorded = solve_ivp_dopri5(rhs, 0.0, 1.0, v0.reshape(-1).astype(complex),
                                       rtol=tol, atol=tol * 1e-2,
                                       dense_points=interior)
    values = [v0.copy()] + [y.reshape(n, n) for y in recorded]
    params = np.concatenate([[0.0], interior])
    points = [path.point(t) for t in params]
    return IsoFlowResult(path, params, points, values,
                         y_end.reshape(n, n), tol)


def dubrovin_flat_sections(path: CartanPath, v0: np.ndarray, z_grid: Sequence,
                           tol=1e-10, samples=3, fd_step=1e-5,
                           drop_lambda=False) -> dict:
    """Mixed-partial (zero-curvature) residual of the joint system.

    At each sampled u the u-derivative of the z-connection coefficient is
    measured by central finite differences of locally re-integrated flows,
    and compared with the curvature identity; ``drop_lambda`` replaces Λ by 0
    (negative control).  Residuals are reported per (z, u) sample.
    """
    flow = integrate_iso_flow(path, v0, tol=tol, samples=max(samples, 2))
    n = path.n
    rows = []
    for t, u, v in zip(flow.params, flow.points, flow.values):
        vks = lambda_form(u, v) if not drop_lambda else [np.zeros((n, n))] * n
        for k in range(n):
            # ∂_k V by re-integrating short coordinate legs from (u, V)
            h = fd_step
            leg_pts = [u + h * np.eye(n)[k], u - h * np.eye(n)[k]]
            vals = []
            for pt in leg_pts:
                leg = CartanPath((u, pt))
                vals.append(integrate_iso_flow(leg, v, tol=tol).v_end)
            dkv = (vals[0] - vals[1]) / (2 * h)
            for z in z_grid:
                z = complex(z)
                az = np.diag(u).astype(complex) + v / z
                ak = z * np.diag(np.eye(n)[k]).astype(complex) + vks[k]
                dk_az = np.diag(np.eye(n)[k]).astype(complex) + dkv / z
                dz_ak = np.diag(np.eye(n)[k]).astype(complex)
                curv = dk_az - dz_ak + az @ ak - ak @ az
                rows.append({"t": float(t), "k": k, "z": z,
                             "residual": float(np.max(np.abs(curv)))})
    return {"rows": rows, "max_residual": max(r["residual"] for r in rows)}


def stokes_drift(path: CartanPath, v0: np.ndarray, tol=1e-10, samples=5,
                 stokes_tol=None) -> dict:
    """‖S±(u) - S±(u0)‖ at evenly spaced samples along the flow."""
    stokes_tol = stokes_tol or tol
    flow = integrate_iso_flow(path, v0, tol=tol, samples=samples)
    pairs = []
    for u, v in zip(flow.points, flow.values):
        sys = sk.IrregularSystem(u=u, V=v, skew=False)
        pairs.append(sk.stokes_matrices(sys, tol=stokes_tol))
    s0p, s0m = pairs[0].s_plus, pairs[0].s_minus
    rows = []
    for t, p in zip(flow.params, pairs):
        rows.append({
            "t": float(t),
            "drift_plus": float(np.max(np.abs(p.s_plus - s0p))),
            "drift_minus": float(np.max(np.abs(p.s_minus - s0m))),
        })
    drift = max(max(r["drift_plus"], r["drift_minus"]) for r in rows)
    return {"rows": rows, "max_drift": drift, "flow": flow}


def skewness_drift(flow: IsoFlowResult) -> float:
    return max(float(np.max(np.abs(v + v.T))) for v in flow.values)


def eigenvalue_drift(flow: IsoFlowResult) -> float:
    """The spectrum of V is a flow invariant (the right side is a commutator)."""
    ref = np.sort_complex(np.linalg.eigvals(flow.values[0]))
    return max(float(np.max(np.abs(np.sort_complex(np.linalg.eigvals(v)) - ref)))
               for v in flow.values)
