"""Canonical sectorial solutions and Stokes matrices at the irregular point.

The system is dF/dz = (U + V/z) F with U = diag(u), u regular.  For real
regular u the Stokes rays are the positive and negative real axes and the
Stokes sectors are the half-planes H± = {Im z ≷ 0}.  Canonical solutions are
F± = H±(z) z^{[V]} e^{zU} with H± -> 1 at infinity in the (super)sector; we fix
the branch of log z cut along the negative real axis, arg z in (-π, π].

All numerical continuation happens on the holomorphic part H, which satisfies

    H'(z) = [U, H] + (V H - H [V]) / z

and is far better conditioned than F itself; the diagonal factors z^{[V]} e^{zU}
are reattached in closed form with explicit sheet bookkeeping (an Arc whose
angles run past ±π encodes crossing the cut).

Stokes matrices are read from the two ray crossings:

    S-  at +ir:  F+ = F-^{ccw} · S-        (F- continued counterclockwise across R+)
    S+  at -ir:  F- = F+^{ccw} · S+ e^{-2πi[V]}   (F+ continued ccw across the cut)

The branch factor is normalized so that V diagonal gives S± = 1 exactly; with
it, S+ is unit upper triangular and S- unit lower triangular for u1 > ... > un
(any V, not only skew).  One clockwise loop in the z-plane (counterclockwise
around the irregular point at infinity) multiplies F+ on the right by
S+ e^{-2πi[V]} S-; when V is skew [V] = 0 and this is the plain product S+ S-.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numerics import Arc, IntegrationError, Segment, integrate_along

_EXP_GUARD = 500.0  # |Re(z u_i)| beyond which e^{zU} over/underflows badly


class StokesError(ValueError):
    """Invalid input to the Stokes machinery."""


@dataclass(frozen=True)
class IrregularSystem:
    """The pair (U, V): diagonal u with distinct entries, and an n×n matrix V."""

    u: np.ndarray
    V: np.ndarray
    skew: bool = False

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        V = np.asarray(self.V, dtype=complex)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "V", V)
        n = u.shape[0]
        if V.shape != (n, n):
            raise StokesError("V must be n×n with n = len(u)")
        gaps = [abs(u[i] - u[j]) for i in range(n) for j in range(i + 1, n)]
        if n > 1 and min(gaps) < 1e-10 * max(1.0, np.max(np.abs(u))):
            raise StokesError("u must be regular (distinct entries)")
        if self.skew and np.max(np.abs(V + V.T)) > 1e-8 * max(1.0, np.max(np.abs(V))):
            raise StokesError("skew flag set but V + V^T is not small")

    @property
    def n(self):
        return self.u.shape[0]

    @property
    def gap(self):
        if self.n == 1:
            return np.inf
        return min(abs(self.u[i] - self.u[j])
                   for i in range(self.n) for j in range(i + 1, self.n))

    @property
    def spread(self):
        return float(np.max(np.abs(self.u))) * 2

    def is_real_regular(self, tol=1e-12):
        return float(np.max(np.abs(self.u.imag))) <= tol * max(1.0, np.max(np.abs(self.u)))


def asymptotic_coefficients(sys: IrregularSystem, order: int) -> list:
    """Coefficients H_1..H_K of the formal series H = 1 + Σ H_k z^{-k}.

    Recursion from substituting H z^{[V]} e^{zU} into the equation:
    [U, H_{k+1}] = -k H_k - V H_k + H_k [V]; off-diagonal entries divide by
    u_i - u_j, the diagonal is fixed by solvability of the next order.
    """
    u, V = sys.u, sys.V
    n = sys.n
    dV = np.diag(np.diag(V))
    denom = u[:, None] - u[None, :] + np.eye(n)  # diagonal arbitrary, masked
    off = ~np.eye(n, dtype=bool)
    hs = []
    h = np.eye(n, dtype=complex)
    for k in range(order):
        g = -k * h - V @ h + h @ dV
        nxt = np.zeros((n, n), dtype=complex)
        nxt[off] = (g / denom)[off]
        for i in range(n):
            acc = -sum(V[i, j] * nxt[j, i] for j in range(n) if j != i)
            nxt[i, i] = acc / (k + 1)
        hs.append(nxt)
        h = nxt
    return hs


def series_residual(sys: IrregularSystem, coeffs, z) -> float:
    """ODE residual of the truncated series at z (sup norm)."""
    u, V = sys.u, sys.V
    dV = np.diag(np.diag(V))
    h = np.eye(sys.n, dtype=complex)
    dh = np.zeros_like(h)
    for k, hk in enumerate(coeffs, start=1):
        h = h + hk * z ** (-k)
        dh = dh - k * hk * z ** (-k - 1)
    rhs = (np.diag(u) @ h - h @ np.diag(u)) + (V @ h - h @ dV) / z
    return float(np.max(np.abs(dh - rhs)))


def _h_rhs(sys: IrregularSystem):
    U = np.diag(sys.u)
    V = sys.V
    dV = np.diag(np.diag(V))

    def rhs(z, h):
        return (U @ h - h @ U) + (V @ h - h @ dV) / z

    return rhs


def integrate_ode(sys: IrregularSystem, z_from, z_to, f_init, tol=1e-10,
                  path="segment"):
    """Continue a solution of dF/dz = (U + V/z)F from z_from to z_to.

    ``path`` is "segment" (straight line, must stay away from 0) or "arc"
    (radial move to |z_to|, then an origin-centered arc).  Raises
    IntegrationError with a diagnostic if stepping collapses near z = 0.
    """
    z_from, z_to = complex(z_from), complex(z_to)
    if path == "segment":
        d = z_to - z_from
        t_star = -np.real(z_from * np.conj(d)) / abs(d) ** 2 if d != 0 else 0.0
        closest = z_from + min(1.0, max(0.0, t_star)) * d
        if abs(closest) < 1e-8:
            raise IntegrationError("segment path passes through z = 0")
        pieces = [Segment(z_from, z_to)]
    elif path == "arc":
        r0, r1 = abs(z_from), abs(z_to)
        th0, th1 = np.angle(z_from), np.angle(z_to)
        mid = r1 * np.exp(1j * th0)
        pieces = []
        if abs(mid - z_from) > 0:
            pieces.append(Segment(z_from, mid))
        if th0 != th1:
            pieces.append(Arc(r1, th0, th1))
    else:
        raise StokesError(f"unknown path kind {path!r}")
    for zc in (z_from, z_to):
        if np.max(np.abs(np.real(zc * sys.u))) > _EXP_GUARD:
            raise StokesError("endpoint exceeds the exponential overflow guard")
    U = np.diag(sys.u)

    def rhs(z, f):
        return (U + sys.V / z) @ f

    return integrate_along(rhs, pieces, np.asarray(f_init, dtype=complex),
                           rtol=tol, atol=tol * 1e-2)


@dataclass
class SectorSolutionClassical:
    """Canonical solution on a half-plane sector, with a numerical evaluator."""

    sector: str  # "plus" (Im z > 0) or "minus"
    system: IrregularSystem
    coeffs: list
    order_used: int
    anchor_radius: float
    anchor_value: np.ndarray
    series_error: float
    tol: float

    @property
    def _sign(self):
        return 1.0 if self.sector == "plus" else -1.0

    @property
    def anchor_z(self):
        return 1j * self._sign * self.anchor_radius

    def h_along(self, pieces) -> np.ndarray:
        """Transport H from the anchor along explicit path pieces."""
        rhs = _h_rhs(self.system)
        return integrate_along(rhs, pieces, self.anchor_value,
                               rtol=self.tol, atol=self.tol * 1e-2)

    def _pieces_to(self, radius, theta):
        th0 = self._sign * np.pi / 2
        pieces = [Segment(self.anchor_z, 1j * self._sign * radius)]
        if theta != th0:
            pieces.append(Arc(radius, th0, theta))
        return pieces

    def h_at(self, z, sheet_angle=None) -> np.ndarray:
        """H at the point re^{iθ}; θ defaults to the principal argument.

        ``sheet_angle`` may exceed (-π, π] to request continuation across the
        cut (the angle is followed continuously from the sector bisector).
        """
        r = abs(z)
        th = float(np.angle(z)) if sheet_angle is None else float(sheet_angle)
        return self.h_along(self._pieces_to(r, th))

    def f_at(self, z, sheet_angle=None) -> np.ndarray:
        """F = H z^{[V]} e^{zU} with log z = ln|z| + iθ on the given sheet."""
        r = abs(z)
        th = float(np.angle(z)) if sheet_angle is None else float(sheet_angle)
        h = self.h_at(z, sheet_angle=th)
        return h @ _diagonal_factor(self.system, r, th)


def _diagonal_factor(sys: IrregularSystem, radius, theta):
    """z^{[V]} e^{zU} for z = radius·e^{iθ} (θ fixes the log sheet)."""
    z = radius * np.exp(1j * theta)
    logz = np.log(radius) + 1j * theta
    if np.max(np.abs(np.real(z * sys.u))) > _EXP_GUARD:
        raise StokesError("exponential overflow guard tripped; reduce |z|")
    return np.diag(np.exp(logz * np.diag(sys.V)) * np.exp(z * sys.u))


def sector_solution(sys: IrregularSystem, sector: str, tol=1e-10,
                    order=None, anchor_radius=None) -> SectorSolutionClassical:
    """Canonical solution on H±, anchored on the sector bisector.

    The anchor radius is the smallest R (on a geometric grid) at which the
    optimally truncated asymptotic series is estimated below tol/10; the
    series is divergent, so the truncation order is chosen per radius.
    """
    if sector not in ("plus", "minus"):
        raise StokesError("sector must be 'plus' or 'minus'")
    if not sys.is_real_regular():
        raise StokesError("half-plane sectors require real regular u "
                          "(general sectors are out of scope)")
    kmax = order or max(26, min(40, int(4 / tol ** 0.02)))
    coeffs = asymptotic_coefficients(sys, kmax)
    norms = [float(np.max(np.abs(h))) for h in coeffs]
    if anchor_radius is None:
        if all(v == 0 for v in norms):
            radius = max(4.0, 4.0 / sys.gap)
        else:
            radius = max(2.0, 2.0 / sys.gap)
            for _ in range(200):
                err = min(v * radius ** -(k + 1) for k, v in enumerate(norms))
                if err < tol / 10:
                    break
                radius *= 1.2
            else:
                raise StokesError("could not reach the requested series accuracy")
    else:
        radius = float(anchor_radius)
    if radius * float(np.max(np.abs(sys.u.imag))) > _EXP_GUARD:
        raise StokesError("anchor exceeds the exponential overflow guard")
    kstar = int(np.argmin([v * radius ** -(k + 1) for k, v in enumerate(norms)])) + 1 \
        if any(norms) else 1
    err = min((v * radius ** -(k + 1) for k, v in enumerate(norms)), default=0.0)
    sign = 1.0 if sector == "plus" else -1.0
    za = 1j * sign * radius
    h = np.eye(sys.n, dtype=complex)
    for k in range(kstar):
        h = h + coeffs[k] * za ** -(k + 1)
    return SectorSolutionClassical(sector, sys, coeffs, kstar, radius, h,
                                   float(err), tol)


@dataclass
class StokesPairClassical:
    """The pair (S+, S-) with the branch and the residuals of its defining relations."""

    s_plus: np.ndarray
    s_minus: np.ndarray
    branch: str
    residuals: dict
    condition: float
    tol: float


def _compare_radius(sys: IrregularSystem) -> float:
    r = 2.0 / sys.gap if np.isfinite(sys.gap) else 1.0
    spread = max(sys.spread, 1e-6)
    return float(min(max(r, 0.3), 9.0 / spread))


def stokes_matrices(sys: IrregularSystem, tol=1e-10, order=None) -> StokesPairClassical:
    """Stokes matrices of (U, V) for the half-plane sectors.

    S- is read at +ir after continuing F- counterclockwise across R+, and
    S+ at -ir (log sheet θ = 3π/2) after continuing F+ counterclockwise
    across the cut; both are re-extracted at three angles and the spread of
    the extracted constants is reported as the relation residual.
    """
    hp = sector_solution(sys, "plus", tol=tol, order=order)
    hm = sector_solution(sys, "minus", tol=tol, order=order)
    r = _compare_radius(sys)

    def extract_s_minus(theta):
        f_m = hm.h_at(r * np.exp(1j * theta), sheet_angle=theta) \
            @ _diagonal_factor(sys, r, theta)
        f_p = hp.h_at(r * np.exp(1j * theta), sheet_angle=theta) \
            @ _diagonal_factor(sys, r, theta)
        return np.linalg.solve(f_m, f_p), np.linalg.cond(f_m)

    def extract_s_plus(theta):
        # θ is on the continued sheet of F+, physical angle θ - 2π
        f_pc = hp.h_at(r * np.exp(1j * theta), sheet_angle=theta) \
            @ _diagonal_factor(sys, r, theta)
        phys = theta - 2 * np.pi
        f_m = hm.h_at(r * np.exp(1j * phys), sheet_angle=phys) \
            @ _diagonal_factor(sys, r, phys)
        c = np.linalg.solve(f_pc, f_m)
        e = np.exp(2j * np.pi * np.diag(sys.V))
        return c * e[None, :], np.linalg.cond(f_pc)

    sm_samples, sp_samples, conds = [], [], []
    for theta in (np.pi / 2, np.pi / 4, 3 * np.pi / 4):
        sm, c = extract_s_minus(theta)
        sm_samples.append(sm)
        conds.append(c)
    for theta in (3 * np.pi / 2, 5 * np.pi / 4, 7 * np.pi / 4):
        sp, c = extract_s_plus(theta)
        sp_samples.append(sp)
        conds.append(c)
    s_minus = sm_samples[0]
    s_plus = sp_samples[0]
    res_minus = max(float(np.max(np.abs(s - s_minus))) for s in sm_samples[1:])
    res_plus = max(float(np.max(np.abs(s - s_plus))) for s in sp_samples[1:])
    cond = float(max(conds))
    digits = 15.6 - np.log10(cond)
    if digits < -np.log10(tol):
        warnings.warn(
            f"Stokes solve conditioned to ~{digits:.1f} digits "
            f"(cond {cond:.2e}), below the requested tolerance", stacklevel=2)
    residuals = {
        "s_plus_constancy": res_plus,
        "s_minus_constancy": res_minus,
    }
    return StokesPairClassical(s_plus, s_minus, "cut along (-inf, 0]",
                               residuals, cond, tol)


def monodromy_consistency(sys: IrregularSystem, tol=1e-10,
                          pair: StokesPairClassical | None = None) -> dict:
    """Residual of F+^{loop} = F+ · S+ e^{-2πi[V]} S- for a clockwise loop.

    (A clockwise loop in the z-plane is a counterclockwise loop around the
    irregular point at infinity.)  For skew V the middle factor is the
    identity and the relation is the plain product of the Stokes pair.  The
    loop is run at two radii as independent continuation paths.
    """
    if pair is None:
        pair = stokes_matrices(sys, tol=tol)
    hp = sector_solution(sys, "plus", tol=tol)
    e2 = np.diag(np.exp(-2j * np.pi * np.diag(sys.V)))
    m = pair.s_plus @ e2 @ pair.s_minus
    out = {}
    for label, r in (("loop", _compare_radius(sys)),
                     ("loop_larger_circle", 1.4 * _compare_radius(sys))):
        th0 = np.pi / 2
        f0 = hp.h_at(1j * r, sheet_angle=th0) @ _diagonal_factor(sys, r, th0)
        th1 = th0 - 2 * np.pi
        f1 = hp.h_at(1j * r, sheet_angle=th1) @ _diagonal_factor(sys, r, th1)
        rel = float(np.max(np.abs(f1 - f0 @ m)) / max(1.0, np.max(np.abs(f0))))
        out[label] = rel
    return out


def triangularity_residual(sys: IrregularSystem, pair: StokesPairClassical) -> dict:
    """Deviation of S± from unit upper/lower triangularity.

    Indices are permuted to make u decreasing first; for u1 > ... > un the
    expected pattern is S+ unit upper, S- unit lower.
    """
    perm = np.argsort(-sys.u.real)
    sp = pair.s_plus[np.ix_(perm, perm)]
    sm = pair.s_minus[np.ix_(perm, perm)]
    n = sys.n
    low = np.tril(np.ones((n, n)), -1).astype(bool)
    up = np.triu(np.ones((n, n)), 1).astype(bool)
    return {
        "s_plus_lower_part": float(np.max(np.abs(sp[low]), initial=0.0)),
        "s_plus_diag": float(np.max(np.abs(np.diag(sp) - 1.0))),
        "s_minus_upper_part": float(np.max(np.abs(sm[up]), initial=0.0)),
        "s_minus_diag": float(np.max(np.abs(np.diag(sm) - 1.0))),
    }


def skew_symmetry_identity(sys: IrregularSystem, z_samples: Sequence,
                           tol=1e-10) -> list:
    """Residuals of H^T(-z) H(z) = 1 for skew V.

    H(z) is the plus-sector solution and H(-z) the minus-sector solution at
    the opposite point under the fixed branch; this is the pairing in which
    the identity closes (the identity couples a sector with its opposite).
    """
    if not sys.skew:
        raise StokesError("skew identity requires the skew flag")
    hp = sector_solution(sys, "plus", tol=tol)
    hm = sector_solution(sys, "minus", tol=tol)
    out = []
    for z in z_samples:
        z = complex(z)
        if z.imag <= 0:
            raise StokesError("sample the identity at points of H+")
        a = hm.h_at(-z)
        b = hp.h_at(z)
        out.append(float(np.max(np.abs(a.T @ b - np.eye(sys.n)))))
    return out
