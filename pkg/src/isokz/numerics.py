"""Adaptive complex-path ODE integration and path geometry.

The stepper is an embedded Dormand–Prince 5(4) pair, written dtype-generically
so the same code runs in complex128 or (via ISOKZ_PRECISION=longdouble)
complex256 where the platform provides it.  Linear systems here are integrated
along explicit paths in the z-plane: straight segments and origin-centered
arcs, which is all the sectorial continuation geometry needs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class IntegrationError(RuntimeError):
    """Step-size underflow or step budget exhausted; carries diagnostics."""


def working_dtype():
    """Complex dtype selected by ISOKZ_PRECISION (double | longdouble)."""
    name = os.environ.get("ISOKZ_PRECISION", "double").lower()
    if name in ("double", "complex128", ""):
        return np.complex128
    if name in ("longdouble", "extended", "clongdouble"):
        return np.clongdouble
    raise ValueError(f"unknown ISOKZ_PRECISION value: {name!r}")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])


def solve_ivp_dopri5(f, t0, t1, y0, rtol=1e-10, atol=1e-12,
                     max_steps=200_000, dense_points=None):
    """Integrate y' = f(t, y) from t0 to t1 (real t, array y, any dtype).

    Returns (y(t1), samples) where samples collects y at the requested
    ``dense_points`` (monotone, inside [t0, t1]), interpolated linearly
    within accepted steps at sub-rtol resolution only if a point is hit;
    points are instead integrated to exactly by step clipping.
    """
    y = np.asarray(y0).copy()
    t = float(t0)
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0:
        return y, [y.copy() for _ in (dense_points or [])]
    targets = list(dense_points) if dense_points else []
    for p in targets:
        if (p - t0) * direction < -1e-15 or (t1 - p) * direction < -1e-15:
            raise ValueError("dense point outside the integration interval")
    samples = []
    h = direction * span * 0.05
    k = [None] * 7
    steps = 0
    while (t1 - t) * direction > 1e-15 * max(1.0, abs(t1)):
        if steps >= max_steps:
            raise IntegrationError(
                f"step budget exhausted at t={t:.6g} (|y|max={np.max(np.abs(y)):.3g})")
        h = direction * min(abs(h), abs(t1 - t))
        while targets and (targets[0] - t) * direction <= abs(h) * (1 + 1e-12):
            h = targets[0] - t
            if abs(h) < 1e-15 * max(1.0, abs(t)):
                samples.append(y.copy())
                targets.pop(0)
                h = direction * span * 0.01
                continue
            break
        k[0] = f(t, y)
        failed = False
        for i in range(1, 7):
            yi = y + h * sum(aij * k[j] for j, aij in enumerate(_A[i]))
            k[i] = f(t + _C[i] * h, yi)
        y5 = y + h * sum(b * k[i] for i, b in enumerate(_B5) if b != 0.0)
        y4 = y + h * sum(b * k[i] for i, b in enumerate(_B4) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean((np.abs(y5 - y4) / scale) ** 2)))
        if not np.isfinite(err):
            failed = True
            err = 10.0
        if err <= 1.0:
            t_new = t + h
            if targets and abs(t_new - targets[0]) <= 1e-12 * max(1.0, abs(t_new)):
                samples.append(y5.copy())
                targets.pop(0)
            t, y = t_new, y5
        factor = 0.9 * err ** -0.2 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(
                f"step size underflow at t={t:.6g} (local error {err:.3g}); "
                "the path may pass too close to a singularity")
        steps += 1
        if failed and steps >= max_steps:
            raise IntegrationError("repeated step failures")
    while targets:
        samples.append(y.copy())
        targets.pop(0)
    return y, samples


# -- path geometry ------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Straight segment from z0 to z1."""
    z0: complex
    z1: complex

    def point(self, s):
        return self.z0 + (self.z1 - self.z0) * s

    def velocity(self, s):
        return self.z1 - self.z0


@dataclass(frozen=True)
class Arc:
    """Origin-centered arc of given radius from angle th0 to th1 (radians).

    Angles are *not* reduced mod 2π, so arcs encode analytic-continuation
    sheets: th 0 -> 2π is a full counterclockwise loop.
    """
    radius: float
    th0: float
    th1: float

    def point(self, s):
        th = self.th0 + (self.th1 - self.th0) * s
        return self.radius * np.exp(1j * th)

    def velocity(self, s):
        th = self.th0 + (self.th1 - self.th0) * s
        return self.radius * 1j * (self.th1 - self.th0) * np.exp(1j * th)


def integrate_along(rhs, pieces, y0, rtol=1e-10, atol=1e-12, max_steps=200_000):
    """Integrate dy/dz = rhs(z, y) along a list of Segment/Arc pieces."""
    y = np.asarray(y0, dtype=np.result_type(working_dtype(), np.asarray(y0).dtype))
    for piece in pieces:
        def f(s, v, piece=piece):
            return piece.velocity(s) * rhs(piece.point(s), v)
        y, _ = solve_ivp_dopri5(f, 0.0, 1.0, y, rtol=rtol, atol=atol,
                                max_steps=max_steps)
    return y


def nodes_of(pieces):
    """Endpoint chain of a piece list (for diagnostics)."""
    pts = [pieces[0].point(0.0)]
    for p in pieces:
        pts.append(p.point(1.0))
    return pts
