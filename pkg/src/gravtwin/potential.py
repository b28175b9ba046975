"""Halved mutual gravity of two interpenetrating uniform balls.

The body and its twin copy attract with half the Newton constant.  For two
uniform balls of equal mass and radius the mutual energy is a quintic in
the separation while they overlap and the plain point-mass law outside.
In scaled units (separation u in ball radii, energy in G M^2 / R):

    v(u) = -1/2 * (6/5 - u^2/2 + 3 u^3/16 - u^5/160)   for u <= 2
    v(u) = -1/(2 u)                                     for u >= 2

The closed form is the production path.  ``v_oracle`` below establishes it
independently with a direct 2D quadrature of the exact ball potential
against the partner's density; it is a test-only dependency and never
feeds production code.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError
from .scenario import PhysicalScenario

MATCH_POINT = 2.0    # separation, in ball radii, at which the balls separate
DEPTH = -0.6         # v(0), half the -6/5 coincident-ball mutual energy
CONTACT_VALUE = -0.25


def _overlap_branch(u):
    return -0.5 * (6.0 / 5.0 - u * u / 2.0 + 3.0 * u**3 / 16.0 - u**5 / 160.0)


def _tail_branch(u):
    return -1.0 / (2.0 * u)


def _overlap_branch_prime(u):
    return -0.5 * (-u + 9.0 * u * u / 16.0 - u**4 / 32.0)


def _tail_branch_prime(u):
    return 1.0 / (2.0 * u * u)


def v_scaled(u):
    """Scaled pair potential; accepts scalars or arrays, requires u >= 0."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0):
        raise DomainError("separation must be non-negative")
    out = np.empty_like(arr)
    inner = arr <= MATCH_POINT
    out[inner] = _overlap_branch(arr[inner])
    out[~inner] = _tail_branch(arr[~inner])
    if np.isscalar(u) or arr.ndim == 0:
        return float(out)
    return out


def v_scaled_prime(u):
    """Derivative dv/du of the scaled potential (per branch, u >= 0)."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0):
        raise DomainError("separation must be non-negative")
    out = np.empty_like(arr)
    inner = arr <= MATCH_POINT
    out[inner] = _overlap_branch_prime(arr[inner])
    out[~inner] = _tail_branch_prime(arr[~inner])
    if np.isscalar(u) or arr.ndim == 0:
        return float(out)
    return out


def V_physical(d_cm, s: PhysicalScenario):
    """Pair potential in erg at center separation d_cm."""
    eps = s.G * s.mass_g**2 / s.radius_cm
    return eps * v_scaled(np.asarray(d_cm, dtype=float) / s.radius_cm)


def _ball_potential(r: float) -> float:
    # potential of a unit ball (G = M = R = 1) at distance r from its center
    if r >= 1.0:
        return -1.0 / r
    return -0.5 * (3.0 - r * r)


def v_oracle(u: float, abs_tol: float = 1e-6) -> float:
    """Halved mutual energy by direct quadrature, ground truth for v_scaled.

    Integrates the exact interior/exterior potential of ball 1 over the
    density of ball 2 in cylindrical (s, z) coordinates, exploiting axial
    symmetry.  The surface of ball 1 crosses the integration domain, so the
    inner integral is split at the crossing.
    """
    if u < 0:
        raise DomainError("separation must be non-negative")
    rho = 3.0 / (4.0 * math.pi)

    def inner(z: float) -> float:
        s_max = math.sqrt(max(1.0 - z * z, 0.0))
        if s_max == 0.0:
            return 0.0

        def f(sc: float) -> float:
            r = math.hypot(sc, z + u)
            return 2.0 * math.pi * sc * _ball_potential(r)

        crossing = 1.0 - (z + u) ** 2
        pts = None
        if crossing > 0.0:
            s_star = math.sqrt(crossing)
            if 0.0 < s_star < s_max:
                pts = [s_star]
        val, _ = integrate.quad(f, 0.0, s_max, points=pts, limit=200,
                                epsabs=1e-11, epsrel=1e-10)
        return val

    z_pts = [z for z in (1.0 - u, -1.0 - u) if -1.0 < z < 1.0] or None
    val, err = integrate.quad(inner, -1.0, 1.0, points=z_pts, limit=200,
                              epsabs=abs_tol / 20.0, epsrel=1e-9)
    if err > abs_tol:
        raise NumericalError(f"overlap quadrature error {err:.2e} above {abs_tol:.0e}")
    return 0.5 * rho * val
