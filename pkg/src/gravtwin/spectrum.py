"""Bound levels of the relative motion and the self-localization threshold.

The s-wave reduced radial problem is

    -(1/kappa) w'' + v(u) w = e w,    w(0) = 0,  w(u_max) = 0,

integrated outward by Numerov's rule.  By Sturm oscillation the number of
interior sign changes of w at trial energy e equals the number of
eigenvalues below e, so each level is found by bisection on that count
alone; the count jumps exactly where the boundary value crosses zero.

The pair potential keeps an attractive 1/(2u) tail, which in an infinite
domain binds at any coupling: arbitrarily shallow hydrogen-like orbits
always exist far outside the ball.  "Self-localized" therefore means bound
within a fixed neighborhood of the ball.  threshold_kappa operationalizes
that as the coupling at which the lowest Dirichlet level on
u in [0, THRESHOLD_U_MAX] ball radii crosses zero; the choice of wall is
part of the definition and is held fixed while the grid is refined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .dynamics import RadialGrid
from .errors import DomainError, NumericalError
from .potential import v_scaled

DEFAULT_GRID = RadialGrid(u_max=40.0, points=16384)

THRESHOLD_U_MAX = 20.0
THRESHOLD_GRID = RadialGrid(u_max=THRESHOLD_U_MAX, points=8192)


@njit(cache=True)
def _numerov_sweep(e: float, kappa: float, v: np.ndarray, h: float):
    """Outward Numerov integration of w'' = kappa (v - e) w from w(0) = 0.

    Returns (interior sign changes, boundary value).  The solution is
    rescaled whenever it grows huge, which changes neither quantity's sign.
    """
    n = v.shape[0]
    c = h * h / 12.0
    g_prev = kappa * (v[0] - e)
    g_curr = kappa * (v[1] - e)
    y_prev = 0.0
    y_curr = h
    nodes = 0
    for j in range(1, n - 1):
        g_next = kappa * (v[j + 1] - e)
        y_next = (2.0 * y_curr * (1.0 + 5.0 * c * g_curr)
                  - y_prev * (1.0 - c * g_prev)) / (1.0 - c * g_next)
        if y_next * y_curr < 0.0:
            nodes += 1
        y_prev = y_curr
        y_curr = y_next
        g_prev = g_curr
        g_curr = g_next
        a = abs(y_curr)
        if a > 1e250:
            y_prev /= a
            y_curr /= a
    return nodes, y_curr


@njit(cache=True)
def _numerov_state(e: float, kappa: float, v: np.ndarray, h: float) -> np.ndarray:
    """Eigenfunction at a converged energy by two-sided Numerov integration.

    Pure outward integration is useless for output: any residual error in e
    excites the exponentially growing solution in the forbidden tail.  So
    integrate outward to the outermost classical turning point, inward from
    the wall, and splice the two at the matching index.
    """
    n = v.shape[0]
    c = h * h / 12.0
    g = kappa * (v - e)
    # outermost sign change of g marks the turning point; keep a margin
    icl = n - 2
    for j in range(n - 2, 0, -1):
        if g[j] <= 0.0:
            icl = j
            break
    if icl < 2:
        icl = 2
    if icl > n - 3:
        icl = n - 3

    y = np.zeros(n)
    y[1] = h
    for j in range(1, icl + 1):
        y[j + 1] = (2.0 * y[j] * (1.0 + 5.0 * c * g[j])
                    - y[j - 1] * (1.0 - c * g[j - 1])) / (1.0 - c * g[j + 1])
        a = abs(y[j + 1])
        if a > 1e250:
            y[: j + 2] /= a

    z = np.zeros(n)
    z[n - 2] = h
    for j in range(n - 2, icl, -1):
        z[j - 1] = (2.0 * z[j] * (1.0 + 5.0 * c * g[j])
                    - z[j + 1] * (1.0 - c * g[j + 1])) / (1.0 - c * g[j - 1])
        a = abs(z[j - 1])
        if a > 1e250:
            z[j - 1:] /= a

    if z[icl + 1] != 0.0:
        scale_in = y[icl + 1] / z[icl + 1]
    else:
        scale_in = 1.0
    for j in range(icl + 1, n):
        y[j] = z[j] * scale_in
    return y


@dataclass
class SpectrumResult:
    """Negative-energy levels found for one coupling, ascending."""

    kappa: float
    eigenvalues: np.ndarray
    node_counts: list[int]
    grid: RadialGrid
    states: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _potential_nodes(grid: RadialGrid, potential) -> np.ndarray:
    return np.asarray(potential(grid.nodes), dtype=float)


def radial_shoot(
    kappa: float,
    e_range: tuple[float, float] | None = None,
    grid: RadialGrid | None = None,
    max_states: int | None = None,
    tol: float = 1e-8,
    potential=v_scaled,
    return_states: bool = False,
) -> SpectrumResult:
    """All bound s-wave levels in e_range by node-counting bisection.

    The default energy window spans (min v, 0); an empty window or a
    coupling too weak to bind simply yields an empty result.  Eigenvalue k
    has exactly k interior nodes by construction.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    grid = grid or DEFAULT_GRID
    v = _potential_nodes(grid, potential)
    h = grid.spacing
    e_lo_default = float(v.min()) - 10.0 * tol
    e_hi_default = -1e-12
    if e_range is None:
        e_lo, e_hi = e_lo_default, e_hi_default
    else:
        e_lo, e_hi = e_range
        if e_lo >= e_hi:
            raise DomainError("e_range must be increasing")
        e_hi = min(e_hi, e_hi_default)
        e_lo = max(e_lo, e_lo_default)
        if e_lo >= e_hi:
            return SpectrumResult(kappa, np.empty(0), [], grid)

    def count(e: float) -> int:
        return _numerov_sweep(e, kappa, v, h)[0]

    offset = count(e_lo)  # levels below the window, normally zero
    total = count(e_hi) - offset
    if max_states is not None:
        total = min(total, max_states)
    eigenvalues = []
    lo = e_lo
    for k in range(total):
        target = offset + k + 1
        a, b = lo, e_hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if count(mid) >= target:
                b = mid
            else:
                a = mid
        eigenvalues.append(0.5 * (a + b))
        lo = b
    result = SpectrumResult(kappa, np.asarray(eigenvalues), list(range(total)), grid)
    if return_states:
        for e in eigenvalues:
            y = _numerov_state(e, kappa, v, h)
            norm = np.sqrt(np.sum(y * y) * h)
            result.states.append(y / norm)
    return result


def bound_state_count(kappa: float, grid: RadialGrid | None = None,
                      potential=v_scaled) -> int:
    """Number of negative-energy levels on the given domain."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    grid = grid or DEFAULT_GRID
    v = _potential_nodes(grid, potential)
    return _numerov_sweep(-1e-12, kappa, v, grid.spacing)[0]


def threshold_kappa(
    grid: RadialGrid | None = None,
    bracket: tuple[float, float] = (0.05, 5.0),
    rel_tol: float = 5e-4,
    potential=v_scaled,
) -> float:
    """Smallest coupling with a self-localized level, to 3 significant figures.

    Bisects the coupling on the existence of any negative Dirichlet level
    on the fixed threshold domain (see the module docstring for why the
    wall is part of the definition).
    """
    grid = grid or THRESHOLD_GRID
    lo, hi = bracket
    if not bound_state_count(hi, grid, potential):
        raise NumericalError(f"no bound state even at kappa = {hi}")
    if bound_state_count(lo, grid, potential):
        raise NumericalError(f"bound state already present at kappa = {lo}")
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if bound_state_count(mid, grid, potential):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
