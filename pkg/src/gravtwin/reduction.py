"""Physical-state extraction: partial trace, entropy, coherence length.

Tracing the twin coordinate out of the joint state gives the reduced
kernel rho(x, x') = integral dy F(x, y) conj(F(x', y)) of the joint state
F.  On the grid the
kernel is stored with continuum normalization, sum of the diagonal times
the spacing equal to one; the discrete density operator whose eigenvalues
are the branch probabilities is the kernel times the spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ComplexField, Grid, apply_hamiltonian
from .errors import DomainError

ENTROPY_EIGENVALUE_CUTOFF = 1e-14


class DensityMatrix:
    """Reduced state on a 1D grid: Hermitian, positive, unit trace."""

    def __init__(self, grid: Grid, kernel: np.ndarray):
        kernel = np.asarray(kernel, dtype=complex)
        if kernel.shape != (grid.points, grid.points):
            raise DomainError("kernel shape does not match the grid")
        if not np.all(np.isfinite(kernel.view(float))):
            raise DomainError("kernel contains non-finite entries")
        tr = float(np.real(np.trace(kernel))) * grid.spacing
        if tr <= 0:
            raise DomainError("kernel trace must be positive")
        self.grid = grid
        self.kernel = kernel / tr
        self._probabilities = None

    def trace(self) -> float:
        return float(np.real(np.trace(self.kernel))) * self.grid.spacing

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.kernel - self.kernel.conj().T)))

    def probabilities(self) -> np.ndarray:
        """Eigenvalues of the discrete density operator, descending."""
        if self._probabilities is None:
            herm = 0.5 * (self.kernel + self.kernel.conj().T)
            eig = np.linalg.eigvalsh(herm) * self.grid.spacing
            self._probabilities = eig[::-1]
        return self._probabilities

    def purity(self) -> float:
        p = self.probabilities()
        return float(np.sum(p * p))

    def min_eigenvalue(self) -> float:
        return float(self.probabilities()[-1])

    def diagonal(self) -> np.ndarray:
        """Position density rho(x, x), real and non-negative up to roundoff."""
        return np.real(np.diag(self.kernel))

    def diagonal_width(self) -> float:
        p = np.clip(self.diagonal(), 0.0, None)
        p = p / p.sum()
        x = self.grid.coords
        mean = float(np.sum(p * x))
        return math.sqrt(max(float(np.sum(p * (x - mean) ** 2)), 0.0))

    def validate(self, herm_tol: float = 1e-12, psd_tol: float = -1e-10,
                 trace_tol: float = 1e-10) -> None:
        if self.hermiticity_residual() > herm_tol:
            raise DomainError("reduced state is not Hermitian to tolerance")
        if self.min_eigenvalue() < psd_tol:
            raise DomainError("reduced state has a negative eigenvalue beyond tolerance")
        if abs(self.trace() - 1.0) > trace_tol:
            raise DomainError("reduced state trace is off unity")


def partial_trace(field: ComplexField) -> DensityMatrix:
    """Trace the twin coordinate (second axis) out of a joint 2D state."""
    if field.ndim != 2:
        raise DomainError("partial trace needs a 2D joint field")
    vals = field.values
    kernel = vals @ vals.conj().T * field.grid.spacing
    return DensityMatrix(field.grid, kernel)


def von_neumann_entropy(dm: DensityMatrix,
                        cutoff: float = ENTROPY_EIGENVALUE_CUTOFF) -> float:
    """-sum p ln p over eigenvalues above cutoff, in nats.

    The cutoff drops roundoff-sized eigenvalues whose sign is noise;
    without it a -1e-16 eigenvalue poisons the logarithm.
    """
    p = dm.probabilities()
    p = p[p > cutoff]
    return float(-np.sum(p * np.log(p))) + 0.0


@dataclass(frozen=True)
class CoherenceLength:
    """Half-decay scale of the off-diagonal kernel magnitude.

    decayed is False when the profile never falls below half its s = 0
    value inside the box; length then holds the box extent as a sentinel.
    """

    length: float
    decayed: bool
    separations: np.ndarray
    profile: np.ndarray


def coherence_length(dm: DensityMatrix) -> CoherenceLength:
    """Half-width of C(s), the diagonal-weighted mean of |rho| at separation s.

    C(s) averages |rho(x + s, x)| over x with weight sqrt(p(x) p(x + s)),
    a discrete stand-in for the diagonal probability at the midpoint; the
    weighting keeps the estimator robust to the oscillatory phases the
    localized regime develops.
    """
    n = dm.grid.points
    h = dm.grid.spacing
    p = np.clip(dm.diagonal(), 0.0, None)
    profile = np.empty(n)
    for m in range(n):
        off = np.abs(np.diagonal(dm.kernel, offset=-m))
        w = np.sqrt(p[m:] * p[: n - m])
        wsum = w.sum()
        profile[m] = float((w * off).sum() / wsum) if wsum > 0 else 0.0
    seps = np.arange(n) * h
    half = profile[0] / 2.0
    below = np.nonzero(profile < half)[0]
    if below.size == 0:
        return CoherenceLength(dm.grid.extent, False, seps, profile)
    m = int(below[0])
    if m == 0:
        return CoherenceLength(0.0, True, seps, profile)
    frac = (profile[m - 1] - half) / (profile[m - 1] - profile[m])
    return CoherenceLength((m - 1 + frac) * h, True, seps, profile)


@dataclass(frozen=True)
class EnergyExpectation:
    """Mean and spread of the scaled Hamiltonian in a given state."""

    mean: float
    std: float

    @property
    def bound_dominance(self) -> float:
        return abs(self.mean) / self.std if self.std > 0 else math.inf


def physical_energy(field: ComplexField, potential, kappa: float) -> EnergyExpectation:
    """Spectral expectation and standard deviation of the energy.

    2D input uses the joint Hamiltonian, 1D input the relative-motion one
    (reduced mass kappa/2).  The ratio |mean| / std measures how dominated
    the state is by bound levels.
    """
    vals = field.normalized().values
    h = field.grid.spacing**field.ndim
    hpsi = apply_hamiltonian(ComplexField(field.grid, vals), potential, kappa)
    mean = float(np.real(np.sum(np.conj(vals) * hpsi)) * h)
    second = float(np.sum(np.abs(hpsi) ** 2) * h)
    var = max(second - mean * mean, 0.0)
    return EnergyExpectation(mean=mean, std=math.sqrt(var))
