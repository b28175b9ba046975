"""Closed-form estimates for the localization of a broad Gaussian state.

All formulas assume the initial product state built from
psi(X) ~ exp(-X^2 / width^2) in 3D, so the per-component position variance
of |psi|^2 is width^2 / 4 and the relative coordinate X - Y is Gaussian
with per-component standard deviation width / sqrt(2).  Every derived
number states this convention in the report.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np
from scipy import integrate

from .errors import NumericalError
from .potential import MATCH_POINT, V_physical
from .scenario import G_CGS, HBAR_CGS, PROTON_MASS_G, PhysicalScenario, scale

GAUSSIAN_CONVENTION = (
    "psi(X) ~ exp(-X^2/width^2); per-component variance of |psi|^2 is width^2/4"
)


@dataclass(frozen=True)
class GaussianEnergy:
    """Energy expectation of the initial Gaussian pair state, in erg."""

    mean: float
    std: float
    kinetic_mean: float
    potential_mean: float
    potential_std: float

    @property
    def bound_dominance(self) -> float:
        return abs(self.mean) / self.std if self.std > 0 else math.inf


@dataclass(frozen=True)
class EstimateReport:
    """Every closed-form quantity for one scenario, CGS units."""

    virial_energy_erg: float
    localization_length_cm: float
    localization_time_s: float
    branch_count: float
    entropy_over_kb: float
    spreading_time_s: float
    principal_quantum_number: float
    gaussian_energy_erg: float
    gaussian_energy_std_erg: float
    kappa: float
    bound_dominance: float
    convention: str = GAUSSIAN_CONVENTION

    def to_dict(self) -> dict:
        return asdict(self)


def virial_energy(s: PhysicalScenario) -> float:
    """Time-averaged relative kinetic energy G M^2 / width, erg.

    Valid when the initial width dwarfs the ball radius; warns otherwise.
    """
    if s.width_cm < 10.0 * s.radius_cm:
        warnings.warn(
            "width_cm < 10 * radius_cm: the point-mass virial estimate is unreliable",
            stacklevel=2,
        )
    return s.G * s.mass_g**2 / s.width_cm


def localization_length(s: PhysicalScenario) -> float:
    """Phase-variation scale hbar * sqrt(width / (G M^3)), cm."""
    return s.hbar * math.sqrt(s.width_cm / (s.G * s.mass_g**3))


def branch_count(s: PhysicalScenario) -> float:
    """Number of effectively orthogonal localized branches (width/length)^3."""
    return (s.width_cm / localization_length(s)) ** 3


def localization_time(s: PhysicalScenario) -> float:
    """Time hbar * width / (G M^2) for gravity to mix the broad state, s."""
    return s.hbar * s.width_cm / (s.G * s.mass_g**2)


def spreading_time(s: PhysicalScenario) -> float:
    """Center-of-mass sqrt(2)-spreading time of the joint state, s.

    Defined as the t at which the density width of the freely evolving
    center-of-mass Gaussian reaches sqrt(2) times its initial value, for
    total mass 2M and initial per-component variance width^2/8 of the
    midpoint coordinate (X+Y)/2.  Equals M * width^2 / (2 hbar).
    """
    return s.mass_g * s.width_cm**2 / (2.0 * s.hbar)


def hydrogenic_length(s: PhysicalScenario) -> float:
    """Bohr-like length 4 hbar^2/(G M^3) of the relative motion, cm.

    Reduced mass M/2 and halved point-mass attraction G M^2 / (2 d).
    """
    return 4.0 * s.hbar**2 / (s.G * s.mass_g**3)


def principal_quantum_number(s: PhysicalScenario) -> float:
    """Principal number n with orbit radius n^2 a equal to the initial width."""
    return math.sqrt(s.width_cm / hydrogenic_length(s))


def _relative_radial_pdf(s: PhysicalScenario):
    # |X - Y| follows a Maxwell law with per-component sigma = width/sqrt(2)
    sigma = s.width_cm / math.sqrt(2.0)
    norm = math.sqrt(2.0 / math.pi) / sigma**3

    def pdf(r):
        return norm * r * r * np.exp(-r * r / (2.0 * sigma * sigma))

    return pdf, sigma


def _radial_expectation(s: PhysicalScenario, f) -> float:
    pdf, sigma = _relative_radial_pdf(s)
    split = MATCH_POINT * s.radius_cm

    def integrand(r):
        return pdf(r) * f(r)

    tail_cut = max(12.0 * sigma, 2.0 * split)
    a, ea = integrate.quad(integrand, 0.0, split, limit=200)
    b, eb = integrate.quad(integrand, split, tail_cut, limit=200)
    c, ec = integrate.quad(integrand, tail_cut, np.inf, limit=200)
    if not all(map(math.isfinite, (a, b, c))):
        raise NumericalError("radial quadrature produced a non-finite value")
    return a + b + c


def gaussian_energy(s: PhysicalScenario) -> GaussianEnergy:
    """Energy expectation and spread of the initial Gaussian pair state.

    Potential moments come from radial quadrature of the pair potential
    against the Maxwell law of the relative distance; the kinetic part of
    both bodies is analytic, 3 hbar^2 / (M width^2) in total.  The tiny
    kinetic-potential covariance is neglected.
    """
    v_mean = _radial_expectation(s, lambda r: V_physical(r, s))
    v_sq = _radial_expectation(s, lambda r: V_physical(r, s) ** 2)
    v_var = max(v_sq - v_mean * v_mean, 0.0)
    kinetic = 3.0 * s.hbar**2 / (s.mass_g * s.width_cm**2)
    kin_var = kinetic * kinetic / 3.0
    return GaussianEnergy(
        mean=kinetic + v_mean,
        std=math.sqrt(v_var + kin_var),
        kinetic_mean=kinetic,
        potential_mean=v_mean,
        potential_std=math.sqrt(v_var),
    )


def monte_carlo_potential(
    s: PhysicalScenario,
    samples: int = 10**6,
    seed: int = 0,
    chunk: int = 10**6,
) -> tuple[float, float]:
    """Monte-Carlo mean of the pair potential over the 6D Gaussian state.

    Samples both 3D positions with per-component std width/2, averages the
    potential of their separation, and returns (mean, standard error).
    Cross-check for the quadrature path in gaussian_energy.
    """
    rng = np.random.default_rng(seed)
    comp_sigma = s.width_cm / 2.0
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = rng.normal(0.0, comp_sigma, size=(m, 3))
        y = rng.normal(0.0, comp_sigma, size=(m, 3))
        r = np.linalg.norm(x - y, axis=1)
        v = V_physical(r, s)
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += m
    mean = total / samples
    var = total_sq / samples - mean * mean
    return mean, math.sqrt(max(var, 0.0) / samples)


def threshold_mass(density_g_cm3: float, kappa_star: float, G: float = G_CGS,
                   hbar: float = HBAR_CGS) -> float:
    """Mass in grams at which a ball of the given density reaches kappa_star.

    Solves G M^3 R(M) / hbar^2 = kappa_star with R = (3M / 4 pi rho)^(1/3),
    so M = (kappa_star hbar^2 / G)^(3/10) * (4 pi rho / 3)^(1/10).
    """
    if density_g_cm3 <= 0:
        raise ValueError("density must be positive")
    if kappa_star <= 0:
        raise ValueError("kappa_star must be positive")
    return (kappa_star * hbar**2 / G) ** 0.3 * (4.0 * math.pi * density_g_cm3 / 3.0) ** 0.1


def threshold_mass_protons(density_g_cm3: float, kappa_star: float) -> float:
    return threshold_mass(density_g_cm3, kappa_star) / PROTON_MASS_G


def report(s: PhysicalScenario, kappa_star: float = 1.0) -> EstimateReport:
    """Assemble every closed-form quantity for one scenario."""
    n_branches = branch_count(s)
    energy = gaussian_energy(s)
    return EstimateReport(
        virial_energy_erg=virial_energy(s),
        localization_length_cm=localization_length(s),
        localization_time_s=localization_time(s),
        branch_count=n_branches,
        entropy_over_kb=math.log(n_branches),
        spreading_time_s=spreading_time(s),
        principal_quantum_number=principal_quantum_number(s),
        gaussian_energy_erg=energy.mean,
        gaussian_energy_std_erg=energy.std,
        kappa=scale(s).kappa,
        bound_dominance=energy.bound_dominance,
    )
