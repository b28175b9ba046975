"""Physical scenarios and their single-coupling dimensionless form.

All dynamics downstream run in scaled units: lengths in units of the ball
radius R, energies in units of eps = G M^2 / R, times in units of
hbar / eps.  With that choice the joint equation of motion for the body
and its twin copy keeps a single dimensionless coupling

    kappa = G M^3 R / hbar^2

which is the only knob the propagator and spectrum modules see.  CGS units
throughout; constants default to CODATA values and can be overridden for
testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import DomainError

G_CGS = 6.67430e-8            # cm^3 g^-1 s^-2
HBAR_CGS = 1.054571817e-27    # erg s
KB_CGS = 1.380649e-16         # erg / K
PROTON_MASS_G = 1.67262192369e-24  # g


class ScenarioError(DomainError):
    """Bad physical parameters or a malformed scenario file."""


@dataclass(frozen=True)
class PhysicalScenario:
    """A uniform matter ball and the initial spread of its center of mass.

    ``width_cm`` is the width parameter of the initial Gaussian wave
    function psi(X) ~ exp(-X^2 / width_cm^2), so the per-component
    position variance of |psi|^2 is width_cm^2 / 4.  width_cm >> radius_cm
    is not enforced here; estimates that rely on it check it themselves.
    """

    mass_g: float
    radius_cm: float
    width_cm: float
    G: float = G_CGS
    hbar: float = HBAR_CGS
    k_B: float = KB_CGS

    def __post_init__(self) -> None:
        for name in ("mass_g", "radius_cm", "width_cm", "G", "hbar", "k_B"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ScenarioError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def scaled_width(self) -> float:
        """Initial width in units of the ball radius."""
        return self.width_cm / self.radius_cm


@dataclass(frozen=True)
class ScaledScenario:
    """Unit factors of the dimensionless frame and the coupling kappa."""

    kappa: float
    length_unit: float   # cm,  equals the ball radius R
    energy_unit: float   # erg, equals G M^2 / R
    time_unit: float     # s,   equals hbar / energy_unit

    def scale_length(self, x_cm: float) -> float:
        return x_cm / self.length_unit

    def scale_energy(self, e_erg: float) -> float:
        return e_erg / self.energy_unit

    def scale_time(self, t_s: float) -> float:
        return t_s / self.time_unit

    def unscale_length(self, x: float) -> float:
        return x * self.length_unit

    def unscale_energy(self, e: float) -> float:
        return e * self.energy_unit

    def unscale_time(self, t: float) -> float:
        return t * self.time_unit


def scale(s: PhysicalScenario) -> ScaledScenario:
    """Collapse the five physical parameters to the single coupling kappa."""
    kappa = s.G * s.mass_g**3 * s.radius_cm / s.hbar**2
    energy_unit = s.G * s.mass_g**2 / s.radius_cm
    return ScaledScenario(
        kappa=kappa,
        length_unit=s.radius_cm,
        energy_unit=energy_unit,
        time_unit=s.hbar / energy_unit,
    )


_REQUIRED_KEYS = ("mass_g", "radius_cm", "width_cm")
_OPTIONAL_KEYS = ("G", "hbar", "k_B")


def load_scenario(path) -> PhysicalScenario:
    """Read a scenario from a plain key=value text file.

    Recognized keys: mass_g, radius_cm, width_cm and the optional constant
    overrides G, hbar, k_B.  '#' starts a comment, blank lines are ignored.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _REQUIRED_KEYS + _OPTIONAL_KEYS:
            raise ScenarioError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ScenarioError(f"{path}:{lineno}: cannot parse {val!r} as a number") from None
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ScenarioError(f"{path}: missing required keys: {', '.join(missing)}")
    return PhysicalScenario(**values)
