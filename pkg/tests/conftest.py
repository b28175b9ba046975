import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gravtwin import (
    FactoredEvolution,
    Grid,
    PhysicalScenario,
    PropagatorConfig,
    coherence_length,
    partial_trace,
    physical_energy,
    v_scaled,
    von_neumann_entropy,
)

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

np.seterr(over="raise", invalid="raise", divide="raise", under="ignore")


@pytest.fixture(scope="session")
def example_scenario():
    """The standard 1e-9 g / 1e-3 cm / 0.1 cm ball."""
    return PhysicalScenario(mass_g=1e-9, radius_cm=1e-3, width_cm=1e-1)


DESK_KAPPA = 25.0
DESK_LAMBDA0 = 10.0
DESK_XY_GRID = Grid(96.0, 512)
DESK_REL_GRID = Grid(192.0, 2048)
DESK_DT = 0.01
DESK_SNAP_STEPS = 100
DESK_SNAPS = 20  # t runs 0..20 in steps of 1


@pytest.fixture(scope="session")
def tail_levels_kappa100():
    """First 100 radial levels at kappa = 100 on a wall wide enough for n ~ 100."""
    from gravtwin import RadialGrid, radial_shoot

    grid = RadialGrid(u_max=900.0, points=220000)
    return radial_shoot(100.0, grid=grid, max_states=100, tol=1e-9)


@pytest.fixture(scope="session")
def desk_localization_run():
    """Shared factored desk run (kappa 25, width 10, t = 0..20).

    Returns the per-snapshot series the localization criteria read, plus
    the final relative field diagnostics.  Computed once per session; the
    run is deterministic.
    """
    cfg = PropagatorConfig(dt=DESK_DT, steps_per_snapshot=DESK_SNAP_STEPS)
    fac = FactoredEvolution(DESK_LAMBDA0, DESK_KAPPA, DESK_REL_GRID, cfg)
    series = []
    for snap in range(DESK_SNAPS + 1):
        joint = fac.reconstruct(DESK_XY_GRID)
        dm = partial_trace(joint)
        dm.validate()
        coh = coherence_length(dm)
        series.append({
            "time": snap * DESK_SNAP_STEPS * DESK_DT,
            "entropy": von_neumann_entropy(dm),
            "coherence_length": coh.length,
            "coherence_decayed": coh.decayed,
            "diagonal_width": dm.diagonal_width(),
            "purity": dm.purity(),
        })
        if snap < DESK_SNAPS:
            fac.advance(DESK_SNAP_STEPS)
    energy = physical_energy(fac.rel, v_scaled, DESK_KAPPA)
    return {
        "series": series,
        "final_energy": energy,
        "com_width_growth": fac.com.density_std() / (DESK_LAMBDA0 / math.sqrt(2.0)) - 1.0,
        "kappa": DESK_KAPPA,
        "lambda0": DESK_LAMBDA0,
    }
