"""Localization dynamics of a self-gravitating body coupled to its hidden twin.

The package propagates the joint wavefunction of a uniform matter ball and
an unobservable twin copy attracting each other with half the Newton
constant, reduces it to the physical density matrix by tracing the twin
out, and quantifies the resulting entropic localization.  A closed-form
estimates engine and a bound-state spectrum solver cover the regimes a
grid cannot reach.
"""

__version__ = "0.1.0"

from .scenario import (  # noqa: F401
    G_CGS,
    HBAR_CGS,
    KB_CGS,
    PROTON_MASS_G,
    PhysicalScenario,
    ScaledScenario,
    ScenarioError,
    load_scenario,
    scale,
)
from .potential import V_physical, v_oracle, v_scaled, v_scaled_prime  # noqa: F401
from .estimates import (  # noqa: F401
    EstimateReport,
    GaussianEnergy,
    branch_count,
    gaussian_energy,
    localization_length,
    localization_time,
    monte_carlo_potential,
    principal_quantum_number,
    report,
    spreading_time,
    threshold_mass,
    threshold_mass_protons,
    virial_energy,
)
from .dynamics import (  # noqa: F401
    ComplexField,
    FactoredEvolution,
    FreeGaussian,
    Grid,
    GroundStateResult,
    PropagatorConfig,
    RadialGrid,
    SplitStepPropagator,
    apply_hamiltonian,
    evolve_factored,
    fidelity,
    free_gaussian_width,
    imaginary_time_ground_state,
    split_step,
    init_gaussian_pair,
    init_gaussian_relative,
    make_pair_propagator,
    make_relative_propagator,
    suggested_dt,
)
from .spectrum import (  # noqa: F401
    SpectrumResult,
    bound_state_count,
    radial_shoot,
    threshold_kappa,
)
from .reduction import (  # noqa: F401
    CoherenceLength,
    DensityMatrix,
    EnergyExpectation,
    coherence_length,
    partial_trace,
    physical_energy,
    von_neumann_entropy,
)
from .errors import ConfigError, DomainError, NumericalError  # noqa: F401
