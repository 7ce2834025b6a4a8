"""Interactive multiparticle quantum simulator on a periodic 2D grid.

Distinguishable particles bound by springs to their common force-balance
center evolve under the discretized time-dependent Schroedinger equation;
position measurements probabilistically collapse one particle at a time.
"""

from .errors import QLatticeError, SnapshotError, UnstableStepError
from .evolve import choose_dt, dense_hamiltonian, dense_oracle_evolve, step
from .grid import Cell, Configuration, GridSpec, config_index, index_to_config
from .hamiltonian import (
    apply_hamiltonian,
    apply_kinetic,
    center_of_force,
    energy_bound,
    kinetic_energy,
    potential_at,
    potential_energy,
    total_energy,
)
from .initial import GaussianSpec, gaussian_product_state
from .measure import MeasurementOutcome, collapse, detection_probs, sample_detection
from .model import DisplayChannel, ModelParams, ParticleSpec, PotentialMode, SimConfig
from .session import (
    EventAction,
    FrameRecord,
    FrameStats,
    ScenarioEvent,
    Session,
    SessionStatus,
    run_scenario,
)
from .snapshot import load_snapshot, save_snapshot
from .state import (
    Marginal2D,
    WaveFunction,
    all_marginals,
    delta_state,
    expected_position,
    marginal,
    normalize,
    uniform_state,
)

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "Configuration",
    "DisplayChannel",
    "EventAction",
    "FrameRecord",
    "FrameStats",
    "GaussianSpec",
    "GridSpec",
    "Marginal2D",
    "MeasurementOutcome",
    "ModelParams",
    "ParticleSpec",
    "PotentialMode",
    "QLatticeError",
    "ScenarioEvent",
    "Session",
    "SessionStatus",
    "SimConfig",
    "SnapshotError",
    "UnstableStepError",
    "WaveFunction",
    "all_marginals",
    "apply_hamiltonian",
    "apply_kinetic",
    "center_of_force",
    "choose_dt",
    "collapse",
    "config_index",
    "delta_state",
    "dense_hamiltonian",
    "dense_oracle_evolve",
    "detection_probs",
    "energy_bound",
    "expected_position",
    "gaussian_product_state",
    "index_to_config",
    "kinetic_energy",
    "load_snapshot",
    "marginal",
    "normalize",
    "potential_at",
    "potential_energy",
    "run_scenario",
    "sample_detection",
    "save_snapshot",
    "step",
    "total_energy",
    "uniform_state",
]
