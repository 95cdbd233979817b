"""Stroboscopic Gaussian dynamics of a mechanical mode under periodic
optical-spring kicks: exact free-evolution propagators, per-kick moment
updates, stationary states, squeezing metrics, pulse-level kick-strength
calculation, and noisy-kick ensembles."""

from .config import (
    BathConfig,
    ConfigError,
    EnsembleConfig,
    PhysicalKick,
    RunConfig,
    Schedule,
    config_to_text,
    parse_config,
    read_config,
)
from .ensemble import (
    EnsembleStats,
    KickNoiseModel,
    TrajectoryResult,
    run_ensemble,
    run_trajectory,
    steady_tail_mean,
    trajectory_seed,
)
from .moments import (
    UNCERTAINTY_FLOOR,
    VACUUM_VARIANCE,
    CycleMap,
    DivergenceError,
    DriftModel,
    KickMap,
    MechanicalParams,
    MomentVector,
    NoStationaryStateError,
    Propagator,
    StateMetrics,
    UnphysicalStateError,
    advance_cycle,
    apply_kick,
    build_drift,
    cycle_map,
    intra_period_trace,
    kick_map,
    make_propagator,
    matrix_exponential,
    metric_arrays,
    propagate_free,
    squeezing_onset,
    state_metrics,
    steady_state,
    steady_state_iterative,
    stroboscopic_evolve,
    thermal_state,
)
from .pulses import (
    BathParams,
    CavityParams,
    GridResolutionError,
    MembraneParams,
    PhotonTrace,
    PulseSpec,
    RegimeCheck,
    RegimeReport,
    coupling_g2,
    default_time_grid,
    drive_amplitude,
    intracavity_amplitude,
    kick_strength,
    regime_check,
    temperature_for_occupancy,
    theta_from_physical,
)

__version__ = "0.1.0"

__all__ = [
    "BathConfig",
    "BathParams",
    "CavityParams",
    "ConfigError",
    "CycleMap",
    "DivergenceError",
    "DriftModel",
    "EnsembleConfig",
    "EnsembleStats",
    "GridResolutionError",
    "KickMap",
    "KickNoiseModel",
    "MechanicalParams",
    "MembraneParams",
    "MomentVector",
    "NoStationaryStateError",
    "PhotonTrace",
    "PhysicalKick",
    "Propagator",
    "PulseSpec",
    "RegimeCheck",
    "RegimeReport",
    "RunConfig",
    "Schedule",
    "StateMetrics",
    "TrajectoryResult",
    "UnphysicalStateError",
    "UNCERTAINTY_FLOOR",
    "VACUUM_VARIANCE",
    "advance_cycle",
    "apply_kick",
    "build_drift",
    "config_to_text",
    "coupling_g2",
    "cycle_map",
    "default_time_grid",
    "drive_amplitude",
    "intra_period_trace",
    "intracavity_amplitude",
    "kick_map",
    "kick_strength",
    "make_propagator",
    "matrix_exponential",
    "metric_arrays",
    "parse_config",
    "propagate_free",
    "read_config",
    "regime_check",
    "run_ensemble",
    "run_trajectory",
    "squeezing_onset",
    "state_metrics",
    "steady_state",
    "steady_state_iterative",
    "steady_tail_mean",
    "stroboscopic_evolve",
    "temperature_for_occupancy",
    "thermal_state",
    "theta_from_physical",
    "trajectory_seed",
]
