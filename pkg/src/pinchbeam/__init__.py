"""Multiuser MIMO downlink beamforming with pinched-waveguide arrays."""

from .baselines import mrt_precoder, solve_fixed_antenna, zf_precoder
from .channel import (
    build_channel_matrix,
    decompose_channel,
    effective_channel_entry,
    element_user_distance,
    fixed_channel_matrix,
    pinch_phase,
)
from .fpbcd import (
    SolverConfig,
    SolverState,
    init_locations_nearest_neighbor,
    init_precoder_mrt,
    solve,
)
from .geometry import (
    ConfigError,
    RfConstants,
    Scene,
    build_scene,
    dbm_to_watts,
    fixed_array_positions,
    scene_from_config,
    scene_to_config,
    watts_to_dbm,
)
from .harness import (
    ExperimentResult,
    ExperimentSpec,
    experiment_fig2a,
    experiment_fig2b,
    experiment_fig2c,
    experiment_fig3,
    run_experiment,
    write_csv,
)
from .metrics import (
    RateReport,
    enforce_power_equality,
    scaled_sinr,
    scaled_weighted_sum_rate,
    sinr,
    weighted_sum_rate,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ExperimentResult",
    "ExperimentSpec",
    "RateReport",
    "RfConstants",
    "Scene",
    "SolverConfig",
    "SolverState",
    "build_channel_matrix",
    "build_scene",
    "dbm_to_watts",
    "decompose_channel",
    "effective_channel_entry",
    "element_user_distance",
    "enforce_power_equality",
    "experiment_fig2a",
    "experiment_fig2b",
    "experiment_fig2c",
    "experiment_fig3",
    "fixed_array_positions",
    "fixed_channel_matrix",
    "init_locations_nearest_neighbor",
    "init_precoder_mrt",
    "mrt_precoder",
    "pinch_phase",
    "run_experiment",
    "scaled_sinr",
    "scaled_weighted_sum_rate",
    "scene_from_config",
    "scene_to_config",
    "sinr",
    "solve",
    "solve_fixed_antenna",
    "watts_to_dbm",
    "weighted_sum_rate",
    "write_csv",
    "zf_precoder",
]
