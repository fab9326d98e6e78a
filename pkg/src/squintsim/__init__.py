"""Monte Carlo simulator for RIS phase-shift design in wideband mmWave OFDM links."""

from .channel import (
    DELAY_MAX_S,
    LOS,
    NLOS,
    ChannelRealization,
    FrequencyGrid,
    PathSet,
    RuPath,
    array_response,
    build_frequency_grid,
    gen_channels,
    sample_path_set,
    spatial_angle,
)
from .experiments import (
    ALL_SCHEMES,
    BANDWIDTH_HZ_GRID,
    LOS_SCHEMES,
    NLOS_SCHEMES,
    RIS_ELEMENTS_GRID,
    SNR_DB_GRID,
    ScenarioConfig,
    SweepResult,
    SweepRow,
    central_subcarrier_index,
    per_trial_rates,
    reproduce_figure,
    run_point,
    run_sweep,
    schemes_for,
)
from .phase_design import (
    Mccm,
    PhaseProfile,
    PrincipalDirection,
    design_central,
    design_ideal,
    design_indexed,
    design_mccm,
    design_random,
    design_subcarrier_covariance,
    mean_channel_covariance,
    phase_extraction,
    principal_direction,
)
from .rate_eval import (
    LinkBudget,
    RateReport,
    effective_channel,
    ideal_rate,
    mrt_beamformer,
    rate_upper_bound,
    subcarrier_rate,
    sum_rate,
    z_factor,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_SCHEMES",
    "BANDWIDTH_HZ_GRID",
    "ChannelRealization",
    "DELAY_MAX_S",
    "FrequencyGrid",
    "LOS",
    "LOS_SCHEMES",
    "LinkBudget",
    "Mccm",
    "NLOS",
    "NLOS_SCHEMES",
    "PathSet",
    "PhaseProfile",
    "PrincipalDirection",
    "RIS_ELEMENTS_GRID",
    "RateReport",
    "RuPath",
    "SNR_DB_GRID",
    "ScenarioConfig",
    "SweepResult",
    "SweepRow",
    "array_response",
    "build_frequency_grid",
    "central_subcarrier_index",
    "design_central",
    "design_ideal",
    "design_indexed",
    "design_mccm",
    "design_random",
    "design_subcarrier_covariance",
    "effective_channel",
    "gen_channels",
    "ideal_rate",
    "mean_channel_covariance",
    "mrt_beamformer",
    "per_trial_rates",
    "phase_extraction",
    "principal_direction",
    "rate_upper_bound",
    "reproduce_figure",
    "run_point",
    "run_sweep",
    "sample_path_set",
    "schemes_for",
    "spatial_angle",
    "subcarrier_rate",
    "sum_rate",
    "z_factor",
]
