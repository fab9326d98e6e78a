"""Seeded Monte Carlo sweeps comparing the phase-design schemes.

Every trial derives its own random substream from (seed, trial index, stream
id), so all schemes at a sweep point see identical channel realizations
(common random numbers) and any result is bit-reproducible regardless of how
many worker threads evaluate the trials.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import LOS, NLOS, FrequencyGrid, build_frequency_grid, gen_channels, sample_path_set
from .phase_design import (
    PhaseProfile,
    design_central,
    design_indexed,
    design_mccm,
    design_random,
    design_subcarrier_covariance,
)
from .rate_eval import LinkBudget, ideal_rate, sum_rate

LOS_SCHEMES = ("ideal", "central", "random", "random-index", "side-index")
NLOS_SCHEMES = ("ideal", "mccm", "central", "random", "random-index", "side-index")
ALL_SCHEMES = NLOS_SCHEMES

SWEEP_VARIABLES = ("snr_db", "bandwidth_hz", "ris_elements")

#: Default sweep grids; each brackets the operating points discussed in the
#: scheme comparisons (500 MHz and 2 GHz bandwidth, 10 dB SNR, 64 elements).
SNR_DB_GRID = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
BANDWIDTH_HZ_GRID = (0.25e9, 0.5e9, 1e9, 2e9, 4e9)
RIS_ELEMENTS_GRID = (16, 32, 64, 128, 256)

THREADS_ENV_VAR = "SQUINTSIM_THREADS"

_MASK64 = (1 << 64) - 1
_CHANNEL_STREAM = 0
_PHASE_STREAM = 1
_INDEX_STREAM = 2


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation parameters; the defaults are the standard operating point
    (28 GHz carrier, 2 GHz bandwidth, 128 subcarriers, 64 BS antennas, 64
    surface elements, 5 user-side paths in the nlos scenario)."""

    scenario: str = LOS
    carrier_hz: float = 28e9
    bandwidth_hz: float = 2e9
    num_subcarriers: int = 128
    num_bs_antennas: int = 64
    num_ris_elements: int = 64
    num_paths: int = 5
    snr_db: tuple[float, ...] = (10.0,)
    trials: int = 500
    seed: int = 0
    gain_mode: str = "random"

    def __post_init__(self) -> None:
        if self.scenario not in (LOS, NLOS):
            raise ValueError(f"scenario must be {LOS!r} or {NLOS!r}, got {self.scenario!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if len(self.snr_db) < 1:
            raise ValueError("snr_db must contain at least one value")
        if self.gain_mode not in ("unit", "random"):
            raise ValueError(f"gain_mode must be 'unit' or 'random', got {self.gain_mode!r}")


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    scheme: str
    sweep_variable: str
    sweep_value: float
    mean_rate_bits: float
    std_error_bits: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


def _substream(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed & _MASK64, int(trial), int(stream)])


def thread_count() -> int:
    """Worker threads for the trial pool, overridable via SQUINTSIM_THREADS."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    return max(1, value)


def schemes_for(scenario: str) -> tuple[str, ...]:
    return LOS_SCHEMES if scenario == LOS else NLOS_SCHEMES


def central_subcarrier_index(grid: FrequencyGrid) -> int:
    """Index of the subcarrier closest to the carrier (ties take the lower one)."""
    return int(np.argmin(np.abs(grid.frequencies - grid.carrier_hz)))


def _check_scheme(scheme: str, scenario: str) -> None:
    if scheme not in ALL_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; known schemes: {', '.join(ALL_SCHEMES)}")
    if scheme not in schemes_for(scenario):
        raise ValueError(f"scheme {scheme!r} is not available in the {scenario!r} scenario")


def _apply_overrides(config: ScenarioConfig, overrides: dict | None) -> ScenarioConfig:
    if not overrides:
        return config
    cfg = config
    for key, value in overrides.items():
        if key == "snr_db":
            cfg = replace(cfg, snr_db=(float(value),))
        elif key == "bandwidth_hz":
            cfg = replace(cfg, bandwidth_hz=float(value))
        elif key == "ris_elements":
            if float(value) != int(value):
                raise ValueError(f"ris_elements must be an integer, got {value}")
            cfg = replace(cfg, num_ris_elements=int(value))
        else:
            raise ValueError(f"unknown sweep variable {key!r}; known: {', '.join(SWEEP_VARIABLES)}")
    return cfg


def _common_profile(
    cfg: ScenarioConfig,
    grid: FrequencyGrid,
    channels,
    scheme: str,
    trial: int,
) -> PhaseProfile:
    paths = channels.source_paths
    m_ris = cfg.num_ris_elements
    if scheme == "random":
        return design_random(_substream(cfg.seed, trial, _PHASE_STREAM), m_ris)
    if scheme == "mccm":
        return design_mccm(channels)
    if scheme == "central":
        if cfg.scenario == LOS:
            return design_central(paths, m_ris)
        return design_subcarrier_covariance(channels, central_subcarrier_index(grid))
    if scheme == "random-index":
        k = int(_substream(cfg.seed, trial, _INDEX_STREAM).integers(grid.num_subcarriers))
    elif scheme == "side-index":
        k = 0
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if cfg.scenario == LOS:
        return design_indexed(paths, grid, m_ris, k)
    return design_subcarrier_covariance(channels, k)


def _trial_rate(cfg: ScenarioConfig, grid: FrequencyGrid, budget: LinkBudget, scheme: str, trial: int) -> float:
    rng = _substream(cfg.seed, trial, _CHANNEL_STREAM)
    num_paths = 1 if cfg.scenario == LOS else cfg.num_paths
    paths = sample_path_set(rng, cfg.scenario, num_paths, gain_mode=cfg.gain_mode)
    channels = gen_channels(paths, grid, cfg.num_bs_antennas, cfg.num_ris_elements)
    if scheme == "ideal":
        return ideal_rate(channels, budget).sum_rate_bits
    profile = _common_profile(cfg, grid, channels, scheme, trial)
    return sum_rate(channels, profile, budget).sum_rate_bits


def per_trial_rates(config: ScenarioConfig, scheme: str, overrides: dict | None = None) -> np.ndarray:
    """Mean rate of every trial, in ascending trial order.

    Channel substreams depend only on (seed, trial), so calling this for two
    schemes with the same config pairs them on identical realizations.
    """
    cfg = _apply_overrides(config, overrides)
    _check_scheme(scheme, cfg.scenario)
    grid = build_frequency_grid(cfg.carrier_hz, cfg.bandwidth_hz, cfg.num_subcarriers)
    budget = LinkBudget.from_snr_db(cfg.snr_db[0])

    workers = thread_count()
    trials = range(cfg.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rates = list(pool.map(lambda t: _trial_rate(cfg, grid, budget, scheme, t), trials))
    else:
        rates = [_trial_rate(cfg, grid, budget, scheme, t) for t in trials]
    return np.asarray(rates)


def run_point(config: ScenarioConfig, scheme: str, overrides: dict | None = None) -> tuple[float, float]:
    """Mean rate and standard error of one (scheme, sweep point) cell."""
    rates = per_trial_rates(config, scheme, overrides)
    mean = float(np.mean(rates))
    if len(rates) > 1:
        std_error = float(np.std(rates, ddof=1) / np.sqrt(len(rates)))
    else:
        std_error = 0.0
    return mean, std_error


def run_sweep(
    config: ScenarioConfig,
    schemes,
    sweep_variable: str,
    values,
) -> SweepResult:
    """Evaluate the full cross product of schemes and sweep values.

    Rows are ordered value-major, scheme-minor, and every scheme at a given
    value sees the same channel realizations.
    """
    schemes = tuple(schemes)
    values = tuple(values)
    if not schemes:
        raise ValueError("need at least one scheme")
    if not values:
        raise ValueError("need at least one sweep value")
    if sweep_variable not in SWEEP_VARIABLES:
        raise ValueError(
            f"unknown sweep variable {sweep_variable!r}; known: {', '.join(SWEEP_VARIABLES)}"
        )
    for scheme in schemes:
        _check_scheme(scheme, config.scenario)

    rows = []
    for value in values:
        for scheme in schemes:
            mean, std_error = run_point(config, scheme, {sweep_variable: value})
            rows.append(
                SweepRow(
                    scenario=config.scenario,
                    scheme=scheme,
                    sweep_variable=sweep_variable,
                    sweep_value=float(value),
                    mean_rate_bits=mean,
                    std_error_bits=std_error,
                    trials=config.trials,
                    seed=config.seed,
                )
            )
    return SweepResult(tuple(rows))


def reproduce_figure(fig_id: int, trials: int, seed: int, gain_mode: str = "random") -> SweepResult:
    """Preset sweeps for the five benchmark comparisons.

    2: single-path rate vs SNR; 3: vs bandwidth at 10 dB; 4: vs surface size
    at 10 dB; 5: multipath (5 paths) rate vs SNR; 6: multipath vs bandwidth
    at 10 dB.
    """
    base = ScenarioConfig(trials=trials, seed=seed, gain_mode=gain_mode)
    if fig_id == 2:
        return run_sweep(base, LOS_SCHEMES, "snr_db", SNR_DB_GRID)
    if fig_id == 3:
        return run_sweep(base, LOS_SCHEMES, "bandwidth_hz", BANDWIDTH_HZ_GRID)
    if fig_id == 4:
        return run_sweep(base, LOS_SCHEMES, "ris_elements", RIS_ELEMENTS_GRID)
    nlos = replace(base, scenario=NLOS)
    if fig_id == 5:
        return run_sweep(nlos, NLOS_SCHEMES, "snr_db", SNR_DB_GRID)
    if fig_id == 6:
        return run_sweep(nlos, NLOS_SCHEMES, "bandwidth_hz", BANDWIDTH_HZ_GRID)
    raise ValueError(f"unknown figure id {fig_id}; expected 2..6")
