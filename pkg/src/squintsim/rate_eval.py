"""Achievable-rate evaluation for a given channel realization and phase profile.

The transmitter steers with a maximum ratio beamformer per subcarrier, so the
per-subcarrier rate collapses to ``log2(1 + snr * ||h Phi H||^2)``. For
single-path links the same quantity factors through the element alignment sum
``z_k`` whose magnitude is capped at M, which also yields a Jensen upper
bound on the mean rate of any common profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LOS, ChannelRealization, FrequencyGrid, PathSet, spatial_angle
from .phase_design import PhaseProfile, design_ideal, design_subcarrier_covariance


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power and noise power in linear units."""

    transmit_power: float
    noise_power: float = 1.0

    def __post_init__(self) -> None:
        if self.transmit_power <= 0:
            raise ValueError(f"transmit_power must be positive, got {self.transmit_power}")
        if self.noise_power <= 0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")

    @property
    def snr_linear(self) -> float:
        return self.transmit_power / self.noise_power

    @classmethod
    def from_snr_db(cls, snr_db: float, noise_power: float = 1.0) -> "LinkBudget":
        """Unit noise power by convention; only the ratio enters the rate."""
        return cls(transmit_power=noise_power * 10.0 ** (snr_db / 10.0), noise_power=noise_power)


@dataclass(frozen=True)
class RateReport:
    """Per-subcarrier rates plus their mean, in bits/s/Hz."""

    per_subcarrier_bits: np.ndarray
    sum_rate_bits: float
    upper_bound_bits: float | None = None


def effective_channel(h_ru_k, profile: PhaseProfile, h_br_k) -> np.ndarray:
    """Composite row vector ``h_ru * diag(exp(j*phases)) * h_br`` of length N."""
    h_ru = np.asarray(h_ru_k, dtype=complex)
    h_br = np.asarray(h_br_k, dtype=complex)
    if h_ru.shape != (profile.num_elements,) or h_br.shape[0] != profile.num_elements:
        raise ValueError(
            f"dimension mismatch: h_ru {h_ru.shape}, profile {profile.num_elements}, h_br {h_br.shape}"
        )
    return (h_ru * profile.unit_diagonal()) @ h_br


def mrt_beamformer(effective, transmit_power: float) -> np.ndarray:
    """Maximum ratio beamformer ``sqrt(P) * effective^H / ||effective||``.

    A zero effective channel maps to the zero vector (zero rate) rather than
    an error.
    """
    eff = np.asarray(effective, dtype=complex)
    norm = np.linalg.norm(eff)
    if norm == 0:
        return np.zeros_like(eff)
    return np.sqrt(transmit_power) * eff.conj() / norm


def subcarrier_rate(effective, budget: LinkBudget) -> float:
    """Rate of one subcarrier: ``log2(1 + snr * ||effective||^2)``."""
    eff = np.asarray(effective, dtype=complex)
    return float(np.log2(1.0 + budget.snr_linear * np.sum(np.abs(eff) ** 2)))


def sum_rate(channels: ChannelRealization, profile: PhaseProfile, budget: LinkBudget) -> RateReport:
    """Mean achievable rate of a common profile across all subcarriers."""
    diag = profile.unit_diagonal()
    eff = np.einsum("km,m,kmn->kn", channels.h_ris_user, diag, channels.h_bs_ris)
    power = np.sum(np.abs(eff) ** 2, axis=1)
    per_k = np.log2(1.0 + budget.snr_linear * power)
    return RateReport(per_k, float(np.mean(per_k)))


def ideal_rate(channels: ChannelRealization, budget: LinkBudget) -> RateReport:
    """Benchmark rate with a separate profile optimized for every subcarrier.

    Single-path links use the per-subcarrier optimal angle profile; multipath
    links use the single-subcarrier covariance designer at each k. Either way
    the common-phase constraint is relaxed, so this dominates every common
    profile subcarrier by subcarrier.
    """
    paths = channels.source_paths
    grid = channels.grid
    m_ris = channels.num_ris_elements
    per_k = np.empty(channels.num_subcarriers)
    for k in range(channels.num_subcarriers):
        if paths.scenario == LOS:
            profile = design_ideal(paths, grid, m_ris, k)
        else:
            profile = design_subcarrier_covariance(channels, k)
        eff = effective_channel(channels.h_ris_user[k], profile, channels.h_bs_ris[k])
        per_k[k] = subcarrier_rate(eff, budget)
    return RateReport(per_k, float(np.mean(per_k)))


def z_factor(
    paths: PathSet,
    profile: PhaseProfile,
    grid: FrequencyGrid,
    num_ris_elements: int,
    k: int,
) -> complex:
    """Element alignment sum of a single-path link at subcarrier k.

    ``z_k = sum_m exp(j * (2*pi*m*(phi_bs - phi_user) + phase_m))`` whose
    magnitude never exceeds M and reaches M exactly when the profile matches
    the per-subcarrier optimum.
    """
    if paths.scenario != LOS:
        raise ValueError("z_factor is defined for the single-path (los) scenario only")
    if profile.num_elements != num_ris_elements:
        raise ValueError(
            f"profile has {profile.num_elements} phases, expected {num_ris_elements}"
        )
    if not 0 <= k < grid.num_subcarriers:
        raise ValueError(f"subcarrier index {k} out of range [0, {grid.num_subcarriers})")
    f_k = grid.frequencies[k]
    phi_bs = spatial_angle(f_k, paths.bs_ris_aoa_rad, grid.carrier_hz)
    phi_user = spatial_angle(f_k, paths.ru_paths[0].angle_rad, grid.carrier_hz)
    m = np.arange(num_ris_elements)
    terms = np.exp(1j * (2.0 * np.pi * m * (phi_bs - phi_user) + profile.phases_rad))
    return complex(np.sum(terms))


def rate_upper_bound(
    paths: PathSet,
    profile: PhaseProfile,
    grid: FrequencyGrid,
    num_ris_elements: int,
    num_bs_antennas: int,
    budget: LinkBudget,
) -> float:
    """Jensen bound ``log2(1 + snr*N/K * sum_k |z_k|^2)`` on the mean rate.

    Uses the unit-gain convention, so it bounds the mean rate of the same
    profile on a unit-gain single-path realization.
    """
    if paths.scenario != LOS:
        raise ValueError("rate_upper_bound is defined for the single-path (los) scenario only")
    z_sq = [
        abs(z_factor(paths, profile, grid, num_ris_elements, k)) ** 2
        for k in range(grid.num_subcarriers)
    ]
    mean_z_sq = float(np.mean(z_sq))
    return float(np.log2(1.0 + budget.snr_linear * num_bs_antennas * mean_z_sq))
