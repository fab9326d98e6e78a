"""Beam-squint channel generation for a RIS-aided wideband mmWave OFDM link.

The base station reaches the user only through a reflecting surface, and both
hops are modeled with frequency-dependent steering vectors. Because the array
spacing is tuned to the carrier, the effective spatial angle of every path
drifts with the subcarrier frequency, which is exactly the effect the phase
designers in :mod:`squintsim.phase_design` try to mitigate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOS = "los"
NLOS = "nlos"

#: Path delays are sampled from (0, DELAY_MAX_S].
DELAY_MAX_S = 20e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """OFDM subcarrier frequencies, symmetric about the carrier."""

    carrier_hz: float
    bandwidth_hz: float
    num_subcarriers: int
    frequencies: np.ndarray


@dataclass(frozen=True)
class RuPath:
    """One propagation path between the reflecting surface and the user."""

    angle_rad: float
    gain: complex
    delay_s: float

    def __post_init__(self) -> None:
        if self.delay_s < 0:
            raise ValueError(f"path delay must be nonnegative, got {self.delay_s}")


@dataclass(frozen=True)
class PathSet:
    """Geometric description of one channel realization.

    The BS-to-surface hop is always a single path; the surface-to-user hop
    carries one path in the ``los`` scenario and ``L >= 1`` paths in ``nlos``.
    Angles are physical angles in radians, gains are complex amplitudes.
    """

    scenario: str
    bs_ris_aoa_rad: float
    bs_ris_aod_rad: float
    bs_ris_gain: complex
    bs_ris_delay_s: float
    ru_paths: tuple[RuPath, ...]

    def __post_init__(self) -> None:
        if self.scenario not in (LOS, NLOS):
            raise ValueError(f"scenario must be {LOS!r} or {NLOS!r}, got {self.scenario!r}")
        if len(self.ru_paths) < 1:
            raise ValueError("at least one surface-to-user path is required")
        if self.scenario == LOS and len(self.ru_paths) != 1:
            raise ValueError("the los scenario carries exactly one surface-to-user path")
        if self.bs_ris_delay_s < 0:
            raise ValueError("BS-to-surface delay must be nonnegative")

    @property
    def num_ru_paths(self) -> int:
        return len(self.ru_paths)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-subcarrier channel matrices for one realization.

    ``h_bs_ris`` has shape (K, M, N) and every slice is rank one by
    construction; ``h_ris_user`` stacks the K row vectors into shape (K, M).
    """

    h_bs_ris: np.ndarray
    h_ris_user: np.ndarray
    grid: FrequencyGrid
    source_paths: PathSet

    @property
    def num_subcarriers(self) -> int:
        return self.h_bs_ris.shape[0]

    @property
    def num_ris_elements(self) -> int:
        return self.h_bs_ris.shape[1]

    @property
    def num_bs_antennas(self) -> int:
        return self.h_bs_ris.shape[2]

    @property
    def scenario(self) -> str:
        return self.source_paths.scenario


def build_frequency_grid(carrier_hz: float, bandwidth_hz: float, num_subcarriers: int) -> FrequencyGrid:
    """Build the K subcarrier frequencies centered on the carrier.

    Subcarrier k (0-based) sits at ``carrier + (bandwidth/K) * (k - (K-1)/2)``,
    so the grid is symmetric and its mean is the carrier frequency.
    """
    if num_subcarriers < 1:
        raise ValueError(f"num_subcarriers must be >= 1, got {num_subcarriers}")
    if carrier_hz <= 0:
        raise ValueError(f"carrier_hz must be positive, got {carrier_hz}")
    if bandwidth_hz < 0:
        raise ValueError(f"bandwidth_hz must be nonnegative, got {bandwidth_hz}")
    if bandwidth_hz >= 2 * carrier_hz:
        raise ValueError(
            f"bandwidth_hz={bandwidth_hz} >= 2*carrier_hz={2 * carrier_hz} would "
            "produce nonpositive subcarrier frequencies"
        )
    k = np.arange(num_subcarriers, dtype=float)
    spacing = bandwidth_hz / num_subcarriers
    frequencies = carrier_hz + spacing * (k - (num_subcarriers - 1) / 2)
    return FrequencyGrid(carrier_hz, bandwidth_hz, num_subcarriers, frequencies)


def spatial_angle(f_hz, theta_rad, carrier_hz: float):
    """Frequency-dependent spatial angle of a path for half-wavelength spacing.

    The element spacing is fixed to half the carrier wavelength, so the value
    is ``(f / (2 * carrier)) * sin(theta)``. At ``f == carrier`` this reduces
    to the familiar frequency-flat ``sin(theta) / 2``; away from the carrier
    the angle drifts linearly with frequency (beam squint). Accepts scalar or
    array ``f_hz`` / ``theta_rad``.
    """
    return (np.asarray(f_hz, dtype=float) / (2.0 * carrier_hz)) * np.sin(theta_rad)


def array_response(n_elements: int, phi) -> np.ndarray:
    """Unit-norm ULA response vector for spatial angle ``phi``.

    Entry m equals ``exp(j*2*pi*m*phi) / sqrt(n)``. A scalar ``phi`` yields a
    vector of shape (n,), an array of angles yields shape (n, ...).
    """
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    m = np.arange(n_elements)
    phase = 2j * np.pi * np.multiply.outer(m, np.asarray(phi, dtype=float))
    return np.exp(phase) / np.sqrt(n_elements)


def _open_closed_uniform(rng: np.random.Generator, high: float) -> float:
    # rng.uniform draws from [0, high); mirroring moves the support to (0, high].
    return high - rng.uniform(0.0, high)


def _sample_gain(rng: np.random.Generator, gain_mode: str) -> complex:
    if gain_mode == "unit":
        return 1.0 + 0.0j
    if gain_mode == "random":
        re, im = rng.standard_normal(2)
        return complex(re, im) / np.sqrt(2.0)
    raise ValueError(f"gain_mode must be 'unit' or 'random', got {gain_mode!r}")


def sample_path_set(
    rng: np.random.Generator,
    scenario: str,
    num_paths: int = 1,
    gain_mode: str = "random",
) -> PathSet:
    """Draw a random path geometry for one channel realization.

    All angles are i.i.d. uniform on (0, 2*pi], delays uniform on
    (0, 20 ns], and gains are complex standard normal unless
    ``gain_mode='unit'`` pins every gain to 1 (handy for closed-form checks).
    The draw is a pure function of the generator state, so reusing a seed
    reproduces the same paths.
    """
    if num_paths < 1:
        raise ValueError(f"num_paths must be >= 1, got {num_paths}")
    if scenario == LOS and num_paths != 1:
        raise ValueError("the los scenario has exactly one surface-to-user path")

    two_pi = 2.0 * np.pi
    aoa = _open_closed_uniform(rng, two_pi)
    aod = _open_closed_uniform(rng, two_pi)
    delay = _open_closed_uniform(rng, DELAY_MAX_S)
    gain = _sample_gain(rng, gain_mode)

    ru_paths = []
    for _ in range(num_paths):
        ru_paths.append(
            RuPath(
                angle_rad=_open_closed_uniform(rng, two_pi),
                gain=_sample_gain(rng, gain_mode),
                delay_s=_open_closed_uniform(rng, DELAY_MAX_S),
            )
        )
    return PathSet(
        scenario=scenario,
        bs_ris_aoa_rad=aoa,
        bs_ris_aod_rad=aod,
        bs_ris_gain=gain,
        bs_ris_delay_s=delay,
        ru_paths=tuple(ru_paths),
    )


def gen_channels(
    paths: PathSet,
    grid: FrequencyGrid,
    num_bs_antennas: int,
    num_ris_elements: int,
) -> ChannelRealization:
    """Generate the per-subcarrier channels for one path realization.

    The BS-to-surface matrix at subcarrier k is the rank-one outer product
    ``sqrt(M*N) * gain * exp(-j*2*pi*tau*f_k) * a_M(phi_in) * a_N(phi_out)^H``
    with both spatial angles evaluated at f_k. The surface-to-user row vector
    sums the L paths, each normalized by ``sqrt(M)`` (los) or ``sqrt(M/L)``
    (nlos) and carrying its own delay phase. Pure function of its inputs.
    """
    if num_bs_antennas < 1 or num_ris_elements < 1:
        raise ValueError("antenna and element counts must be >= 1")

    f = grid.frequencies
    n_sub = grid.num_subcarriers
    m_ris = num_ris_elements
    n_bs = num_bs_antennas

    phi_in = spatial_angle(f, paths.bs_ris_aoa_rad, grid.carrier_hz)
    phi_out = spatial_angle(f, paths.bs_ris_aod_rad, grid.carrier_hz)
    a_ris = array_response(m_ris, phi_in)  # (M, K)
    a_bs = array_response(n_bs, phi_out)  # (N, K)
    scale = (
        np.sqrt(m_ris * n_bs)
        * paths.bs_ris_gain
        * np.exp(-2j * np.pi * paths.bs_ris_delay_s * f)
    )
    h_bs_ris = np.einsum("k,mk,nk->kmn", scale, a_ris, np.conj(a_bs))

    if paths.scenario == LOS:
        norm = np.sqrt(m_ris)
    else:
        norm = np.sqrt(m_ris / paths.num_ru_paths)
    h_ris_user = np.zeros((n_sub, m_ris), dtype=complex)
    for path in paths.ru_paths:
        phi_ru = spatial_angle(f, path.angle_rad, grid.carrier_hz)
        a_ru = array_response(m_ris, phi_ru)  # (M, K)
        delay = np.exp(-2j * np.pi * path.delay_s * f)
        h_ris_user += (path.gain * delay)[:, None] * np.conj(a_ru).T
    h_ris_user *= norm

    return ChannelRealization(
        h_bs_ris=h_bs_ris,
        h_ris_user=h_ris_user,
        grid=grid,
        source_paths=paths,
    )
