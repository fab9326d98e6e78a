"""Phase-shift profile designers for the reflecting surface.

Every designer returns a :class:`PhaseProfile`, a real phase vector whose
materialized diagonal has unit modulus by construction. The angle-based
designers (per-subcarrier optimal, carrier-frequency, indexed) need a
single-path surface-to-user link; the covariance-based designers work on any
realization by splitting the profile into a receive part that aligns the
incident wave and a forward part extracted from a channel covariance matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .channel import LOS, ChannelRealization, FrequencyGrid, PathSet, spatial_angle

logger = logging.getLogger(__name__)

#: SNR (dB) used only to rank the two phase-extraction candidates inside
#: design_mccm; the selection is deterministic and independent of the budget
#: the caller later evaluates with.
CANDIDATE_SNR_DB = 10.0


@dataclass(frozen=True)
class PhaseProfile:
    """Common phase shifts of the M surface elements, in radians.

    Phases are stored unconstrained in R; two profiles are equivalent when
    their phases agree modulo 2*pi. ``degenerate`` marks profiles built from
    a covariance matrix whose top eigenvalue was not unique.
    """

    phases_rad: np.ndarray
    scheme_tag: str
    degenerate: bool = False

    @property
    def num_elements(self) -> int:
        return len(self.phases_rad)

    def unit_diagonal(self) -> np.ndarray:
        """Diagonal of the reflection matrix; every entry has modulus one."""
        return np.exp(1j * np.asarray(self.phases_rad, dtype=float))


@dataclass(frozen=True)
class Mccm:
    """Mean covariance of the surface-to-user channel across subcarriers."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"covariance must be square, got shape {mat.shape}")
        scale = max(1.0, float(np.abs(np.trace(mat))))
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10 * scale:
            raise ValueError("covariance matrix is not Hermitian")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


@dataclass(frozen=True)
class PrincipalDirection:
    """Top eigenvector of a covariance matrix plus a degeneracy marker."""

    vector: np.ndarray
    eigenvalue: float
    degenerate: bool


def _require_los(paths: PathSet, designer: str) -> None:
    if paths.scenario != LOS:
        raise ValueError(f"{designer} needs a single-path surface-to-user link (los scenario)")


def _check_subcarrier(grid: FrequencyGrid, k: int) -> None:
    if not 0 <= k < grid.num_subcarriers:
        raise ValueError(f"subcarrier index {k} out of range [0, {grid.num_subcarriers})")


def design_ideal(paths: PathSet, grid: FrequencyGrid, num_ris_elements: int, k: int) -> PhaseProfile:
    """Optimal profile for one subcarrier of a single-path link.

    Element m gets ``2*pi*m*(phi_user - phi_bs)`` with both spatial angles
    evaluated at subcarrier k, which puts all M reflected contributions
    exactly in phase at that subcarrier.
    """
    _require_los(paths, "design_ideal")
    _check_subcarrier(grid, k)
    f_k = grid.frequencies[k]
    phi_bs = spatial_angle(f_k, paths.bs_ris_aoa_rad, grid.carrier_hz)
    phi_user = spatial_angle(f_k, paths.ru_paths[0].angle_rad, grid.carrier_hz)
    phases = 2.0 * np.pi * np.arange(num_ris_elements) * (phi_user - phi_bs)
    return PhaseProfile(phases, f"ideal(k={k})")


def design_central(paths: PathSet, num_ris_elements: int) -> PhaseProfile:
    """Carrier-frequency profile built from long-term physical angles only.

    Element m gets ``pi*m*(sin(theta_user) - sin(theta_bs))``, the ideal
    phase at the carrier. Equivalently this is the per-element average of the
    per-subcarrier optimal phases over any symmetric grid.
    """
    _require_los(paths, "design_central")
    delta = np.sin(paths.ru_paths[0].angle_rad) - np.sin(paths.bs_ris_aoa_rad)
    phases = np.pi * np.arange(num_ris_elements) * delta
    return PhaseProfile(phases, "central")


def design_indexed(paths: PathSet, grid: FrequencyGrid, num_ris_elements: int, k: int) -> PhaseProfile:
    """Profile that is optimal at subcarrier k but applied to all subcarriers."""
    ideal = design_ideal(paths, grid, num_ris_elements, k)
    return PhaseProfile(ideal.phases_rad, f"indexed(k={k})")


def design_random(rng: np.random.Generator, num_ris_elements: int) -> PhaseProfile:
    """Independent uniform phases on [0, 2*pi); deterministic given the seed."""
    if num_ris_elements < 1:
        raise ValueError(f"num_ris_elements must be >= 1, got {num_ris_elements}")
    phases = rng.uniform(0.0, 2.0 * np.pi, size=num_ris_elements)
    return PhaseProfile(phases, "random")


def mean_channel_covariance(h_ris_user) -> Mccm:
    """Average of ``h_k^H h_k`` over the subcarriers, an M x M Hermitian PSD matrix."""
    h = np.atleast_2d(np.asarray(h_ris_user, dtype=complex))
    if h.shape[0] == 0 or h.shape[1] == 0:
        raise ValueError("need at least one nonempty channel row vector")
    matrix = (h.conj().T @ h) / h.shape[0]
    return Mccm(matrix)


def _canonical_phase(vector: np.ndarray) -> np.ndarray:
    # Rotate the global phase so the largest-magnitude entry is real nonnegative.
    anchor = int(np.argmax(np.abs(vector)))
    pivot = vector[anchor]
    if pivot != 0:
        vector = vector * (np.conj(pivot) / abs(pivot))
    return vector


def principal_direction(mccm: Mccm) -> PrincipalDirection:
    """Unit-norm eigenvector of the largest eigenvalue.

    The global phase is canonicalized so the largest-magnitude entry is real
    and nonnegative, making the result invariant under positive rescaling of
    the covariance. A top eigenvalue that is not unique (to 1e-9 relative) is
    reported through the ``degenerate`` flag rather than as an error.
    """
    eigenvalues, eigenvectors = np.linalg.eigh(mccm.matrix)
    trace = mccm.trace
    if eigenvalues[0] < -1e-10 * max(trace, np.finfo(float).tiny):
        raise ValueError(f"covariance is not positive semidefinite (min eigenvalue {eigenvalues[0]:.3e})")
    top = float(eigenvalues[-1])
    degenerate = False
    if mccm.size >= 2:
        gap = top - float(eigenvalues[-2])
        degenerate = gap <= 1e-9 * max(abs(top), np.finfo(float).tiny)
    vector = _canonical_phase(eigenvectors[:, -1])
    return PrincipalDirection(vector, top, degenerate)


def _rank_one_direction(h_row: np.ndarray) -> PrincipalDirection:
    """Principal direction of the rank-one covariance ``h^H h`` in closed form.

    Equals ``principal_direction(mean_channel_covariance([h]))`` but avoids an
    eigendecomposition; the single nonzero eigenvalue is ``||h||^2``.
    """
    norm = float(np.linalg.norm(h_row))
    size = len(h_row)
    if norm == 0.0:
        basis = np.zeros(size, dtype=complex)
        basis[0] = 1.0
        return PrincipalDirection(basis, 0.0, degenerate=size >= 2)
    vector = _canonical_phase(np.conj(h_row) / norm)
    return PrincipalDirection(vector, norm**2, degenerate=False)


def phase_extraction(v) -> PhaseProfile:
    """Keep only the argument of each entry, discarding magnitudes.

    Entries that are exactly zero get phase 0 by convention.
    """
    vec = np.asarray(v, dtype=complex)
    zeros = int(np.count_nonzero(vec == 0))
    if zeros:
        logger.warning("phase extraction hit %d exactly-zero entries; their phase is set to 0", zeros)
    return PhaseProfile(np.angle(vec), "extracted")


def _receive_phases(num_ris_elements: int, phi_incident: float) -> np.ndarray:
    # Cancels the incident steering progression so the reflected wavefront is flat.
    return -2.0 * np.pi * np.arange(num_ris_elements) * phi_incident


def _mean_rate_bits(channels: ChannelRealization, phases: np.ndarray, snr_linear: float) -> float:
    diag = np.exp(1j * phases)
    eff = np.einsum("km,m,kmn->kn", channels.h_ris_user, diag, channels.h_bs_ris)
    power = np.sum(np.abs(eff) ** 2, axis=1)
    return float(np.mean(np.log2(1.0 + snr_linear * power)))


def design_mccm(channels: ChannelRealization) -> PhaseProfile:
    """Covariance-based common profile for an arbitrary number of user paths.

    The profile is the elementwise sum of a receive part, which flattens the
    incident wave of the carrier-frequency BS-to-surface channel, and a
    forward part obtained by phase extraction of the principal direction of
    the mean channel covariance. Because an eigenvector is only defined up to
    conjugation, both extraction candidates are scored by their mean rate at
    a fixed reference SNR and the better one is kept (ties keep the
    unconjugated candidate).
    """
    paths = channels.source_paths
    grid = channels.grid
    m_ris = channels.num_ris_elements
    phi_incident = spatial_angle(grid.carrier_hz, paths.bs_ris_aoa_rad, grid.carrier_hz)
    receive = _receive_phases(m_ris, phi_incident)

    direction = principal_direction(mean_channel_covariance(channels.h_ris_user))
    snr = 10.0 ** (CANDIDATE_SNR_DB / 10.0)
    best_phases = None
    best_rate = -np.inf
    for candidate in (direction.vector, np.conj(direction.vector)):
        phases = receive + phase_extraction(candidate).phases_rad
        rate = _mean_rate_bits(channels, phases, snr)
        if rate > best_rate:
            best_rate = rate
            best_phases = phases
    return PhaseProfile(best_phases, "mccm", degenerate=direction.degenerate)


def design_subcarrier_covariance(channels: ChannelRealization, k: int) -> PhaseProfile:
    """Single-subcarrier analog of :func:`design_mccm`.

    Uses the BS-to-surface spatial angle at subcarrier k for the receive part
    and the covariance of that subcarrier's channel alone for the forward
    part; the conjugation ambiguity is resolved by the reflected power at
    subcarrier k, which orders the candidates identically at every SNR.
    """
    grid = channels.grid
    _check_subcarrier(grid, k)
    paths = channels.source_paths
    m_ris = channels.num_ris_elements
    f_k = grid.frequencies[k]
    phi_incident = spatial_angle(f_k, paths.bs_ris_aoa_rad, grid.carrier_hz)
    receive = _receive_phases(m_ris, phi_incident)

    direction = _rank_one_direction(channels.h_ris_user[k])
    h_k = channels.h_ris_user[k]
    h_bs_k = channels.h_bs_ris[k]
    best_phases = None
    best_power = -np.inf
    for candidate in (direction.vector, np.conj(direction.vector)):
        phases = receive + phase_extraction(candidate).phases_rad
        eff = (h_k * np.exp(1j * phases)) @ h_bs_k
        power = float(np.sum(np.abs(eff) ** 2))
        if power > best_power:
            best_power = power
            best_phases = phases
    return PhaseProfile(best_phases, f"cov-indexed(k={k})", degenerate=direction.degenerate)
