import dataclasses

import numpy as np
import pytest

from squintsim.channel import (
    LOS,
    NLOS,
    build_frequency_grid,
    gen_channels,
    sample_path_set,
)
from squintsim.phase_design import PhaseProfile, design_central, design_ideal, design_random
from squintsim.rate_eval import (
    LinkBudget,
    effective_channel,
    ideal_rate,
    mrt_beamformer,
    rate_upper_bound,
    subcarrier_rate,
    sum_rate,
    z_factor,
)

BUDGET = LinkBudget.from_snr_db(10.0)


def zero_profile(m):
    return PhaseProfile(np.zeros(m), "zeros")


class TestLinkBudget:
    def test_snr_ratio(self):
        budget = LinkBudget(transmit_power=8.0, noise_power=2.0)
        assert budget.snr_linear == 4.0

    def test_from_snr_db(self):
        assert LinkBudget.from_snr_db(10.0).snr_linear == pytest.approx(10.0, rel=1e-12)
        assert LinkBudget.from_snr_db(0.0).snr_linear == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("power,noise", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_rejects_nonpositive(self, power, noise):
        with pytest.raises(ValueError):
            LinkBudget(power, noise)


class TestEffectiveChannel:
    def test_zero_user_link_gives_zero(self):
        h_br = np.ones((4, 3), dtype=complex)
        eff = effective_channel(np.zeros(4, dtype=complex), zero_profile(4), h_br)
        assert np.allclose(eff, 0.0)

    def test_zero_phases_reduce_to_plain_product(self):
        rng = np.random.default_rng(0)
        h_ru = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        h_br = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        assert np.allclose(effective_channel(h_ru, zero_profile(4), h_br), h_ru @ h_br)

    def test_global_phase_shift_scales_output(self):
        rng = np.random.default_rng(1)
        h_ru = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        h_br = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
        profile = design_random(rng, 5)
        shifted = PhaseProfile(profile.phases_rad + 0.7, "shifted")
        base = effective_channel(h_ru, profile, h_br)
        moved = effective_channel(h_ru, shifted, h_br)
        assert np.allclose(moved, np.exp(0.7j) * base, atol=1e-12)
        assert np.linalg.norm(moved) == pytest.approx(np.linalg.norm(base), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            effective_channel(np.zeros(3, dtype=complex), zero_profile(4), np.ones((4, 2)))
        with pytest.raises(ValueError):
            effective_channel(np.zeros(4, dtype=complex), zero_profile(4), np.ones((5, 2)))


class TestMrtBeamformer:
    def test_power_normalization(self):
        eff = np.array([1 + 2j, -0.5, 3j])
        f = mrt_beamformer(eff, 4.0)
        assert np.linalg.norm(f) == pytest.approx(2.0, rel=1e-12)

    def test_single_direction(self):
        f = mrt_beamformer(np.array([1.0, 0.0, 0.0], dtype=complex), 1.0)
        assert np.allclose(f, [1.0, 0.0, 0.0])

    def test_conjugate_alignment(self):
        rng = np.random.default_rng(2)
        eff = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        f = mrt_beamformer(eff, 3.0)
        received = eff @ f
        assert abs(received.imag) < 1e-12
        assert received.real == pytest.approx(np.sqrt(3.0) * np.linalg.norm(eff), rel=1e-12)

    def test_zero_channel_maps_to_zero_vector(self):
        f = mrt_beamformer(np.zeros(4, dtype=complex), 2.0)
        assert np.array_equal(f, np.zeros(4, dtype=complex))


class TestSubcarrierRate:
    def test_zero_channel_rate(self):
        assert subcarrier_rate(np.zeros(3, dtype=complex), BUDGET) == 0.0

    def test_unity_point(self):
        assert subcarrier_rate(np.array([1.0 + 0j]), LinkBudget(1.0, 1.0)) == pytest.approx(1.0, abs=1e-15)

    def test_aligned_closed_form(self):
        # 64 antennas, 64 elements, unit gains, 10 dB: the fully aligned
        # subcarrier rate is log2(1 + 10 * 64 * 64^2) = log2(2621441).
        grid = build_frequency_grid(28e9, 2e9, 128)
        paths = sample_path_set(np.random.default_rng(3), LOS, 1, gain_mode="unit")
        channels = gen_channels(paths, grid, 64, 64)
        k = 17
        profile = design_ideal(paths, grid, 64, k)
        eff = effective_channel(channels.h_ris_user[k], profile, channels.h_bs_ris[k])
        assert subcarrier_rate(eff, BUDGET) == pytest.approx(np.log2(2621441), rel=1e-9)


class TestSumRate:
    def test_single_subcarrier_report(self):
        grid = build_frequency_grid(28e9, 2e9, 1)
        paths = sample_path_set(np.random.default_rng(4), LOS, 1)
        channels = gen_channels(paths, grid, 4, 8)
        profile = design_central(paths, 8)
        report = sum_rate(channels, profile, BUDGET)
        eff = effective_channel(channels.h_ris_user[0], profile, channels.h_bs_ris[0])
        assert report.sum_rate_bits == pytest.approx(subcarrier_rate(eff, BUDGET), rel=1e-12)
        assert len(report.per_subcarrier_bits) == 1

    def test_mean_matches_per_subcarrier(self):
        grid = build_frequency_grid(28e9, 2e9, 16)
        paths = sample_path_set(np.random.default_rng(5), NLOS, 3)
        channels = gen_channels(paths, grid, 4, 8)
        report = sum_rate(channels, design_random(np.random.default_rng(6), 8), BUDGET)
        assert report.sum_rate_bits == np.mean(report.per_subcarrier_bits)
        assert np.all(report.per_subcarrier_bits >= 0)

    def test_zero_bandwidth_rates_are_flat(self):
        grid = build_frequency_grid(28e9, 0.0, 8)
        paths = sample_path_set(np.random.default_rng(7), LOS, 1)
        channels = gen_channels(paths, grid, 4, 8)
        report = sum_rate(channels, design_central(paths, 8), BUDGET)
        assert np.all(report.per_subcarrier_bits == report.per_subcarrier_bits[0])

    def test_subcarrier_permutation_invariance(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        paths = sample_path_set(np.random.default_rng(8), NLOS, 4)
        channels = gen_channels(paths, grid, 4, 8)
        perm = np.random.default_rng(9).permutation(8)
        shuffled = dataclasses.replace(
            channels, h_bs_ris=channels.h_bs_ris[perm], h_ris_user=channels.h_ris_user[perm]
        )
        profile = design_random(np.random.default_rng(10), 8)
        a = sum_rate(channels, profile, BUDGET).sum_rate_bits
        b = sum_rate(shuffled, profile, BUDGET).sum_rate_bits
        assert a == pytest.approx(b, rel=1e-12)

    def test_strictly_increasing_in_snr(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        paths = sample_path_set(np.random.default_rng(11), NLOS, 3)
        channels = gen_channels(paths, grid, 4, 8)
        profile = design_random(np.random.default_rng(12), 8)
        low = sum_rate(channels, profile, LinkBudget.from_snr_db(5.0)).sum_rate_bits
        high = sum_rate(channels, profile, LinkBudget.from_snr_db(10.0)).sum_rate_bits
        assert high > low


class TestIdealRate:
    def test_unit_gain_per_subcarrier_closed_form(self):
        grid = build_frequency_grid(28e9, 2e9, 16)
        paths = sample_path_set(np.random.default_rng(13), LOS, 1, gain_mode="unit")
        channels = gen_channels(paths, grid, 8, 16)
        report = ideal_rate(channels, BUDGET)
        expected = np.log2(1 + 10.0 * 8 * 16**2)
        assert np.allclose(report.per_subcarrier_bits, expected, rtol=1e-9)

    def test_single_subcarrier_equals_central(self):
        grid = build_frequency_grid(28e9, 2e9, 1)
        paths = sample_path_set(np.random.default_rng(14), LOS, 1)
        channels = gen_channels(paths, grid, 4, 8)
        ideal = ideal_rate(channels, BUDGET).sum_rate_bits
        central = sum_rate(channels, design_central(paths, 8), BUDGET).sum_rate_bits
        assert ideal == pytest.approx(central, rel=1e-12)

    @pytest.mark.parametrize("scenario,num_paths", [(LOS, 1), (NLOS, 5)])
    def test_dominates_common_profiles_per_subcarrier(self, scenario, num_paths):
        grid = build_frequency_grid(28e9, 2e9, 16)
        rng = np.random.default_rng(15)
        for _ in range(5):
            paths = sample_path_set(rng, scenario, num_paths)
            channels = gen_channels(paths, grid, 4, 8)
            per_ideal = ideal_rate(channels, BUDGET).per_subcarrier_bits
            for profile in (design_random(rng, 8), zero_profile(8)):
                per_common = sum_rate(channels, profile, BUDGET).per_subcarrier_bits
                assert np.all(per_ideal + 1e-9 >= per_common)


class TestZFactor:
    def test_single_element_is_unit_modulus(self):
        grid = build_frequency_grid(28e9, 2e9, 4)
        paths = sample_path_set(np.random.default_rng(16), LOS, 1)
        profile = design_random(np.random.default_rng(17), 1)
        assert abs(z_factor(paths, profile, grid, 1, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_matched_angles_with_zero_profile(self):
        grid = build_frequency_grid(28e9, 2e9, 4)
        paths = sample_path_set(np.random.default_rng(18), LOS, 1)
        matched = dataclasses.replace(
            paths, ru_paths=(dataclasses.replace(paths.ru_paths[0], angle_rad=paths.bs_ris_aoa_rad),)
        )
        z = z_factor(matched, zero_profile(6), grid, 6, 1)
        assert z == pytest.approx(6.0 + 0j, abs=1e-12)

    def test_capped_by_element_count(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        rng = np.random.default_rng(19)
        for _ in range(50):
            paths = sample_path_set(rng, LOS, 1)
            profile = design_random(rng, 12)
            k = int(rng.integers(8))
            assert abs(z_factor(paths, profile, grid, 12, k)) <= 12 + 1e-12

    def test_cap_attained_only_by_aligned_profile(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        paths = sample_path_set(np.random.default_rng(33), LOS, 1)
        aligned = design_ideal(paths, grid, 6, 2)
        assert abs(z_factor(paths, aligned, grid, 6, 2)) == pytest.approx(6.0, abs=1e-12)
        nudged = aligned.phases_rad.copy()
        nudged[3] += 0.3
        detuned = PhaseProfile(nudged, "detuned")
        assert abs(z_factor(paths, detuned, grid, 6, 2)) < 6.0 - 1e-3

    def test_rejects_multipath(self):
        grid = build_frequency_grid(28e9, 2e9, 4)
        paths = sample_path_set(np.random.default_rng(20), NLOS, 2)
        with pytest.raises(ValueError):
            z_factor(paths, zero_profile(4), grid, 4, 0)

    def test_rejects_wrong_profile_length(self):
        grid = build_frequency_grid(28e9, 2e9, 4)
        paths = sample_path_set(np.random.default_rng(21), LOS, 1)
        with pytest.raises(ValueError):
            z_factor(paths, zero_profile(3), grid, 4, 0)


class TestRateUpperBound:
    def test_tight_on_single_subcarrier(self):
        grid = build_frequency_grid(28e9, 2e9, 1)
        paths = sample_path_set(np.random.default_rng(22), LOS, 1, gain_mode="unit")
        channels = gen_channels(paths, grid, 4, 8)
        profile = design_random(np.random.default_rng(23), 8)
        bound = rate_upper_bound(paths, profile, grid, 8, 4, BUDGET)
        assert bound == pytest.approx(sum_rate(channels, profile, BUDGET).sum_rate_bits, rel=1e-12)

    def test_tight_when_rates_are_flat(self):
        grid = build_frequency_grid(28e9, 0.0, 8)
        paths = sample_path_set(np.random.default_rng(24), LOS, 1, gain_mode="unit")
        channels = gen_channels(paths, grid, 4, 8)
        profile = design_random(np.random.default_rng(25), 8)
        bound = rate_upper_bound(paths, profile, grid, 8, 4, BUDGET)
        assert bound == pytest.approx(sum_rate(channels, profile, BUDGET).sum_rate_bits, rel=1e-9)

    def test_dominates_mean_rate(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        rng = np.random.default_rng(26)
        for _ in range(100):
            paths = sample_path_set(rng, LOS, 1, gain_mode="unit")
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_random(rng, 8)
            mean_rate = sum_rate(channels, profile, BUDGET).sum_rate_bits
            bound = rate_upper_bound(paths, profile, grid, 8, 4, BUDGET)
            assert mean_rate <= bound + 1e-12

    def test_rejects_multipath(self):
        grid = build_frequency_grid(28e9, 2e9, 4)
        paths = sample_path_set(np.random.default_rng(27), NLOS, 3)
        with pytest.raises(ValueError):
            rate_upper_bound(paths, zero_profile(4), grid, 4, 4, BUDGET)


class TestPhysicalConsistency:
    def test_los_rate_ignores_delays(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        paths = sample_path_set(np.random.default_rng(28), LOS, 1)
        moved = dataclasses.replace(
            paths,
            bs_ris_delay_s=17e-9,
            ru_paths=(dataclasses.replace(paths.ru_paths[0], delay_s=11e-9),),
        )
        profile = design_random(np.random.default_rng(29), 8)
        a = sum_rate(gen_channels(paths, grid, 4, 8), profile, BUDGET).per_subcarrier_bits
        b = sum_rate(gen_channels(moved, grid, 4, 8), profile, BUDGET).per_subcarrier_bits
        assert np.allclose(a, b, atol=1e-12)

    def test_mrt_receive_chain_matches_closed_form(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        rng = np.random.default_rng(30)
        for _ in range(10):
            paths = sample_path_set(rng, NLOS, 3)
            channels = gen_channels(paths, grid, 4, 8)
            profile = design_random(rng, 8)
            k = int(rng.integers(8))
            eff = effective_channel(channels.h_ris_user[k], profile, channels.h_bs_ris[k])
            f = mrt_beamformer(eff, BUDGET.transmit_power)
            explicit = np.log2(1.0 + abs(eff @ f) ** 2 / BUDGET.noise_power)
            assert explicit == pytest.approx(subcarrier_rate(eff, BUDGET), abs=1e-10)

    def test_global_phase_neutrality(self):
        grid = build_frequency_grid(28e9, 2e9, 8)
        paths = sample_path_set(np.random.default_rng(31), NLOS, 4)
        channels = gen_channels(paths, grid, 4, 8)
        profile = design_random(np.random.default_rng(32), 8)
        shifted = PhaseProfile(profile.phases_rad + 2.13, "shifted")
        a = sum_rate(channels, profile, BUDGET).per_subcarrier_bits
        b = sum_rate(channels, shifted, BUDGET).per_subcarrier_bits
        assert np.allclose(a, b, atol=1e-9)
