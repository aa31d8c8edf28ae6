import numpy as np
import pytest

import aircomp_fa as af
from aircomp_fa.model import ContractError
from aircomp_fa.validate import random_instance


def breakdown_for(config, b, m, positions):
    channels = af.build_channels(config, positions)
    sol = af.Solution(np.asarray(b, complex), np.asarray(m, complex), positions)
    return af.mse_analytic(config, channels, sol)


class TestMseAnalytic:
    def test_zero_beamformer_leaves_pure_misalignment(self):
        config = af.random_config(4, 3, 8.0, 0.5, power_cap=1.0,
                                  uncertainty_width=0.2, rng_seed=1)
        out = breakdown_for(config, np.ones(4), np.zeros(3), af.uniform_positions(config))
        assert out.misalignment == pytest.approx(0.25, abs=1e-15)
        assert out.csi_error == 0.0
        assert out.noise == 0.0
        assert out.total == pytest.approx(0.25, abs=1e-15)

    def test_scalar_aligned_leaves_only_noise(self, tiny_config):
        config = tiny_config
        # noise_power 0.5 via a fresh config; h = 1 exactly at x = 0
        config = af.SystemConfig(**{**config.to_dict(), "noise_power": 0.5})
        out = breakdown_for(config, [1.0], [1.0], af.AntennaPositions([0.0]))
        assert out.misalignment == 0.0
        assert out.csi_error == 0.0
        assert out.total == out.noise == pytest.approx(0.5, abs=1e-15)

    def test_total_is_sum_of_parts(self):
        config, sol = random_instance(5)
        channels = af.build_channels(config, sol.positions)
        out = af.mse_analytic(config, channels, sol)
        assert out.total == pytest.approx(out.misalignment + out.csi_error + out.noise, rel=1e-15)
        assert out.csi_error > 0

    def test_zero_uncertainty_kills_csi_term(self):
        config, sol = random_instance(5, uncertainty_width=0.0)
        channels = af.build_channels(config, sol.positions)
        assert af.mse_analytic(config, channels, sol).csi_error == 0.0

    def test_dimension_mismatch_rejected(self):
        config, sol = random_instance(6)
        channels = af.build_channels(config, sol.positions)
        bad = af.Solution(sol.transmit_coeffs[:-1], sol.beamformer, sol.positions)
        with pytest.raises(ContractError):
            af.mse_analytic(config, channels, bad)

    def test_channels_must_match_positions(self):
        config, sol = random_instance(6)
        other = af.uniform_positions(config)
        channels = af.build_channels(config, other)
        with pytest.raises(ContractError):
            af.mse_analytic(config, channels, sol)

    def test_noise_term_scales_quadratically_in_beamformer(self):
        config, sol = random_instance(7)
        channels = af.build_channels(config, sol.positions)
        base = af.mse_analytic(config, channels, sol)
        scaled = af.mse_analytic(
            config, channels,
            af.Solution(sol.transmit_coeffs, 3.0 * sol.beamformer, sol.positions),
        )
        assert scaled.noise == pytest.approx(9.0 * base.noise, rel=1e-12)

    def test_total_monotone_in_noise_power(self):
        config, sol = random_instance(8)
        quiet = af.SystemConfig(**{**config.to_dict(), "noise_power": 0.5})
        loud = af.SystemConfig(**{**config.to_dict(), "noise_power": 2.0})
        t_quiet = breakdown_for(quiet, sol.transmit_coeffs, sol.beamformer, sol.positions).total
        t_loud = breakdown_for(loud, sol.transmit_coeffs, sol.beamformer, sol.positions).total
        assert t_loud > t_quiet

    def test_common_phase_rotation_invariance(self):
        config, sol = random_instance(9)
        channels = af.build_channels(config, sol.positions)
        base = af.mse_analytic(config, channels, sol)
        phi = np.exp(1j * 0.77)
        rotated = af.mse_analytic(
            config, channels,
            af.Solution(phi * sol.transmit_coeffs, phi * sol.beamformer, sol.positions),
        )
        assert rotated.misalignment == pytest.approx(base.misalignment, rel=1e-12)
        assert rotated.csi_error == pytest.approx(base.csi_error, rel=1e-12)
        assert rotated.noise == pytest.approx(base.noise, rel=1e-12)


class TestMseMonteCarlo:
    def test_perfect_alignment_zero_error(self, tiny_config):
        config = af.SystemConfig(**{**tiny_config.to_dict(), "noise_power": 0.0})
        positions = af.AntennaPositions([0.0])
        channels = af.build_channels(config, positions)
        sol = af.Solution([1.0], [1.0], positions)
        assert af.mse_monte_carlo(config, channels, sol, 5000, rng_seed=1) == 0.0

    def test_zero_solution_recovers_signal_variance(self, tiny_config):
        positions = af.AntennaPositions([0.0])
        channels = af.build_channels(tiny_config, positions)
        sol = af.Solution([0.0], [0.0], positions)
        n = 40_000
        estimate = af.mse_monte_carlo(tiny_config, channels, sol, n, rng_seed=2)
        # samples are |s|^2 with s ~ CN(0,1): mean 1, std 1
        assert abs(estimate - 1.0) < 3.0 / np.sqrt(n)

    def test_agreement_with_analytic(self):
        config, sol = random_instance(12, uncertainty_width=0.2)
        channels = af.build_channels(config, sol.positions)
        exact = af.mse_analytic(config, channels, sol).total
        estimate = af.mse_monte_carlo(config, channels, sol, 1_000_000, rng_seed=3)
        assert abs(estimate - exact) / exact < 0.01

    def test_deterministic_given_seed(self):
        config, sol = random_instance(13)
        channels = af.build_channels(config, sol.positions)
        a = af.mse_monte_carlo(config, channels, sol, 70_001, rng_seed=4)
        b = af.mse_monte_carlo(config, channels, sol, 70_001, rng_seed=4)
        assert a == b

    def test_error_shrinks_with_more_samples(self):
        config, sol = random_instance(14, uncertainty_width=0.1)
        channels = af.build_channels(config, sol.positions)
        exact = af.mse_analytic(config, channels, sol).total
        coarse = af.mse_monte_carlo(config, channels, sol, 10_000, rng_seed=5)
        fine = af.mse_monte_carlo(config, channels, sol, 1_000_000, rng_seed=5)
        assert abs(fine - exact) < abs(coarse - exact)

    def test_exact_mode_close_at_small_uncertainty(self):
        config, sol = random_instance(15, uncertainty_width=0.01)
        channels = af.build_channels(config, sol.positions)
        exact = af.mse_analytic(config, channels, sol).total
        estimate = af.mse_monte_carlo(config, channels, sol, 400_000, rng_seed=6, mode="exact")
        # linearization error is second order in theta0; 1% here
        assert abs(estimate - exact) / exact < 0.01

    def test_bad_arguments_rejected(self):
        config, sol = random_instance(16)
        channels = af.build_channels(config, sol.positions)
        with pytest.raises(ContractError):
            af.mse_monte_carlo(config, channels, sol, 0, rng_seed=1)
        with pytest.raises(ContractError):
            af.mse_monte_carlo(config, channels, sol, 10, rng_seed=1, mode="bogus")
