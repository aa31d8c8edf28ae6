"""Independent numerical oracles for the solver pipeline.

Each check re-derives a quantity by a route that shares no code with the
implementation it tests: dense grid searches for the closed-form updates,
central finite differences for analytic gradients, and Monte-Carlo sampling
for the closed-form MSE. The CLI `validate` command runs the whole suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .model import (
    AntennaPositions,
    Solution,
    SystemConfig,
    build_channels,
    random_config,
    uniform_positions,
)
from .objective import mse_analytic, mse_monte_carlo
from .seeding import derive_seed
from .solvers import (
    BcdSettings,
    bcd_solve,
    placement_gradient,
    placement_objective,
    solve_beamformer,
    solve_power,
    solve_positions,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_positions(config: SystemConfig, rng: np.random.Generator) -> AntennaPositions:
    """Strictly feasible positions: sorted random offsets on top of L0 spacing."""
    n = config.num_antennas
    slack = config.aperture_length - (n - 1) * config.min_spacing
    offsets = np.sort(rng.uniform(0.02, 0.98, n)) * slack
    return AntennaPositions(offsets + config.min_spacing * np.arange(n))


def random_instance(
    seed: int,
    num_users: int = 10,
    num_antennas: int = 8,
    aperture_length: float = 8.0,
    min_spacing: float = 0.5,
    uncertainty_width: float = 0.1,
    snr_db: float = 10.0,
) -> tuple[SystemConfig, Solution]:
    """Seeded scenario plus a random feasible (b, m, x) triple."""
    power = 10.0 ** (snr_db / 10.0)
    config = random_config(
        num_users,
        num_antennas,
        aperture_length,
        min_spacing,
        power_cap=power,
        uncertainty_width=uncertainty_width,
        rng_seed=derive_seed(seed, "config"),
    )
    rng = np.random.default_rng(derive_seed(seed, "solution"))
    positions = random_positions(config, rng)
    b_mag = np.sqrt(power) * rng.uniform(0.1, 1.0, num_users)
    b = b_mag * np.exp(1j * rng.uniform(0, 2 * np.pi, num_users))
    # Beamformer scaled so m^H h_k b_k lands near unity for typical gains.
    scale = 1.0 / max(np.mean(config.amplitudes) * np.mean(b_mag) * num_antennas, 1e-12)
    m = scale * (rng.standard_normal(num_antennas) + 1j * rng.standard_normal(num_antennas))
    return config, Solution(b, m, positions)


def power_subproblem_objective(
    config: SystemConfig, channels, beamformer: np.ndarray, positions, b_k: complex, k: int
) -> float:
    """Single-user transmit objective, evaluated directly from its definition."""
    g = np.vdot(beamformer, channels.estimated_channels[k])  # m^H h_k
    quad = float(np.sum(np.abs(beamformer) ** 2 * positions.values**2))
    coupling = channels.uncertainty_coeffs[k] * config.uncertainty_widths[k] ** 2 * quad
    return abs(g * b_k - 1.0) ** 2 + abs(b_k) ** 2 * coupling


def check_power_grid(seed: int, num_instances: int = 50, grid_size: int = 100_000) -> CheckResult:
    """solve_power vs a dense 1-D magnitude grid search per user."""
    worst = 0.0
    for i in range(num_instances):
        config, sol = random_instance(derive_seed(seed, "power", i))
        channels = build_channels(config, sol.positions)
        b_opt = solve_power(config, channels, sol.beamformer, sol.positions)
        k = i % config.num_users
        cap = np.sqrt(config.power_caps[k])
        step = cap / (grid_size - 1)
        g = np.vdot(sol.beamformer, channels.estimated_channels[k])
        mags = np.linspace(0.0, cap, grid_size)
        quad = float(np.sum(np.abs(sol.beamformer) ** 2 * sol.positions.values**2))
        coupling = channels.uncertainty_coeffs[k] * config.uncertainty_widths[k] ** 2 * quad
        values = np.abs(abs(g) * mags - 1.0) ** 2 + mags**2 * coupling
        best = mags[int(np.argmin(values))]
        worst = max(worst, abs(best - abs(b_opt[k])))
        if abs(best - abs(b_opt[k])) > step:
            return CheckResult(
                "power-closed-form-vs-grid",
                False,
                f"instance {i}: grid argmin {best} vs closed form {abs(b_opt[k])} "
                f"(grid step {step})",
            )
    return CheckResult(
        "power-closed-form-vs-grid", True, f"{num_instances} instances, worst gap {worst:.3e}"
    )


def _real_gradient(func, vec: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite differences over the stacked (real, imag) coordinates."""
    grad = np.zeros(2 * vec.size)
    for i in range(2 * vec.size):
        delta = np.zeros(vec.size, dtype=complex)
        if i < vec.size:
            delta[i] = step
        else:
            delta[i - vec.size] = 1j * step
        grad[i] = (func(vec + delta) - func(vec - delta)) / (2 * step)
    return grad


def check_beamformer_stationarity(seed: int, num_instances: int = 50) -> CheckResult:
    """Finite-difference gradient of the MSE at the closed-form beamformer."""
    worst = 0.0
    for i in range(num_instances):
        config, sol = random_instance(derive_seed(seed, "beam", i))
        channels = build_channels(config, sol.positions)
        m_opt = solve_beamformer(config, channels, sol.transmit_coeffs, sol.positions)

        def mse_of(m):
            return mse_analytic(
                config, channels, Solution(sol.transmit_coeffs, m, sol.positions)
            ).total

        ref = float(np.linalg.norm(_real_gradient(mse_of, np.zeros_like(m_opt))))
        norm = float(np.linalg.norm(_real_gradient(mse_of, m_opt)))
        bound = 1e-6 * (1.0 + ref)
        worst = max(worst, norm / bound)
        if norm >= bound:
            return CheckResult(
                "beamformer-stationarity",
                False,
                f"instance {i}: gradient norm {norm:.3e} >= bound {bound:.3e}",
            )
    return CheckResult(
        "beamformer-stationarity", True, f"{num_instances} instances, worst norm/bound {worst:.3f}"
    )


def check_placement_gradient(
    seed: int, num_points: int = 20, step: float = 1e-6, rel_tol: float = 1e-5
) -> CheckResult:
    """Analytic placement gradient vs central differences, componentwise."""
    worst = 0.0
    for i in range(num_points):
        config, sol = random_instance(derive_seed(seed, "grad", i))
        grad = placement_gradient(config, sol.transmit_coeffs, sol.beamformer, sol.positions)
        x = sol.positions.values
        fd = np.zeros_like(grad)
        for n in range(x.size):
            delta = np.zeros_like(x)
            delta[n] = step
            f_plus = placement_objective(
                config, sol.transmit_coeffs, sol.beamformer, AntennaPositions(x + delta)
            )
            f_minus = placement_objective(
                config, sol.transmit_coeffs, sol.beamformer, AntennaPositions(x - delta)
            )
            fd[n] = (f_plus - f_minus) / (2 * step)
        rel = np.abs(grad - fd) / np.maximum(np.maximum(np.abs(grad), np.abs(fd)), 1e-12)
        worst = max(worst, float(np.max(rel)))
        if np.max(rel) >= rel_tol:
            n = int(np.argmax(rel))
            return CheckResult(
                "placement-gradient-fd",
                False,
                f"point {i} component {n}: analytic {grad[n]:.6e} vs fd {fd[n]:.6e} "
                f"(rel {rel[n]:.2e})",
            )
    return CheckResult(
        "placement-gradient-fd", True, f"{num_points} points, worst rel err {worst:.2e}"
    )


def check_mc_agreement(
    seed: int,
    num_instances: int = 20,
    num_samples: int = 1_000_000,
    rel_tol: float = 0.01,
    theta0_cycle: tuple[float, ...] = (0.0, 0.1, 0.2),
) -> CheckResult:
    """Closed-form MSE vs the linearized Monte-Carlo estimate."""
    start = time.monotonic()
    worst = 0.0
    for i in range(num_instances):
        config, sol = random_instance(
            derive_seed(seed, "mc", i), uncertainty_width=theta0_cycle[i % len(theta0_cycle)]
        )
        channels = build_channels(config, sol.positions)
        exact = mse_analytic(config, channels, sol).total
        estimate = mse_monte_carlo(
            config, channels, sol, num_samples, rng_seed=derive_seed(seed, "mc-draws", i)
        )
        rel = abs(estimate - exact) / exact
        worst = max(worst, rel)
        if rel >= rel_tol:
            return CheckResult(
                "mc-vs-analytic",
                False,
                f"instance {i}: analytic {exact:.6e} vs MC {estimate:.6e} (rel {rel:.3%})",
            )
    elapsed = time.monotonic() - start
    return CheckResult(
        "mc-vs-analytic",
        True,
        f"{num_instances} instances x {num_samples} samples, worst rel {worst:.3%}, "
        f"{elapsed:.1f}s",
    )


def check_positions_grid(
    seed: int, num_instances: int = 10, grid_size: int = 200, tol: float = 1e-3
) -> CheckResult:
    """solve_positions at N=2, K=1 vs a dense feasible grid."""
    settings = BcdSettings()
    worst = -np.inf
    for i in range(num_instances):
        config, sol = random_instance(
            derive_seed(seed, "pos", i), num_users=1, num_antennas=2
        )
        x_out = solve_positions(
            config, sol.transmit_coeffs, sol.beamformer, uniform_positions(config), settings
        )
        f_out = placement_objective(config, sol.transmit_coeffs, sol.beamformer, x_out)

        aperture, spacing = config.aperture_length, config.min_spacing
        x1 = np.linspace(0.0, aperture - spacing, grid_size)
        x2 = np.linspace(spacing, aperture, grid_size)
        g1, g2 = np.meshgrid(x1, x2, indexing="ij")
        feasible = g2 - g1 >= spacing
        kappa = config.wavenumber
        amp = config.amplitudes[0]
        cos_t = np.cos(config.nominal_angles[0])
        b = sol.transmit_coeffs[0]
        m = sol.beamformer
        g = amp * b * (
            np.conj(m[0]) * np.exp(1j * kappa * cos_t * g1)
            + np.conj(m[1]) * np.exp(1j * kappa * cos_t * g2)
        )
        psi = (kappa * amp * np.sin(config.nominal_angles[0])) ** 2 / 3.0
        quad = abs(b) ** 2 * psi * config.uncertainty_widths[0] ** 2
        values = np.abs(g - 1.0) ** 2 + quad * (
            np.abs(m[0]) ** 2 * g1**2 + np.abs(m[1]) ** 2 * g2**2
        )
        grid_best = float(np.min(values[feasible]))
        worst = max(worst, f_out - grid_best)
        if f_out > grid_best + tol:
            return CheckResult(
                "positions-grid-n2",
                False,
                f"instance {i}: solver f {f_out:.6e} vs grid best {grid_best:.6e}",
            )
    return CheckResult(
        "positions-grid-n2", True, f"{num_instances} instances, worst f-gap {worst:.2e}"
    )


def check_bcd_monotonic(seed: int, num_instances: int = 10, slack: float = 1e-10) -> CheckResult:
    """Objective trace never increases across block updates; final x feasible."""
    settings = BcdSettings()
    for i in range(num_instances):
        config = random_config(
            10, 8, 8.0, 0.5,
            power_cap=10.0,
            uncertainty_width=(0.0, 0.1, 0.2, 0.3)[i % 4],
            rng_seed=derive_seed(seed, "bcd", i),
        )
        sol, trace = bcd_solve(config, settings)
        seq = [trace.initial_objective]
        for j in range(trace.num_iterations):
            seq.extend(
                (
                    trace.objectives_after_beamformer[j],
                    trace.objectives_after_power[j],
                    trace.objectives[j],
                )
            )
        diffs = np.diff(seq)
        if np.any(diffs > slack):
            j = int(np.argmax(diffs))
            return CheckResult(
                "bcd-monotonic",
                False,
                f"instance {i}: objective rose by {diffs[j]:.3e} at step {j}",
            )
        if not trace.converged:
            return CheckResult(
                "bcd-monotonic", False, f"instance {i}: no convergence in {settings.max_outer_iters} iters"
            )
        config.check_positions(sol.positions, strict=True)
    return CheckResult("bcd-monotonic", True, f"{num_instances} instances monotone and converged")


def run_all(seed: int) -> list[CheckResult]:
    """The oracle suite with CLI-scale sizes (the test suite runs larger ones)."""
    return [
        check_power_grid(seed, num_instances=20),
        check_beamformer_stationarity(seed, num_instances=20),
        check_placement_gradient(seed, num_points=10),
        check_mc_agreement(seed, num_instances=5, num_samples=200_000, rel_tol=0.02),
        check_positions_grid(seed, num_instances=3),
        check_bcd_monotonic(seed, num_instances=5),
    ]
