"""Robust MSE objective: closed form and Monte-Carlo estimator.

The access point recovers s_hat = m^H y / K and the target is the user
average s = (1/K) sum_k s_k. Averaging over symbols, AoA errors, and noise,
the MSE splits into three parts:

    misalignment = (1/K^2) * sum_k |m^H h_k b_k - 1|^2
    csi_error    = (1/K^2) * sum_k sum_n |b_k|^2 * psi_k * theta_k0^2 * |m_n x_n|^2
    noise        = ||m||^2 * sigma_z^2 / K^2

The csi_error term is the expectation under the zero-mean channel-error
model with diagonal covariance psi_k * x_n^2 * theta_k0^2 per entry; the
Monte-Carlo estimator's default "linearized" mode samples exactly that model
(independent per-entry angle errors, first-order perturbation), so the two
routes agree in the limit. The "exact" mode instead draws one AoA error per
user and rebuilds the exact steering phases, which quantifies the
linearization error but is not the acceptance reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelSet, ContractError, Solution, SystemConfig
from .seeding import derive_seed

_CHUNK = 1 << 16  # fixed Monte-Carlo chunk size; keeps sub-seed schedule stable


@dataclass(frozen=True)
class MseBreakdown:
    """The three MSE components and their sum."""

    misalignment: float
    csi_error: float
    noise: float
    total: float

    def to_dict(self) -> dict:
        return {
            "misalignment": self.misalignment,
            "csi_error": self.csi_error,
            "noise": self.noise,
            "total": self.total,
        }


def _check_dims(config: SystemConfig, channels: ChannelSet, sol: Solution) -> None:
    k, n = config.num_users, config.num_antennas
    if channels.estimated_channels.shape != (k, n):
        raise ContractError(
            f"channel matrix is {channels.estimated_channels.shape}, expected ({k}, {n})"
        )
    if sol.transmit_coeffs.shape != (k,):
        raise ContractError(f"transmit_coeffs length {sol.transmit_coeffs.shape[0]}, expected {k}")
    if sol.beamformer.shape != (n,):
        raise ContractError(f"beamformer length {sol.beamformer.shape[0]}, expected {n}")
    if not np.array_equal(channels.positions.values, sol.positions.values):
        raise ContractError("channels were not built from the solution's antenna positions")


def mse_analytic(config: SystemConfig, channels: ChannelSet, sol: Solution) -> MseBreakdown:
    """Evaluate the three-term MSE in closed form."""
    _check_dims(config, channels, sol)
    k2 = float(config.num_users) ** 2
    b = sol.transmit_coeffs
    m = sol.beamformer
    x = sol.positions.values

    g = (channels.estimated_channels @ m.conj()) * b  # m^H h_k b_k per user
    misalignment = float(np.sum(np.abs(g - 1.0) ** 2)) / k2

    mx2 = np.abs(m) ** 2 * x**2
    per_user = np.abs(b) ** 2 * channels.uncertainty_coeffs * config.uncertainty_widths**2
    csi_error = float(np.sum(per_user) * np.sum(mx2)) / k2

    noise = float(np.vdot(m, m).real) * config.noise_power / k2
    return MseBreakdown(
        misalignment=misalignment,
        csi_error=csi_error,
        noise=noise,
        total=misalignment + csi_error + noise,
    )


def mse_monte_carlo(
    config: SystemConfig,
    channels: ChannelSet,
    sol: Solution,
    num_samples: int,
    rng_seed: int,
    mode: str = "linearized",
) -> float:
    """Sample-mean estimate of E|s_hat - s|^2.

    Each sample draws unit complex-Gaussian symbols s_k, AoA errors, and
    receiver noise z ~ CN(0, sigma_z^2 I), then forms s_hat = m^H y / K.
    Sampling is chunked with a fixed schedule: chunk c uses the RNG seed
    derive_seed(rng_seed, c) and draws, in order, angle errors, symbols,
    noise — so the estimate is reproducible and independent of how chunks
    might be partitioned across workers.
    """
    if num_samples < 1:
        raise ContractError("num_samples must be >= 1")
    if mode not in ("linearized", "exact"):
        raise ContractError(f"unknown mode {mode!r}")
    _check_dims(config, channels, sol)

    k = config.num_users
    b = sol.transmit_coeffs
    m = sol.beamformer
    x = sol.positions.values
    h_bar = channels.estimated_channels
    widths = config.uncertainty_widths
    noise_scale = np.sqrt(config.noise_power / 2.0)

    base = (h_bar @ m.conj()) * b - 1.0  # error with the estimated channel
    # Linear response of m^H dh_k b_k to a per-entry angle error.
    coeff = (
        1j
        * config.wavenumber
        * np.sin(config.nominal_angles)[:, None]
        * b[:, None]
        * m.conj()[None, :]
        * h_bar
        * x[None, :]
    )
    amp_b = config.amplitudes * b

    total = 0.0
    done = 0
    chunk_index = 0
    while done < num_samples:
        s_chunk = min(_CHUNK, num_samples - done)
        rng = np.random.default_rng(derive_seed(rng_seed, chunk_index))
        if mode == "linearized":
            dtheta = rng.uniform(
                -widths[:, None, None], widths[:, None, None], size=(k, len(x), s_chunk)
            )
            err_users = base[:, None] + np.einsum("kn,kns->ks", coeff, dtheta)
        else:
            dtheta = rng.uniform(-widths[:, None], widths[:, None], size=(k, s_chunk))
            phase = config.wavenumber * (x[None, :, None] * np.cos(
                config.nominal_angles[:, None] + dtheta
            )[:, None, :])
            inner = np.einsum("n,kns->ks", m.conj(), np.exp(1j * phase))
            err_users = amp_b[:, None] * inner - 1.0
        symbols = (
            rng.standard_normal((k, s_chunk)) + 1j * rng.standard_normal((k, s_chunk))
        ) / np.sqrt(2.0)
        z = noise_scale * (
            rng.standard_normal((len(x), s_chunk)) + 1j * rng.standard_normal((len(x), s_chunk))
        )
        err = (np.sum(err_users * symbols, axis=0) + m.conj() @ z) / k
        total += float(np.sum(err.real**2 + err.imag**2))
        done += s_chunk
        chunk_index += 1
    return total / num_samples
