"""Scenario configuration, LoS channels, and AoA-uncertainty statistics.

An access point carries N movable antennas on a line segment [0, L]; K
single-antenna users at distances l_k see the array under nominal arrival
angles theta_bar_k. The estimated channel entry for user k at antenna n is

    h_kn = sqrt(l_k^-alpha) * exp(j * (2*pi/lambda) * x_n * cos(theta_bar_k)),

and the AoA estimation error dtheta_k ~ U[-theta_k0, theta_k0] perturbs it,
to first order, by h_kn * j*(2*pi/lambda)*x_n*sin(theta_bar_k) * dtheta_k.
The per-entry error variance is psi_k * x_n^2 * theta_k0^2 with

    psi_k = (1/3) * ((2*pi/lambda) * sqrt(l_k^-alpha) * sin(theta_bar_k))^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """A scenario configuration violates its invariants."""


class FeasibilityError(ValueError):
    """An antenna position vector violates a placement constraint."""


class ContractError(ValueError):
    """Operation inputs are dimensionally or structurally inconsistent."""


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """All scenario constants. Lengths are in wavelength units unless noted.

    Vectors are per-user (length num_users): power_caps holds the maximum
    |b_k|^2, uncertainty_widths the AoA error half-widths theta_k0 in rad,
    user_distances l_k, nominal_angles theta_bar_k in (0, pi).
    """

    num_users: int
    num_antennas: int
    aperture_length: float
    min_spacing: float
    wavelength: float
    path_loss_exponent: float
    noise_power: float
    power_caps: np.ndarray
    uncertainty_widths: np.ndarray
    user_distances: np.ndarray
    nominal_angles: np.ndarray

    def __post_init__(self):
        if self.num_users < 1 or self.num_antennas < 1:
            raise ConfigError("num_users and num_antennas must be >= 1")
        for name in ("aperture_length", "min_spacing", "wavelength", "path_loss_exponent"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.noise_power >= 0:
            raise ConfigError("noise_power must be non-negative")
        # A feasible placement of N antennas with spacing >= L0 inside [0, L]
        # requires (N-1)*L0 <= L.
        if (self.num_antennas - 1) * self.min_spacing > self.aperture_length:
            raise ConfigError(
                f"(N-1)*min_spacing = {(self.num_antennas - 1) * self.min_spacing} exceeds "
                f"aperture_length = {self.aperture_length}: no feasible placement"
            )
        for name in ("power_caps", "uncertainty_widths", "user_distances", "nominal_angles"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
            if getattr(self, name).shape != (self.num_users,):
                raise ConfigError(f"{name} must have length num_users = {self.num_users}")
        if not np.all(self.power_caps > 0):
            raise ConfigError("power_caps must be positive")
        if not (np.all(self.uncertainty_widths >= 0) and np.all(self.uncertainty_widths <= np.pi / 2)):
            raise ConfigError("uncertainty_widths must lie in [0, pi/2]")
        if not np.all(self.user_distances > 0):
            raise ConfigError("user_distances must be positive")
        if not (np.all(self.nominal_angles > 0) and np.all(self.nominal_angles < np.pi)):
            raise ConfigError("nominal_angles must lie in (0, pi)")

    def __eq__(self, other):
        if not isinstance(other, SystemConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def wavenumber(self) -> float:
        """Spatial phase constant 2*pi/lambda."""
        return 2.0 * np.pi / self.wavelength

    @property
    def amplitudes(self) -> np.ndarray:
        """Per-user propagation gains sqrt(l_k^-alpha)."""
        return np.sqrt(self.user_distances ** (-self.path_loss_exponent))

    def check_positions(self, positions: "AntennaPositions", strict: bool = False) -> None:
        """Raise FeasibilityError naming the violated constraint, if any.

        strict=True additionally rejects boundary contact (needed by the
        log-barrier placement solver).
        """
        x = positions.values
        if x.shape != (self.num_antennas,):
            raise ContractError(
                f"positions have length {x.shape[0]}, config expects {self.num_antennas}"
            )
        if x[0] < 0 or (strict and x[0] <= 0):
            raise FeasibilityError(f"constraint x_1 >= 0 violated: x_1 = {x[0]}")
        if x[-1] > self.aperture_length or (strict and x[-1] >= self.aperture_length):
            raise FeasibilityError(
                f"constraint x_N <= L violated: x_N = {x[-1]}, L = {self.aperture_length}"
            )
        if self.num_antennas > 1:
            gaps = np.diff(x)
            bad = np.where(gaps <= self.min_spacing)[0] if strict else np.where(gaps < self.min_spacing)[0]
            if bad.size:
                n = int(bad[0])
                raise FeasibilityError(
                    f"constraint x_n - x_(n-1) >= L0 violated at n = {n + 2}: "
                    f"gap = {gaps[n]}, L0 = {self.min_spacing}"
                )

    def to_dict(self) -> dict:
        return {
            "num_users": self.num_users,
            "num_antennas": self.num_antennas,
            "aperture_length": self.aperture_length,
            "min_spacing": self.min_spacing,
            "wavelength": self.wavelength,
            "path_loss_exponent": self.path_loss_exponent,
            "noise_power": self.noise_power,
            "power_caps": self.power_caps.tolist(),
            "uncertainty_widths": self.uncertainty_widths.tolist(),
            "user_distances": self.user_distances.tolist(),
            "nominal_angles": self.nominal_angles.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        try:
            return cls(
                num_users=int(data["num_users"]),
                num_antennas=int(data["num_antennas"]),
                aperture_length=float(data["aperture_length"]),
                min_spacing=float(data["min_spacing"]),
                wavelength=float(data["wavelength"]),
                path_loss_exponent=float(data["path_loss_exponent"]),
                noise_power=float(data["noise_power"]),
                power_caps=data["power_caps"],
                uncertainty_widths=data["uncertainty_widths"],
                user_distances=data["user_distances"],
                nominal_angles=data["nominal_angles"],
            )
        except KeyError as exc:
            raise ConfigError(f"missing config field: {exc.args[0]}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SystemConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class AntennaPositions:
    """Antenna position vector x, strictly increasing, in wavelength units."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        x = self.values
        if x.ndim != 1 or x.size < 1:
            raise FeasibilityError("positions must be a non-empty 1-D vector")
        if not np.all(np.isfinite(x)):
            raise FeasibilityError("positions must be finite")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise FeasibilityError("positions must be strictly increasing")

    @property
    def n(self) -> int:
        return self.values.size


def uniform_positions(config: SystemConfig) -> AntennaPositions:
    """Uniformly spread positions x_n = L*n/(N+1), the fixed-array baseline."""
    n = np.arange(1, config.num_antennas + 1)
    return AntennaPositions(config.aperture_length * n / (config.num_antennas + 1))


@dataclass(frozen=True)
class ChannelSet:
    """Estimated channels h_bar (K x N) and per-user uncertainty scalars psi."""

    estimated_channels: np.ndarray
    uncertainty_coeffs: np.ndarray
    positions: AntennaPositions

    def __post_init__(self):
        object.__setattr__(self, "estimated_channels", _frozen(self.estimated_channels, complex))
        object.__setattr__(self, "uncertainty_coeffs", _frozen(self.uncertainty_coeffs))


@dataclass(frozen=True)
class Solution:
    """Decision triple: transmit coefficients b, receive beamformer m, positions x."""

    transmit_coeffs: np.ndarray
    beamformer: np.ndarray
    positions: AntennaPositions

    def __post_init__(self):
        object.__setattr__(self, "transmit_coeffs", _frozen(self.transmit_coeffs, complex))
        object.__setattr__(self, "beamformer", _frozen(self.beamformer, complex))


def build_channels(config: SystemConfig, positions: AntennaPositions) -> ChannelSet:
    """Construct estimated channels and uncertainty scalars for an APV.

    h_kn = sqrt(l_k^-alpha) * exp(j*(2*pi/lambda)*x_n*cos(theta_bar_k)),
    psi_k = (1/3)*((2*pi/lambda)*sqrt(l_k^-alpha)*sin(theta_bar_k))^2.
    """
    config.check_positions(positions)
    x = positions.values
    amp = config.amplitudes
    phase = config.wavenumber * np.outer(np.cos(config.nominal_angles), x)
    h_bar = amp[:, None] * np.exp(1j * phase)
    psi = (config.wavenumber * amp * np.sin(config.nominal_angles)) ** 2 / 3.0
    return ChannelSet(estimated_channels=h_bar, uncertainty_coeffs=psi, positions=positions)


def sample_perturbed_channels(
    config: SystemConfig,
    channels: ChannelSet,
    rng_seed: int,
    size: int | None = None,
) -> np.ndarray:
    """Draw perturbed channels h = h_bar + h_bar * j*k0*x_n*sin(theta_bar)*dtheta.

    One AoA error dtheta_k ~ U[-theta_k0, theta_k0] is drawn per user and
    applied (first order) across that user's antennas. Deterministic given
    rng_seed. Returns a (K, N) array, or (size, K, N) when size is given.
    """
    rng = np.random.default_rng(rng_seed)
    widths = config.uncertainty_widths
    shape = (config.num_users,) if size is None else (size, config.num_users)
    dtheta = rng.uniform(-widths, widths, size=shape)
    x = channels.positions.values
    # Per-user phase slope q_kn = j*(2*pi/lambda)*x_n*sin(theta_bar_k).
    slope = 1j * config.wavenumber * np.outer(np.sin(config.nominal_angles), x)
    h_bar = channels.estimated_channels
    return h_bar * (1.0 + slope * dtheta[..., None])


def draw_user_geometry(
    num_users: int,
    rng: np.random.Generator,
    distance_range: tuple[float, float] = (10.0, 50.0),
    angle_range: tuple[float, float] = (np.pi / 12, 11 * np.pi / 12),
) -> tuple[np.ndarray, np.ndarray]:
    """Sample nominal angles then distances for one scenario realization."""
    angles = rng.uniform(angle_range[0], angle_range[1], num_users)
    distances = rng.uniform(distance_range[0], distance_range[1], num_users)
    return angles, distances


def random_config(
    num_users: int,
    num_antennas: int,
    aperture_length: float,
    min_spacing: float,
    power_cap: float,
    uncertainty_width: float,
    rng_seed: int,
    noise_power: float = 1.0,
    wavelength: float = 1.0,
    path_loss_exponent: float = 2.0,
) -> SystemConfig:
    """Seeded scenario with random user geometry and shared caps/uncertainty."""
    rng = np.random.default_rng(rng_seed)
    angles, distances = draw_user_geometry(num_users, rng)
    ones = np.ones(num_users)
    return SystemConfig(
        num_users=num_users,
        num_antennas=num_antennas,
        aperture_length=aperture_length,
        min_spacing=min_spacing,
        wavelength=wavelength,
        path_loss_exponent=path_loss_exponent,
        noise_power=noise_power,
        power_caps=power_cap * ones,
        uncertainty_widths=uncertainty_width * ones,
        user_distances=distances,
        nominal_angles=angles,
    )
