"""Benchmark schemes, parameter sweeps, and CSV persistence.

Three schemes are compared, all evaluated under the true uncertainty level:

  proposed        full BCD over (m, b, x);
  ignore_csi      BCD run as if theta_k0 = 0, then scored with the true
                  uncertainty (the non-robust design);
  fixed_position  uniform APV, only (m, b) alternated to convergence.

A sweep enumerates the cartesian grid theta0 x snr_db x antenna_counts x
aperture_lengths; every grid point gets num_geometries independent seeded
user geometries shared by all schemes, so scheme comparisons are paired.
"""

from __future__ import annotations

import csv
import enum
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    ConfigError,
    Solution,
    SystemConfig,
    build_channels,
    draw_user_geometry,
    uniform_positions,
)
from .objective import mse_analytic
from .seeding import derive_seed
from .solvers import BcdSettings, bcd_solve, solve_transceiver_fixed_positions

CSV_HEADER = (
    "scheme",
    "theta0",
    "snr_db",
    "N",
    "K",
    "L",
    "mse_mean",
    "mse_std",
    "num_geometries",
    "rng_seed",
)


class Scheme(enum.Enum):
    PROPOSED = "proposed"
    IGNORE_CSI = "ignore_csi"
    FIXED_POSITION = "fixed_position"


@dataclass(frozen=True)
class SweepBase:
    """Grid-independent scenario constants shared by every sweep point."""

    num_users: int
    min_spacing: float
    wavelength: float = 1.0
    path_loss_exponent: float = 2.0
    noise_power: float = 1.0


@dataclass(frozen=True)
class SweepSpec:
    """One experiment grid: uncertainty x SNR x antenna count x aperture."""

    base: SweepBase
    theta0_grid: tuple[float, ...]
    snr_db_grid: tuple[float, ...]
    antenna_counts: tuple[int, ...]
    aperture_lengths: tuple[float, ...]
    num_geometries: int = 50
    rng_seed: int = 0
    schemes: tuple[Scheme, ...] = (Scheme.PROPOSED, Scheme.IGNORE_CSI, Scheme.FIXED_POSITION)

    def __post_init__(self):
        for name in ("theta0_grid", "snr_db_grid", "antenna_counts", "aperture_lengths"):
            grid = tuple(getattr(self, name))
            object.__setattr__(self, name, grid)
            if not grid:
                raise ConfigError(f"{name} must be non-empty")
            if list(grid) != sorted(grid):
                raise ConfigError(f"{name} must be sorted ascending")
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        if self.num_geometries < 1:
            raise ConfigError("num_geometries must be >= 1")

    def grid_points(self) -> list[tuple[float, float, int, float]]:
        """(theta0, snr_db, N, L) tuples in the documented nesting order."""
        return [
            (t, s, n, l)
            for t in self.theta0_grid
            for s in self.snr_db_grid
            for n in self.antenna_counts
            for l in self.aperture_lengths
        ]

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        try:
            base = SweepBase(
                num_users=int(data["base"]["num_users"]),
                min_spacing=float(data["base"]["min_spacing"]),
                wavelength=float(data["base"].get("wavelength", 1.0)),
                path_loss_exponent=float(data["base"].get("path_loss_exponent", 2.0)),
                noise_power=float(data["base"].get("noise_power", 1.0)),
            )
            return cls(
                base=base,
                theta0_grid=tuple(float(v) for v in data["theta0_grid"]),
                snr_db_grid=tuple(float(v) for v in data["snr_db_grid"]),
                antenna_counts=tuple(int(v) for v in data["antenna_counts"]),
                aperture_lengths=tuple(float(v) for v in data["aperture_lengths"]),
                num_geometries=int(data.get("num_geometries", 50)),
                rng_seed=int(data.get("rng_seed", 0)),
                schemes=tuple(Scheme(s) for s in data.get("schemes", [s.value for s in Scheme])),
            )
        except KeyError as exc:
            raise ConfigError(f"missing sweep field: {exc.args[0]}") from exc
        except ValueError as exc:
            raise ConfigError(f"bad sweep field: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SweepResult:
    """Geometry-averaged MSE for one (scheme, grid point) cell."""

    scheme: Scheme
    theta0: float
    snr_db: float
    num_antennas: int
    num_users: int
    aperture_length: float
    mse_mean: float
    mse_std: float
    num_geometries: int
    rng_seed: int


def evaluate_true_mse(config: SystemConfig, sol: Solution) -> float:
    """Score a solution with the actual uncertainty widths of `config`."""
    channels = build_channels(config, sol.positions)
    return mse_analytic(config, channels, sol).total


def run_scheme(
    scheme: Scheme,
    config: SystemConfig,
    settings: BcdSettings | None = None,
    rng_seed: int = 0,
) -> tuple[Solution, float]:
    """Optimize under one scheme and return (solution, MSE under true theta0)."""
    settings = settings or BcdSettings()
    if scheme is Scheme.PROPOSED:
        sol, _ = bcd_solve(config, settings, rng_seed)
    elif scheme is Scheme.IGNORE_CSI:
        blind = SystemConfig(
            num_users=config.num_users,
            num_antennas=config.num_antennas,
            aperture_length=config.aperture_length,
            min_spacing=config.min_spacing,
            wavelength=config.wavelength,
            path_loss_exponent=config.path_loss_exponent,
            noise_power=config.noise_power,
            power_caps=config.power_caps,
            uncertainty_widths=np.zeros(config.num_users),
            user_distances=config.user_distances,
            nominal_angles=config.nominal_angles,
        )
        sol, _ = bcd_solve(blind, settings, rng_seed)
    elif scheme is Scheme.FIXED_POSITION:
        sol, _ = solve_transceiver_fixed_positions(config, uniform_positions(config), settings)
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    return sol, evaluate_true_mse(config, sol)


def geometry_config(spec: SweepSpec, point: tuple[float, float, int, float], seed: int) -> SystemConfig:
    """Scenario for one (grid point, geometry) cell; power from the SNR axis."""
    theta0, snr_db, num_antennas, aperture = point
    rng = np.random.default_rng(seed)
    angles, distances = draw_user_geometry(spec.base.num_users, rng)
    ones = np.ones(spec.base.num_users)
    power = spec.base.noise_power * 10.0 ** (snr_db / 10.0)
    return SystemConfig(
        num_users=spec.base.num_users,
        num_antennas=num_antennas,
        aperture_length=aperture,
        min_spacing=spec.base.min_spacing,
        wavelength=spec.base.wavelength,
        path_loss_exponent=spec.base.path_loss_exponent,
        noise_power=spec.base.noise_power,
        power_caps=power * ones,
        uncertainty_widths=theta0 * ones,
        user_distances=distances,
        nominal_angles=angles,
    )


def _sweep_cell(args) -> tuple[int, int, dict[str, float]]:
    spec, settings, point_index, geometry_index = args
    point = spec.grid_points()[point_index]
    seed = derive_seed(spec.rng_seed, point_index, geometry_index)
    config = geometry_config(spec, point, seed)
    out = {}
    for scheme in spec.schemes:
        _, mse = run_scheme(scheme, config, settings, rng_seed=seed)
        out[scheme.value] = mse
    return point_index, geometry_index, out


def run_sweep(
    spec: SweepSpec,
    settings: BcdSettings | None = None,
    jobs: int | None = None,
) -> list[SweepResult]:
    """Run every (grid point, geometry, scheme) cell and aggregate.

    Geometry g of grid point i is seeded with derive_seed(rng_seed, i, g),
    so results are reproducible and independent of worker scheduling. Cells
    are distributed over a process pool when jobs > 1.
    """
    settings = settings or BcdSettings()
    points = spec.grid_points()
    tasks = [
        (spec, settings, i, g)
        for i in range(len(points))
        for g in range(spec.num_geometries)
    ]
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, len(tasks)))

    if jobs == 1:
        cell_outputs = [_sweep_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cell_outputs = list(pool.map(_sweep_cell, tasks, chunksize=4))

    per_cell: dict[tuple[int, str], list[float]] = {
        (i, scheme.value): [0.0] * spec.num_geometries
        for i in range(len(points))
        for scheme in spec.schemes
    }
    for point_index, geometry_index, values in cell_outputs:
        for scheme_value, mse in values.items():
            per_cell[(point_index, scheme_value)][geometry_index] = mse

    results = []
    for i, (theta0, snr_db, num_antennas, aperture) in enumerate(points):
        for scheme in spec.schemes:
            values = np.array(per_cell[(i, scheme.value)])
            std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
            results.append(
                SweepResult(
                    scheme=scheme,
                    theta0=theta0,
                    snr_db=snr_db,
                    num_antennas=num_antennas,
                    num_users=spec.base.num_users,
                    aperture_length=aperture,
                    mse_mean=float(np.mean(values)),
                    mse_std=std,
                    num_geometries=spec.num_geometries,
                    rng_seed=spec.rng_seed,
                )
            )
    results.sort(
        key=lambda r: (r.scheme.value, r.theta0, r.snr_db, r.num_antennas, r.aperture_length)
    )
    return results


def _format(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def write_results(results: list[SweepResult], path) -> None:
    """Write sweep results as CSV (shortest round-trip decimals, sorted rows)."""
    rows = sorted(
        results,
        key=lambda r: (r.scheme.value, r.theta0, r.snr_db, r.num_antennas, r.aperture_length),
    )
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow(
                    [
                        r.scheme.value,
                        _format(r.theta0),
                        _format(r.snr_db),
                        r.num_antennas,
                        r.num_users,
                        _format(r.aperture_length),
                        _format(r.mse_mean),
                        _format(r.mse_std),
                        r.num_geometries,
                        r.rng_seed,
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path) -> list[SweepResult]:
    """Read back a CSV produced by write_results."""
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = tuple(next(reader))
            if header != CSV_HEADER:
                raise ConfigError(f"unexpected CSV header {header!r} in {path}")
            out = []
            for row in reader:
                out.append(
                    SweepResult(
                        scheme=Scheme(row[0]),
                        theta0=float(row[1]),
                        snr_db=float(row[2]),
                        num_antennas=int(row[3]),
                        num_users=int(row[4]),
                        aperture_length=float(row[5]),
                        mse_mean=float(row[6]),
                        mse_std=float(row[7]),
                        num_geometries=int(row[8]),
                        rng_seed=int(row[9]),
                    )
                )
            return out
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
