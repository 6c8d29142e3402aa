"""Directions, angular grids and unit vectors.

Angles are radians throughout. Zenith ``theta`` is measured from the +z axis,
azimuth ``phi`` from the +x axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

TWO_PI = 2.0 * np.pi
SPEED_OF_LIGHT = 299792458.0
"Speed of light in vacuum, m/s."


def wavelength(frequency: ArrayLike) -> NDArray[np.float64] | float:
    return SPEED_OF_LIGHT / np.asarray(frequency, dtype=float)


def wrap_azimuth(phi: ArrayLike) -> NDArray[np.float64]:
    """Map azimuth angles onto [0, 2*pi)."""
    out = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


@dataclass(frozen=True)
class Direction:
    """A single look direction.

    ``theta`` may extend beyond pi (up to 2*pi) so that extended-pattern
    coordinates can be evaluated. ``phi`` is wrapped to [0, 2*pi).
    """

    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (np.isfinite(theta) and np.isfinite(phi)):
            raise ValueError(f"non-finite direction ({theta}, {phi})")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", float(wrap_azimuth(phi)))

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "Direction":
        return cls(np.deg2rad(theta_deg), np.deg2rad(phi_deg))

    def unit_vector(self) -> NDArray[np.float64]:
        return unit_vector(self.theta, self.phi)


@dataclass(frozen=True)
class AngularGrid:
    """Equiangular measurement grid.

    Zenith samples are ``r*pi/M`` for ``r = 0..M`` and azimuth samples are
    ``c*pi/N`` for ``c = 0..2N-1``, giving an ``(M+1, 2N)`` pattern matrix.
    """

    M: int
    N: int

    def __post_init__(self):
        for name in ("M", "N"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.M + 1, 2 * self.N)

    @property
    def extended_shape(self) -> tuple[int, int]:
        return (2 * self.M, 2 * self.N)

    @property
    def zenith_step(self) -> float:
        return np.pi / self.M

    @property
    def azimuth_step(self) -> float:
        return np.pi / self.N

    @property
    def theta(self) -> NDArray[np.float64]:
        return np.arange(self.M + 1) * np.pi / self.M

    @property
    def phi(self) -> NDArray[np.float64]:
        return np.arange(2 * self.N) * np.pi / self.N

    @property
    def size(self) -> int:
        return (self.M + 1) * 2 * self.N

    def mesh(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Zenith and azimuth arrays of shape ``(M+1, 2N)``."""
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def subgrid(self, zenith_factor: int, azimuth_factor: int) -> "AngularGrid":
        return AngularGrid(self.M // zenith_factor, self.N // azimuth_factor)

    @classmethod
    def from_step_degrees(cls, zenith_step: float, azimuth_step: float | None = None) -> "AngularGrid":
        azimuth_step = zenith_step if azimuth_step is None else azimuth_step
        M = 180.0 / zenith_step
        N = 180.0 / azimuth_step
        if abs(M - round(M)) > 1e-9 or abs(N - round(N)) > 1e-9:
            raise ValueError(f"steps ({zenith_step}, {azimuth_step}) deg do not divide 180 deg")
        return cls(int(round(M)), int(round(N)))


def unit_vector(theta: ArrayLike, phi: ArrayLike) -> NDArray[np.float64]:
    """Unit vector ``[sin t cos p, sin t sin p, cos t]`` with a trailing axis of 3."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack(np.broadcast_arrays(st * np.cos(phi), st * np.sin(phi), np.cos(theta)), axis=-1)


def grid_directions(grid: AngularGrid) -> list[Direction]:
    """All grid directions in row-major order (zenith rows, azimuth columns)."""
    return [Direction(t, p) for t in grid.theta for p in grid.phi]


def grid_unit_vectors(grid: AngularGrid) -> NDArray[np.float64]:
    """Unit vectors of the grid, shape ``(M+1, 2N, 3)``."""
    return unit_vector(*grid.mesh())


def projection(grid: AngularGrid, d: ArrayLike) -> NDArray[np.float64]:
    """``u(theta, phi) . d`` on the grid, shape ``(M+1, 2N)``."""
    return grid_unit_vectors(grid) @ np.asarray(d, dtype=float)
