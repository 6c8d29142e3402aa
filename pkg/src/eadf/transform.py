"""EADF forward transform, reconstruction, truncation and Nyquist budgets.

The spectrum of an extended pattern ``C`` (``2M x 2N``) is

    Q[k, l] = 1/(4MN) * sum_{m,n} C[m, n] exp(-j pi kappa m / M) exp(-j pi nu n / N)

with integer spatial frequencies ``kappa = -M..M-1`` and ``nu = -N..N-1``
stored DC-centred (``kappa = 0`` at row ``M``). Reconstruction evaluates the
trigonometric polynomial ``sum Q[kappa, nu] exp(j kappa theta) exp(j nu phi)``,
which interpolates ``C`` on the grid because of the ``1/(4MN)`` factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .geometry import AngularGrid
from .pattern import ExtendedPattern, RadiationPattern, extend


@dataclass(frozen=True)
class Eadf:
    """DC-centred spatial-frequency spectrum of one extended pattern.

    ``data`` is indexed by ``theta_freqs`` (rows) and ``phi_freqs`` (columns),
    both contiguous integer ranges. An untruncated spectrum spans
    ``[-M, M-1] x [-N, N-1]``; a truncated one keeps a centred window and
    treats every coefficient outside it as zero.
    """

    grid: AngularGrid
    data: NDArray[np.complex128]
    theta_freqs: NDArray[np.int64]
    phi_freqs: NDArray[np.int64]

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128, copy=True)
        tf = np.asarray(self.theta_freqs, dtype=np.int64)
        pf = np.asarray(self.phi_freqs, dtype=np.int64)
        if data.shape != (tf.size, pf.size):
            raise ValueError(f"spectrum shape {data.shape} does not match window {(tf.size, pf.size)}")
        for arr in (data, tf, pf):
            arr.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "theta_freqs", tf)
        object.__setattr__(self, "phi_freqs", pf)

    @classmethod
    def full(cls, grid: AngularGrid, data: ArrayLike) -> "Eadf":
        return cls(grid, data, np.arange(-grid.M, grid.M), np.arange(-grid.N, grid.N))

    @property
    def is_truncated(self) -> bool:
        return self.data.shape != self.grid.extended_shape

    @property
    def window(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Inclusive ``((theta_min, theta_max), (phi_min, phi_max))`` frequency ranges."""
        return ((int(self.theta_freqs[0]), int(self.theta_freqs[-1])),
                (int(self.phi_freqs[0]), int(self.phi_freqs[-1])))

    def power(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))

    def padded(self) -> NDArray[np.complex128]:
        """Spectrum embedded in the full ``2M x 2N`` frequency lattice."""
        out = np.zeros(self.grid.extended_shape, dtype=np.complex128)
        rows = self.theta_freqs + self.grid.M
        cols = self.phi_freqs + self.grid.N
        out[np.ix_(rows, cols)] = self.data
        return out


def forward_array(C: NDArray) -> NDArray[np.complex128]:
    """Centred, normalised 2D DFT of ``(..., 2M, 2N)`` arrays."""
    two_m, two_n = C.shape[-2:]
    Q = np.fft.fft2(C, axes=(-2, -1)) / (two_m * two_n)
    return np.fft.fftshift(Q, axes=(-2, -1))


def forward(ext: "ExtendedPattern | RadiationPattern") -> Eadf:
    """EADF of an extended pattern. A plain pattern is extended first."""
    if isinstance(ext, RadiationPattern):
        ext = extend(ext)
    return Eadf.full(ext.grid, forward_array(ext.data))


def zenith_kernel(theta: ArrayLike, freqs: NDArray) -> NDArray[np.complex128]:
    """``exp(j theta kappa)`` with a trailing frequency axis."""
    return np.exp(1j * np.multiply.outer(np.asarray(theta, dtype=float), freqs))


def reconstruct(q: Eadf, theta: ArrayLike, phi: ArrayLike, chunk: int = 4096) -> NDArray[np.complex128]:
    """Evaluate the EADF at arbitrary directions.

    ``theta`` and ``phi`` broadcast against each other; the result has their
    broadcast shape (a scalar input gives a 0-d array).
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    shape = theta.shape
    t, p = theta.ravel(), phi.ravel()
    out = np.empty(t.size, dtype=np.complex128)
    for lo in range(0, t.size, chunk):
        hi = lo + chunk
        rows = zenith_kernel(t[lo:hi], q.theta_freqs) @ q.data
        out[lo:hi] = np.einsum("dl,dl->d", rows, zenith_kernel(p[lo:hi], q.phi_freqs))
    return out.reshape(shape)


def reconstruct_grid(q: Eadf, theta: ArrayLike, phi: ArrayLike) -> NDArray[np.complex128]:
    """Evaluate on the tensor grid ``theta x phi``; shape ``(len(theta), len(phi))``."""
    left = zenith_kernel(theta, q.theta_freqs)
    right = zenith_kernel(phi, q.phi_freqs)
    return left @ q.data @ right.T


def _window_powers(power: NDArray, M: int, N: int) -> NDArray[np.float64]:
    """Power inside centred windows, indexed by half-widths ``(a, b)``.

    Window ``(a, b)`` keeps ``kappa in [-a, min(a, M-1)]`` and
    ``nu in [-b, min(b, N-1)]``.
    """
    cum = np.zeros((2 * M + 1, 2 * N + 1))
    cum[1:, 1:] = power.cumsum(0).cumsum(1)
    a = np.arange(M + 1)
    b = np.arange(N + 1)
    r0, r1 = M - a, M + np.minimum(a, M - 1) + 1
    c0, c1 = N - b, N + np.minimum(b, N - 1) + 1
    return (cum[r1][:, c1] - cum[r0][:, c1] - cum[r1][:, c0] + cum[r0][:, c0])


def truncate(q: Eadf, power_fraction: float) -> Eadf:
    """Keep the smallest centred window holding ``power_fraction`` of the power.

    Among windows of equal area the one retaining more power wins.
    """
    if not 0.0 < power_fraction <= 1.0:
        raise ValueError(f"power_fraction must lie in (0, 1], got {power_fraction}")
    if q.is_truncated:
        raise ValueError("spectrum is already truncated")
    M, N = q.grid.M, q.grid.N
    power = np.abs(q.data) ** 2
    windows = _window_powers(power, M, N)
    total = windows[M, N]
    a = np.arange(M + 1)[:, None]
    b = np.arange(N + 1)[None, :]
    area = (a + np.minimum(a, M - 1) + 1) * (b + np.minimum(b, N - 1) + 1)
    ok = windows >= power_fraction * total
    area = np.where(ok, area, np.iinfo(np.int64).max)
    candidates = np.argwhere(area == area.min())
    best = max(candidates, key=lambda ab: (windows[ab[0], ab[1]], -ab[0], -ab[1]))
    ha, hb = int(best[0]), int(best[1])
    tf = np.arange(-ha, min(ha, M - 1) + 1)
    pf = np.arange(-hb, min(hb, N - 1) + 1)
    return Eadf(q.grid, q.data[np.ix_(tf + M, pf + N)], tf, pf)


@dataclass(frozen=True)
class SpatialFreqBudget:
    """Largest local spatial frequencies (cycles/rad) and the Nyquist steps (rad)."""

    f_theta_max: float
    f_phi_max: float

    @staticmethod
    def _step(f: float) -> float:
        return np.inf if f == 0 else 1.0 / (2.0 * f)

    @property
    def max_zenith_step(self) -> float:
        return self._step(self.f_theta_max)

    @property
    def max_azimuth_step(self) -> float:
        return self._step(self.f_phi_max)

    @property
    def max_zenith_step_deg(self) -> float:
        return float(np.rad2deg(self.max_zenith_step))

    @property
    def max_azimuth_step_deg(self) -> float:
        return float(np.rad2deg(self.max_azimuth_step))

    def as_dict(self) -> dict:
        def fmt(x):
            return None if np.isinf(x) else float(x)
        return {
            "f_theta_max": self.f_theta_max,
            "f_phi_max": self.f_phi_max,
            "max_zenith_step_rad": fmt(self.max_zenith_step),
            "max_azimuth_step_rad": fmt(self.max_azimuth_step),
            "max_zenith_step_deg": fmt(self.max_zenith_step_deg),
            "max_azimuth_step_deg": fmt(self.max_azimuth_step_deg),
        }


def max_spatial_freq(d: ArrayLike, wavelength: float) -> SpatialFreqBudget:
    """Sphere-wide maximum spatial frequencies caused by a phase-center offset ``d``.

    The azimuth rate is bounded by the offset's distance from the z axis and
    the zenith rate by its full length, both in wavelengths.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    x, y, z = np.asarray(d, dtype=float)
    return SpatialFreqBudget(
        f_theta_max=float(np.sqrt(x * x + y * y + z * z) / wavelength),
        f_phi_max=float(np.hypot(x, y) / wavelength),
    )


def array_budget(positions: ArrayLike, wavelength: float) -> SpatialFreqBudget:
    """Budget of a whole array: the element-wise maximum of both frequencies."""
    budgets = [max_spatial_freq(d, wavelength) for d in np.atleast_2d(positions)]
    return SpatialFreqBudget(
        f_theta_max=max(b.f_theta_max for b in budgets),
        f_phi_max=max(b.f_phi_max for b in budgets),
    )
