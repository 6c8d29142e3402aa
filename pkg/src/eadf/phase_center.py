"""Wideband delay estimation, phase-center fitting and phase compensation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from numpy.typing import ArrayLike, NDArray

from .array import ArrayModel, ElementModel, Mode
from .errors import AllMasked, DegenerateInput, RankDeficient
from .geometry import SPEED_OF_LIGHT, AngularGrid, grid_unit_vectors, projection
from .pattern import PatternSet, Polarization, RadiationPattern, extend, subsample
from .transform import forward, truncate

DEFAULT_THRESHOLD_DB = 13.0
OVERSAMPLING = 8
MAX_CONDITION = 1e8


def main_coverage_mask(pattern: "RadiationPattern | ArrayLike", threshold_db: float = DEFAULT_THRESHOLD_DB):
    """Directions whose gain is within ``threshold_db`` of the peak gain."""
    data = pattern.data if isinstance(pattern, RadiationPattern) else np.asarray(pattern)
    mag = np.abs(data)
    peak = mag.max()
    if peak == 0:
        raise AllMasked("pattern is identically zero")
    # compare amplitudes: 20 log10|a| >= 20 log10(peak) - threshold
    return mag >= peak * 10.0 ** (-threshold_db / 20.0)


def _uniform_step(frequencies: NDArray) -> float:
    if frequencies.size < 2:
        raise ValueError("at least two frequency points are needed")
    steps = np.diff(frequencies)
    step = steps.mean()
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * step:
        raise ValueError("frequencies must be uniformly spaced and increasing")
    return float(step)


def _fft_length(S: int) -> int:
    n = scipy.fft.next_fast_len(OVERSAMPLING * S)
    while n % 2:
        n = scipy.fft.next_fast_len(n + 1)
    return n


def estimate_delays(responses: ArrayLike, frequencies: ArrayLike, chunk: int = 512) -> NDArray[np.float64]:
    """Delay maximising ``|sum_s a(f_s) exp(j 2 pi f_s tau)|^2`` for each row.

    ``responses`` has shape ``(..., S)``. The search covers the unambiguous
    interval ``(-1/(2 df), 1/(2 df)]``: a zero-padded FFT locates the peak
    (exact ties go to the smallest ``|tau|``), then Newton steps on the
    derivative of the objective polish it to rounding level. Rows that are
    all zero give NaN.
    """
    a = np.asarray(responses, dtype=np.complex128)
    f = np.asarray(frequencies, dtype=float)
    df = _uniform_step(f)
    S = f.size
    if a.shape[-1] != S:
        raise ValueError(f"responses have {a.shape[-1]} frequency samples, expected {S}")
    shape = a.shape[:-1]
    a = a.reshape(-1, S)
    L = _fft_length(S)
    h = 1.0 / (L * df)
    k = np.arange(L)
    tau_grid = np.where(k > L // 2, k - L, k) * h
    omega = 2 * np.pi * (f - f[(S - 1) // 2])

    out = np.full(a.shape[0], np.nan)
    for lo in range(0, a.shape[0], chunk):
        block = a[lo:lo + chunk]
        live = np.any(block != 0, axis=1)
        if not live.any():
            continue
        block = block[live]
        J = np.abs(scipy.fft.ifft(block, n=L, axis=1)) ** 2
        top = J.max(axis=1, keepdims=True)
        score = np.where(J >= top * (1 - 1e-12), -np.abs(tau_grid), -np.inf)
        tau0 = tau_grid[np.argmax(score, axis=1)]
        out[np.flatnonzero(live) + lo] = _newton_polish(block, omega, tau0, h)
    return out.reshape(shape)


def _newton_polish(a: NDArray, omega: NDArray, tau0: NDArray, h: float, iters: int = 40) -> NDArray:
    tau = tau0.copy()
    tol = 1e-12 * h
    for _ in range(iters):
        e = a * np.exp(1j * np.outer(tau, omega))
        z = e.sum(axis=1)
        z1 = (e * (1j * omega)).sum(axis=1)
        z2 = -(e * omega ** 2).sum(axis=1)
        g = 2 * np.real(np.conj(z) * z1)
        H = 2 * (np.abs(z1) ** 2 + np.real(np.conj(z) * z2))
        step = np.where(H < 0, -g / np.where(H < 0, H, -1.0), np.sign(g) * h / 4)
        step = np.clip(step, -h / 2, h / 2)
        tau = np.clip(tau + step, tau0 - h, tau0 + h)
        if np.all(np.abs(step) <= tol):
            break
    return tau


def estimate_delay(responses: ArrayLike, frequencies: ArrayLike) -> float:
    """Delay estimate for a single direction, in seconds.

    Raises
    ------
    DegenerateInput
        If every response is zero.
    """
    a = np.asarray(responses, dtype=np.complex128).ravel()
    if not np.any(a != 0):
        raise DegenerateInput("all responses are zero")
    return float(estimate_delays(a[None, :], frequencies)[0])


@dataclass(frozen=True)
class DelayMap:
    """Per-direction delay estimates; ``delays`` is NaN where ``mask`` is false."""

    grid: AngularGrid
    delays: NDArray[np.float64]
    mask: NDArray[np.bool_]
    element_id: int = 0
    diagnostics: tuple[str, ...] = ()


def build_delay_map(
    pset: PatternSet,
    element_id: int,
    polarization=Polarization.V,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
) -> DelayMap:
    """Estimate the propagation delay in every main-coverage direction.

    The coverage mask is taken from the pattern at the centre frequency of the
    sweep. Directions whose estimate fails are dropped from the mask and
    reported in ``diagnostics``.
    """
    sweep = pset.sweep(element_id, polarization)
    mask = main_coverage_mask(sweep[pset.center_index], threshold_db)
    rows, cols = np.nonzero(mask)
    samples = np.asarray(sweep[:, rows, cols]).T
    delays = np.full(pset.grid.shape, np.nan)
    delays[rows, cols] = estimate_delays(samples, pset.frequencies)
    bad = mask & ~np.isfinite(delays)
    diagnostics = tuple(f"delay estimate failed at row {r}, col {c}" for r, c in zip(*np.nonzero(bad)))
    return DelayMap(pset.grid, delays, mask & ~bad, element_id, diagnostics)


@dataclass(frozen=True)
class PhaseCenterEstimate:
    """Fitted phase center ``d_hat`` (m) and fixed delay offset (s).

    ``condition_number`` refers to the dimensionless design matrix
    ``[-u_x, -u_y, -u_z, 1]``.
    """

    d_hat: NDArray[np.float64]
    delta_tau_hat: float
    rms_residual: float
    n_directions_used: int
    condition_number: float
    element_id: int = 0
    residuals: NDArray[np.float64] = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "element_id": self.element_id,
            "d_hat_m": [float(v) for v in self.d_hat],
            "delta_tau_hat_s": self.delta_tau_hat,
            "rms_residual_s": self.rms_residual,
            "n_directions_used": self.n_directions_used,
            "condition_number": self.condition_number,
        }


def design_matrix(unit_vectors: NDArray) -> NDArray[np.float64]:
    """Rows ``[-u_x, -u_y, -u_z, 1]`` so that ``X @ (d, c*dtau) = c*tau``."""
    u = np.asarray(unit_vectors, dtype=float).reshape(-1, 3)
    return np.column_stack([-u, np.ones(len(u))])


def fit_phase_center(delay_map: DelayMap) -> PhaseCenterEstimate:
    """Least-squares phase center from a delay map.

    Minimises ``sum (tau_hat - (dtau - u.d / c))^2`` over the masked
    directions. The problem is linear in ``(d, dtau)`` and is solved with an
    SVD-based least-squares solver in length units.

    Raises
    ------
    RankDeficient
        If the masked directions do not determine all four unknowns.
    """
    u = grid_unit_vectors(delay_map.grid)[delay_map.mask]
    tau = delay_map.delays[delay_map.mask]
    X = design_matrix(u)
    if len(X) < 4 or np.linalg.matrix_rank(X) < 4:
        raise RankDeficient(f"{len(X)} directions do not span the four unknowns")
    cond = float(np.linalg.cond(X))
    if cond > MAX_CONDITION:
        raise RankDeficient(f"design matrix condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    rho = SPEED_OF_LIGHT * tau
    sol, *_ = np.linalg.lstsq(X, rho, rcond=None)
    resid = (rho - X @ sol) / SPEED_OF_LIGHT
    return PhaseCenterEstimate(
        d_hat=sol[:3],
        delta_tau_hat=float(sol[3] / SPEED_OF_LIGHT),
        rms_residual=float(np.sqrt(np.mean(resid ** 2))),
        n_directions_used=int(len(X)),
        condition_number=cond,
        element_id=delay_map.element_id,
        residuals=resid,
    )


def compensation_phase(grid: AngularGrid, d_hat: ArrayLike, wavelength: float) -> NDArray[np.complex128]:
    return np.exp(-2j * np.pi * projection(grid, d_hat) / wavelength)


def compensate(pattern: RadiationPattern, d_hat: ArrayLike, wavelength: float) -> RadiationPattern:
    """Remove the phase ramp of a phase-center offset ``d_hat`` from a pattern."""
    return pattern.with_data(pattern.data * compensation_phase(pattern.grid, d_hat, wavelength))


def estimate_phase_centers(
    pset: PatternSet,
    polarization=None,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
) -> dict[int, PhaseCenterEstimate]:
    """Delay map and least-squares fit for every element of a set."""
    pol = pset.polarizations[0] if polarization is None else polarization
    out = {}
    for element_id in pset.element_ids:
        out[element_id] = fit_phase_center(build_delay_map(pset, element_id, pol, threshold_db))
    return out


def characterize_element(
    pset: PatternSet,
    element_id: int,
    frequency: float,
    phase_center=None,
    factors: tuple[int, int] = (1, 1),
    power_fraction: float = 1.0,
) -> ElementModel:
    """EADFs of one element for every polarization in the set.

    With ``phase_center`` given, each (subsampled) pattern is compensated
    before the transform; otherwise the conventional EADF is built.
    """
    eadfs = {}
    for pol in pset.polarizations:
        pattern = subsample(pset.pattern(element_id, frequency, pol), *factors)
        if phase_center is not None:
            pattern = compensate(pattern, phase_center, pattern.wavelength)
        q = forward(extend(pattern))
        eadfs[pol] = q if power_fraction >= 1.0 else truncate(q, power_fraction)
    return ElementModel(element_id, eadfs, np.zeros(3) if phase_center is None else phase_center)


def build_conventional_model(
    pset: PatternSet,
    frequency: float | None = None,
    factors: tuple[int, int] = (1, 1),
    power_fraction: float = 1.0,
) -> ArrayModel:
    frequency = pset.center_frequency if frequency is None else frequency
    elements = [characterize_element(pset, e, frequency, None, factors, power_fraction) for e in pset.element_ids]
    return ArrayModel(pset.grid.subgrid(*factors), pset.frequencies[pset.frequency_index(frequency)],
                      Mode.CONVENTIONAL, elements)


def build_enhanced_model(
    pset: PatternSet,
    frequency: float | None = None,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
    factors: tuple[int, int] = (1, 1),
    power_fraction: float = 1.0,
    estimates: dict[int, PhaseCenterEstimate] | None = None,
    polarization=None,
) -> ArrayModel:
    """Enhanced-mode model: delay map, phase-center fit, compensation, EADF.

    Phase centers are fitted on the full grid of ``pset`` unless precomputed
    ``estimates`` are passed; the EADFs are built from the patterns
    subsampled by ``factors`` at ``frequency`` (default: centre frequency).
    """
    frequency = pset.center_frequency if frequency is None else frequency
    if estimates is None:
        estimates = estimate_phase_centers(pset, polarization, threshold_db)
    elements = [
        characterize_element(pset, e, frequency, estimates[e].d_hat, factors, power_fraction)
        for e in pset.element_ids
    ]
    meta = {"phase_center_estimates": {e: estimates[e].as_dict() for e in pset.element_ids}}
    return ArrayModel(pset.grid.subgrid(*factors), pset.frequencies[pset.frequency_index(frequency)],
                      Mode.ENHANCED, elements, meta)
