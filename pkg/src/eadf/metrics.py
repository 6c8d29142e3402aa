"""Relative error magnitude (REM) maps, CDFs and EADF power spectra."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .array import ArrayModel
from .errors import UndefinedAtZero
from .geometry import AngularGrid
from .pattern import RadiationPattern
from .phase_center import DEFAULT_THRESHOLD_DB, main_coverage_mask
from .transform import Eadf

DB_FLOOR = -300.0
CDF_BINS_DB = np.arange(-120.0, 20.0 + 0.25, 0.5)


def rem(truth: complex, estimate: complex) -> float:
    """``|truth - estimate| / |truth|``.

    Raises
    ------
    UndefinedAtZero
        If ``truth`` is zero.
    """
    if truth == 0:
        raise UndefinedAtZero("REM is undefined for a zero reference")
    return float(abs(truth - estimate) / abs(truth))


def rem_array(truth: ArrayLike, estimate: ArrayLike) -> NDArray[np.float64]:
    """Element-wise REM; NaN where ``truth`` is zero."""
    truth = np.asarray(truth, dtype=np.complex128)
    estimate = np.asarray(estimate, dtype=np.complex128)
    mag = np.abs(truth)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(mag > 0, np.abs(truth - estimate) / np.where(mag > 0, mag, 1.0), np.nan)


def to_db(ratio: ArrayLike) -> NDArray[np.float64]:
    """``20 log10`` of a magnitude ratio, floored at -300 dB."""
    ratio = np.asarray(ratio, dtype=float)
    with np.errstate(divide="ignore"):
        return np.maximum(20.0 * np.log10(ratio), DB_FLOOR)


def empirical_cdf(values_db: ArrayLike, bins: NDArray = CDF_BINS_DB) -> list[tuple[float, float]]:
    """``P(value <= bin)`` at each bin edge; values outside the bins saturate."""
    v = np.sort(np.asarray(values_db, dtype=float).ravel())
    if v.size == 0:
        return [(float(b), float("nan")) for b in bins]
    probs = np.searchsorted(v, bins, side="right") / v.size
    return [(float(b), float(p)) for b, p in zip(bins, probs)]


def lower_median(values: ArrayLike) -> float:
    """The lower middle order statistic (no averaging of the two middle values)."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        return float("nan")
    return float(v[(v.size - 1) // 2])


@dataclass(frozen=True)
class RemReport:
    """Per-direction REM of one element on the truth grid.

    ``mask`` marks the directions entering the statistics: inside the
    evaluation region, not used to build the model (unless the model grid is
    the truth grid) and with a non-zero reference.
    """

    grid: AngularGrid
    rem: NDArray[np.float64]
    mask: NDArray[np.bool_]
    element_id: int = 0
    label: str = ""

    @property
    def values_db(self) -> NDArray[np.float64]:
        return to_db(self.rem[self.mask])

    @property
    def cdf(self) -> list[tuple[float, float]]:
        return empirical_cdf(self.values_db)

    @property
    def median_db(self) -> float:
        return lower_median(self.values_db)

    def percentile_db(self, q: float) -> float:
        v = self.values_db
        return float(np.percentile(v, q)) if v.size else float("nan")

    def summary(self) -> dict:
        return summarize([self], self.label)


def summarize(reports: Sequence[RemReport], label: str = "") -> dict:
    """Pooled statistics over several elements, as written to JSON."""
    values = np.concatenate([r.values_db for r in reports]) if reports else np.array([])
    pct = {}
    for q in (5, 10, 25, 50, 75, 90, 95):
        pct[str(q)] = float(np.percentile(values, q)) if values.size else None
    return {
        "label": label,
        "elements": [int(r.element_id) for r in reports],
        "n_directions": int(values.size),
        "median_db": lower_median(values),
        "percentiles_db": pct,
        "cdf": [[b, p] for b, p in empirical_cdf(values)],
    }


def build_mask(truth_grid: AngularGrid, model_grid: AngularGrid) -> NDArray[np.bool_]:
    """Truth-grid directions that coincide with the model's sampling grid."""
    if truth_grid.M % model_grid.M or truth_grid.N % model_grid.N:
        raise ValueError(f"model grid {model_grid} is not a subgrid of truth grid {truth_grid}")
    zf, af = truth_grid.M // model_grid.M, truth_grid.N // model_grid.N
    mask = np.zeros(truth_grid.shape, dtype=bool)
    mask[::zf, ::af] = True
    return mask


def rem_map(
    truth: RadiationPattern,
    model: ArrayModel,
    region: NDArray[np.bool_] | None = None,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
    include_build: bool | None = None,
    label: str = "",
) -> RemReport:
    """REM of a model's reconstruction against a measured pattern.

    ``region`` defaults to the main coverage of ``truth``. Directions used to
    build the model are left out unless ``include_build`` is set; by default
    they are included only when the model grid equals the truth grid, since
    otherwise nothing would be left to evaluate.
    """
    if not np.isclose(truth.frequency, model.frequency, rtol=1e-12):
        raise ValueError(f"truth at {truth.frequency} Hz, model at {model.frequency} Hz")
    if include_build is None:
        include_build = model.grid == truth.grid
    estimate = model.element_response_grid(truth.element_id, truth.polarization, truth.grid)
    values = rem_array(truth.data, estimate)
    mask = main_coverage_mask(truth, threshold_db) if region is None else np.asarray(region, dtype=bool).copy()
    if not include_build:
        mask &= ~build_mask(truth.grid, model.grid)
    mask &= np.isfinite(values)
    return RemReport(truth.grid, values, mask, truth.element_id, label)


def eadf_power_spectrum(q: Eadf) -> NDArray[np.float64]:
    """``10 log10(|Q|^2 / max |Q|^2)``, floored at -300 dB."""
    power = np.abs(q.data) ** 2
    peak = power.max()
    if peak == 0:
        return np.full(power.shape, DB_FLOOR)
    with np.errstate(divide="ignore"):
        return np.maximum(10.0 * np.log10(power / peak), DB_FLOOR)


def central_power_fraction(q: Eadf, extent: float = 0.5) -> float:
    """Share of spectral power in the centred window spanning ``extent`` of each axis.

    ``extent=0.5`` is the central quarter of the frequency plane.
    """
    full = q.padded()
    M, N = q.grid.M, q.grid.N
    a = int(np.floor(extent * M))
    b = int(np.floor(extent * N))
    inner = full[M - a:M + a, N - b:N + b]
    total = np.sum(np.abs(full) ** 2)
    return float(np.sum(np.abs(inner) ** 2) / total) if total > 0 else 0.0
