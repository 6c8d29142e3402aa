"""Measured radiation patterns: containers, full-sphere extension and subsampling."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import NonDivisibleFactor
from .geometry import SPEED_OF_LIGHT, AngularGrid


class Polarization(str, enum.Enum):
    H = "H"
    V = "V"

    @classmethod
    def parse(cls, value: "str | Polarization") -> "Polarization":
        return value if isinstance(value, cls) else cls(str(value).upper())


def _frozen(array: ArrayLike, dtype=np.complex128) -> NDArray:
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class RadiationPattern:
    """Complex gains of one element on an ``(M+1) x 2N`` zenith/azimuth grid.

    Rows follow zenith ``r*pi/M`` and columns azimuth ``c*pi/N``. Pole rows are
    kept per azimuth exactly as measured. The array is copied and made
    read-only on construction. Non-finite entries are allowed here so that
    imported measurements can be diagnosed with :func:`validate`.
    """

    grid: AngularGrid
    data: NDArray[np.complex128]
    frequency: float = 0.0
    polarization: Polarization = Polarization.V
    element_id: int = 0

    def __post_init__(self):
        data = _frozen(self.data)
        if data.shape != self.grid.shape:
            raise ValueError(f"pattern shape {data.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "polarization", Polarization.parse(self.polarization))
        object.__setattr__(self, "frequency", float(self.frequency))
        object.__setattr__(self, "element_id", int(self.element_id))

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def with_data(self, data: ArrayLike) -> "RadiationPattern":
        return RadiationPattern(self.grid, data, self.frequency, self.polarization, self.element_id)


@dataclass(frozen=True)
class ExtendedPattern:
    """Pattern continued over zenith ``[0, 2*pi)``, shape ``2M x 2N``."""

    grid: AngularGrid
    data: NDArray[np.complex128]

    def __post_init__(self):
        data = _frozen(self.data)
        if data.shape != self.grid.extended_shape:
            raise ValueError(f"extended shape {data.shape} does not match {self.grid.extended_shape}")
        object.__setattr__(self, "data", data)


def extend_array(A: NDArray) -> NDArray:
    """Extend an ``(M+1, 2N)`` array to ``(2M, 2N)`` along zenith.

    Rows ``M+1 .. 2M-1`` are rows ``M-1 .. 1`` of ``A`` with the columns rotated
    by ``N`` (half a turn in azimuth). Works on stacked arrays ``(..., M+1, 2N)``.
    """
    M = A.shape[-2] - 1
    N = A.shape[-1] // 2
    lower = np.roll(A[..., M - 1:0:-1, :], -N, axis=-1)
    return np.concatenate([A, lower], axis=-2)


def extend(pattern: RadiationPattern) -> ExtendedPattern:
    """Full-sphere extension of a measured pattern (pure copy, no arithmetic)."""
    return ExtendedPattern(pattern.grid, extend_array(pattern.data))


def check_factors(grid: AngularGrid, zenith_factor: int, azimuth_factor: int) -> None:
    for name, factor, half in (("zenith", zenith_factor, grid.M), ("azimuth", azimuth_factor, grid.N)):
        if int(factor) != factor or factor < 1 or half % factor:
            raise NonDivisibleFactor(f"{name} factor {factor} does not divide {half}")
        if half // factor < 2:
            raise NonDivisibleFactor(f"{name} factor {factor} leaves fewer than 2 samples per half turn")


def subsample(pattern: RadiationPattern, zenith_factor: int, azimuth_factor: int) -> RadiationPattern:
    """Keep every ``zenith_factor``-th row and ``azimuth_factor``-th column.

    The decimation is anchored at ``(theta, phi) = (0, 0)``; no interpolation.

    Raises
    ------
    NonDivisibleFactor
        If a factor does not divide ``M`` or ``N`` respectively.
    """
    check_factors(pattern.grid, zenith_factor, azimuth_factor)
    grid = pattern.grid.subgrid(zenith_factor, azimuth_factor)
    return RadiationPattern(
        grid,
        pattern.data[::zenith_factor, ::azimuth_factor],
        pattern.frequency,
        pattern.polarization,
        pattern.element_id,
    )


def admissible_steps(grid: AngularGrid) -> list[float]:
    """Angle steps in degrees reachable by subsampling ``grid`` (zenith axis)."""
    base = 180.0 / grid.M
    return [base * f for f in range(1, grid.M + 1) if grid.M % f == 0 and grid.M // f >= 2]


def step_to_factors(grid: AngularGrid, step_deg: float) -> tuple[int, int]:
    """Translate an angle step in degrees into integer ``(zenith, azimuth)`` factors."""
    out = []
    for base in (180.0 / grid.M, 180.0 / grid.N):
        ratio = step_deg / base
        factor = int(round(ratio))
        if factor < 1 or abs(ratio - factor) > 1e-9:
            raise NonDivisibleFactor(
                f"step {step_deg} deg is not a multiple of the {base:g} deg grid step; "
                f"admissible steps: {_fmt_steps(admissible_steps(grid))}"
            )
        out.append(factor)
    try:
        check_factors(grid, *out)
    except NonDivisibleFactor as exc:
        raise NonDivisibleFactor(f"{exc}; admissible steps: {_fmt_steps(admissible_steps(grid))}") from None
    return out[0], out[1]


def _fmt_steps(steps: Sequence[float]) -> str:
    return "{" + ",".join(f"{s:g}" for s in steps) + "}"


@dataclass
class PatternSet:
    """Patterns of ``P`` elements at ``S`` frequencies and one or two polarizations.

    ``data`` has shape ``(P, S, n_pol, M+1, 2N)`` and may be a read-only memmap.
    ``present`` marks which ``(element, frequency, polarization)`` cells hold
    measurements; absent cells are NaN.
    """

    grid: AngularGrid
    frequencies: NDArray[np.float64]
    element_ids: list[int]
    polarizations: list[Polarization]
    data: NDArray[np.complex128]
    present: NDArray[np.bool_] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.element_ids = [int(e) for e in self.element_ids]
        self.polarizations = [Polarization.parse(p) for p in self.polarizations]
        expected = (len(self.element_ids), len(self.frequencies), len(self.polarizations)) + self.grid.shape
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} does not match {expected}")
        if self.present is None:
            self.present = np.ones(expected[:3], dtype=bool)

    @property
    def n_elements(self) -> int:
        return len(self.element_ids)

    @property
    def n_frequencies(self) -> int:
        return len(self.frequencies)

    @property
    def center_frequency(self) -> float:
        return float(self.frequencies[self.center_index])

    @property
    def center_index(self) -> int:
        return (len(self.frequencies) - 1) // 2

    def element_index(self, element_id: int) -> int:
        try:
            return self.element_ids.index(int(element_id))
        except ValueError:
            raise KeyError(f"element {element_id} not in set") from None

    def frequency_index(self, frequency: float) -> int:
        idx = int(np.argmin(np.abs(self.frequencies - frequency)))
        if not np.isclose(self.frequencies[idx], frequency, rtol=1e-12, atol=1e-3):
            raise KeyError(f"frequency {frequency} Hz not in set")
        return idx

    def polarization_index(self, polarization) -> int:
        pol = Polarization.parse(polarization)
        try:
            return self.polarizations.index(pol)
        except ValueError:
            raise KeyError(f"polarization {pol.value} not in set") from None

    def sweep(self, element_id: int, polarization=Polarization.V) -> NDArray[np.complex128]:
        """All frequencies for one element, shape ``(S, M+1, 2N)``."""
        return self.data[self.element_index(element_id), :, self.polarization_index(polarization)]

    def pattern(self, element_id: int, frequency: float, polarization=Polarization.V) -> RadiationPattern:
        p = self.element_index(element_id)
        s = self.frequency_index(frequency)
        q = self.polarization_index(polarization)
        return RadiationPattern(self.grid, self.data[p, s, q], self.frequencies[s], self.polarizations[q], element_id)

    def select(self, element_ids: Iterable[int]) -> "PatternSet":
        idx = [self.element_index(e) for e in element_ids]
        return PatternSet(
            self.grid, self.frequencies, [self.element_ids[i] for i in idx], self.polarizations,
            np.asarray(self.data[idx]), self.present[idx], dict(self.meta),
        )

    @classmethod
    def from_patterns(cls, patterns: Sequence[RadiationPattern]) -> "PatternSet":
        """Stack individual patterns; missing cells become NaN with ``present=False``."""
        if not patterns:
            raise ValueError("no patterns given")
        grids = {p.grid for p in patterns}
        if len(grids) > 1:
            raise ValueError(f"patterns use different grids: {sorted((g.M, g.N) for g in grids)}")
        grid = patterns[0].grid
        elements = sorted({p.element_id for p in patterns})
        freqs = sorted({p.frequency for p in patterns})
        pols = sorted({p.polarization for p in patterns}, key=lambda x: x.value)
        data = np.full((len(elements), len(freqs), len(pols)) + grid.shape, np.nan + 0j)
        present = np.zeros(data.shape[:3], dtype=bool)
        for p in patterns:
            key = (elements.index(p.element_id), freqs.index(p.frequency), pols.index(p.polarization))
            if present[key]:
                raise ValueError(f"duplicate pattern for element {p.element_id}, "
                                 f"{p.frequency} Hz, {p.polarization.value}")
            data[key] = p.data
            present[key] = True
        return cls(grid, np.array(freqs), elements, pols, data, present)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    element_id: int | None = None
    frequency: float | None = None
    polarization: str | None = None
    row: int | None = None
    col: int | None = None


def _frequency_diagnostics(freqs: NDArray) -> list[Diagnostic]:
    out = []
    if len(freqs) < 2:
        return out
    steps = np.diff(freqs)
    if np.any(steps <= 0):
        out.append(Diagnostic("frequency-order", "frequencies are not strictly increasing"))
    elif np.max(np.abs(steps - steps.mean())) > 1e-6 * steps.mean():
        out.append(Diagnostic(
            "non-uniform-spacing",
            f"frequency steps range from {steps.min():.6g} to {steps.max():.6g} Hz",
        ))
    return out


def validate(obj: "PatternSet | Sequence[RadiationPattern]") -> list[Diagnostic]:
    """Collect problems with a pattern set without raising.

    Checks grid consistency, missing ``(element, frequency, polarization)``
    cells, non-finite entries and non-uniform frequency spacing. An empty
    list means the set is usable.
    """
    if not isinstance(obj, PatternSet):
        patterns = list(obj)
        grids = sorted({(p.grid.M, p.grid.N) for p in patterns})
        if len(grids) > 1:
            return [Diagnostic("grid-mismatch", f"patterns use different grids (M, N): {grids}")]
        try:
            obj = PatternSet.from_patterns(patterns)
        except ValueError as exc:
            return [Diagnostic("duplicate", str(exc))]

    diags = _frequency_diagnostics(obj.frequencies)
    for p, s, q in zip(*np.nonzero(~obj.present)):
        diags.append(Diagnostic(
            "missing", f"no pattern for element {obj.element_ids[p]} at {obj.frequencies[s]:.6g} Hz "
            f"({obj.polarizations[q].value})",
            obj.element_ids[p], float(obj.frequencies[s]), obj.polarizations[q].value,
        ))
    for p in range(obj.n_elements):
        block = np.asarray(obj.data[p])
        bad = ~np.isfinite(block)
        bad &= obj.present[p][:, :, None, None]
        for s, q, r, c in zip(*np.nonzero(bad)):
            diags.append(Diagnostic(
                "non-finite",
                f"element {obj.element_ids[p]}, {obj.frequencies[s]:.6g} Hz, "
                f"{obj.polarizations[q].value}: non-finite value at row {r}, col {c}",
                obj.element_ids[p], float(obj.frequencies[s]), obj.polarizations[q].value, int(r), int(c),
            ))
    return diags
