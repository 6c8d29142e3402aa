"""Synthetic anechoic-chamber measurements with known ground truth.

Element patterns are frequency independent, so the measured response of
element ``p`` at frequency ``f`` is

    a0(theta, phi) * exp(j 2 pi u.d / lambda) * exp(-j 2 pi f dtau) + noise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import BandLimitViolation
from .geometry import SPEED_OF_LIGHT, AngularGrid, projection, unit_vector
from .pattern import PatternSet, Polarization, RadiationPattern


class PatternModel(str, enum.Enum):
    OMNI = "omni"
    PATCH = "patch"
    BANDLIMITED = "bandlimited"


@dataclass(frozen=True)
class ElementSpec:
    """One simulated element.

    ``position`` is the true phase center in metres. Patch elements use
    ``order`` and ``boresight`` (zenith, azimuth in radians); band-limited
    elements draw a random spectrum with maximum orders ``k_theta`` and
    ``k_phi`` from ``seed``.
    """

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    model: PatternModel = PatternModel.OMNI
    delta_tau: float = 0.0
    order: float = 2.0
    boresight: tuple[float, float] = (np.pi / 2, 0.0)
    back_lobe_db: float = -30.0
    k_theta: int = 8
    k_phi: int = 8
    seed: int = 0
    element_id: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", PatternModel(self.model))
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "boresight", tuple(float(v) for v in self.boresight))


@dataclass(frozen=True)
class ChamberSpec:
    elements: tuple[ElementSpec, ...]
    grid: AngularGrid
    frequencies: NDArray[np.float64]
    snr_db: float | None = None
    rng_seed: int = 0
    polarizations: tuple[Polarization, ...] = (Polarization.V,)

    def __post_init__(self):
        freqs = np.array(self.frequencies, dtype=float)
        freqs.flags.writeable = False
        steps = np.diff(freqs)
        if freqs.size < 1 or np.any(steps <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if steps.size and np.max(np.abs(steps - steps.mean())) > 1e-6 * steps.mean():
            raise ValueError("frequencies must be uniformly spaced")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "polarizations", tuple(Polarization.parse(p) for p in self.polarizations))

    @property
    def element_ids(self) -> list[int]:
        return [i if el.element_id is None else el.element_id for i, el in enumerate(self.elements)]

    @property
    def positions(self) -> NDArray[np.float64]:
        return np.array([el.position for el in self.elements], dtype=float).reshape(-1, 3)


def linear_row(
    count: int,
    pitch: float,
    center: Sequence[float] = (0.0, 0.0, 0.2),
    axis: int = 1,
    **element_kwargs,
) -> list[ElementSpec]:
    """Elements spaced ``pitch`` metres along one axis, centred on ``center``.

    Element ``i`` gets id ``i`` and seed ``seed + i``.
    """
    seed = element_kwargs.pop("seed", 0)
    out = []
    for i in range(count):
        pos = np.array(center, dtype=float)
        pos[axis] += (i - (count - 1) / 2) * pitch
        out.append(ElementSpec(position=tuple(pos), element_id=i, seed=seed + i, **element_kwargs))
    return out


def bandlimited_coefficients(spec: ElementSpec, polarization_index: int = 0) -> NDArray[np.complex128]:
    """Seeded Fourier coefficients ``c[kappa, nu]``, shape ``(2K_t+1, 2K_p+1)``.

    The coefficients obey ``c[-kappa, nu] = (-1)^nu c[kappa, nu]`` so that the
    series is unchanged by ``(theta, phi) -> (2 pi - theta, phi + pi)``; the
    extended pattern is then exactly the series sampled on ``[0, 2 pi)``.
    """
    kt, kp = spec.k_theta, spec.k_phi
    rng = np.random.default_rng([spec.seed, polarization_index])
    c = rng.standard_normal((2 * kt + 1, 2 * kp + 1)) + 1j * rng.standard_normal((2 * kt + 1, 2 * kp + 1))
    sign = (-1.0) ** np.arange(-kp, kp + 1)
    c = 0.5 * (c + sign * c[::-1, :])
    return c / np.sqrt(np.sum(np.abs(c) ** 2))


def evaluate_a0(spec: ElementSpec, theta: ArrayLike, phi: ArrayLike, polarization_index: int = 0) -> NDArray:
    """Aligned (offset-free) element response at arbitrary directions."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    if spec.model is PatternModel.OMNI:
        return np.ones(theta.shape, dtype=np.complex128)
    if spec.model is PatternModel.PATCH:
        cos_off = unit_vector(theta, phi) @ unit_vector(*spec.boresight)
        lobe = np.abs(cos_off) ** spec.order
        back = 10.0 ** (spec.back_lobe_db / 20.0)
        return np.where(cos_off >= 0, lobe, back * lobe).astype(np.complex128)
    c = bandlimited_coefficients(spec, polarization_index)
    kt = np.arange(-spec.k_theta, spec.k_theta + 1)
    kp = np.arange(-spec.k_phi, spec.k_phi + 1)
    et = np.exp(1j * np.multiply.outer(theta, kt))
    ep = np.exp(1j * np.multiply.outer(phi, kp))
    return np.einsum("...k,kl,...l->...", et, c, ep)


def sample_a0(
    spec: ElementSpec,
    grid: AngularGrid,
    frequency: float = 0.0,
    polarization=Polarization.V,
    element_id: int = 0,
    polarization_index: int = 0,
) -> RadiationPattern:
    """Aligned element pattern sampled on ``grid``.

    Omni elements are 1 everywhere. Patch elements follow ``cos^q`` of the
    angle from boresight on the front hemisphere and a mirrored copy scaled to
    ``back_lobe_db`` behind it. Band-limited elements evaluate their seeded
    series.

    Raises
    ------
    BandLimitViolation
        If a band-limited element has ``k_theta >= M`` or ``k_phi >= N``.
    """
    if spec.model is PatternModel.BANDLIMITED and (spec.k_theta >= grid.M or spec.k_phi >= grid.N):
        raise BandLimitViolation(
            f"orders ({spec.k_theta}, {spec.k_phi}) need M > {spec.k_theta} and N > {spec.k_phi}, "
            f"grid has ({grid.M}, {grid.N})"
        )
    theta, phi = grid.mesh()
    data = evaluate_a0(spec, theta, phi, polarization_index)
    return RadiationPattern(grid, data, frequency, polarization, element_id)


def offset_phase(theta, phi, d: ArrayLike, wavelength: float) -> NDArray[np.complex128]:
    return np.exp(2j * np.pi * (unit_vector(theta, phi) @ np.asarray(d, dtype=float)) / wavelength)


def apply_offset(a0: RadiationPattern, d: ArrayLike, wavelength: float) -> RadiationPattern:
    """Pattern measured when the phase center sits at ``d`` instead of the origin."""
    return a0.with_data(a0.data * np.exp(2j * np.pi * projection(a0.grid, d) / wavelength))


def noise_sigma(peak_power: float, snr_db: float | None) -> float:
    """Per-entry noise standard deviation for an SNR referenced to peak power."""
    if snr_db is None:
        return 0.0
    return float(np.sqrt(peak_power / 10.0 ** (snr_db / 10.0)))


def _cell_rng(chamber: ChamberSpec, p: int, s: int) -> np.random.Generator:
    # counter-based seeding keeps every (element, frequency) cell independent of order
    return np.random.default_rng([chamber.rng_seed, p, s])


def simulate_element(chamber: ChamberSpec, index: int) -> NDArray[np.complex128]:
    """Measurements of element ``index``, shape ``(S, n_pol, M+1, 2N)``."""
    spec = chamber.elements[index]
    grid = chamber.grid
    theta, phi = grid.mesh()
    proj = projection(grid, spec.position)
    a0 = np.stack([evaluate_a0(spec, theta, phi, q) for q in range(len(chamber.polarizations))])
    sigma = noise_sigma(float(np.max(np.abs(a0) ** 2)), chamber.snr_db)
    out = np.empty((chamber.frequencies.size, len(chamber.polarizations)) + grid.shape, dtype=np.complex128)
    for s, f in enumerate(chamber.frequencies):
        phase = np.exp(2j * np.pi * proj * (f / SPEED_OF_LIGHT)) * np.exp(-2j * np.pi * f * spec.delta_tau)
        out[s] = a0 * phase
        if sigma > 0:
            rng = _cell_rng(chamber, index, s)
            shape = out[s].shape
            out[s] += (sigma / np.sqrt(2)) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return out


def simulate(chamber: ChamberSpec, elements: Sequence[int] | None = None) -> PatternSet:
    """Full measurement set for the chamber (or a subset of element indices)."""
    indices = range(len(chamber.elements)) if elements is None else list(elements)
    ids = chamber.element_ids
    data = np.stack([simulate_element(chamber, i) for i in indices])
    return PatternSet(
        chamber.grid, chamber.frequencies, [ids[i] for i in indices], list(chamber.polarizations), data,
        meta={"snr_db": chamber.snr_db, "rng_seed": chamber.rng_seed},
    )


def true_response(
    chamber: ChamberSpec,
    index: int,
    frequency: float,
    theta: ArrayLike,
    phi: ArrayLike,
    polarization_index: int = 0,
) -> NDArray[np.complex128]:
    """Noiseless response of element ``index`` at arbitrary directions."""
    spec = chamber.elements[index]
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    a0 = evaluate_a0(spec, theta, phi, polarization_index)
    return (a0 * offset_phase(theta, phi, spec.position, SPEED_OF_LIGHT / frequency)
            * np.exp(-2j * np.pi * frequency * spec.delta_tau))


def reference_scenario(
    M: int = 120,
    N: int | None = None,
    snr_db: float | None = 60.0,
    n_frequencies: int = 301,
    model: PatternModel = PatternModel.PATCH,
    rng_seed: int = 2024,
    **element_kwargs,
) -> ChamberSpec:
    """Twelve elements on a 6 mm row whose centre sits 0.2 m up the z axis.

    Frequencies span 27-30 GHz. Patch elements look along +x.
    """
    N = M if N is None else N
    kwargs = {"model": model, "delta_tau": 5e-9, "order": 2.0}
    kwargs.update(element_kwargs)
    elements = linear_row(12, 0.006, center=(0.0, 0.0, 0.2), axis=1, **kwargs)
    return ChamberSpec(
        elements=tuple(elements),
        grid=AngularGrid(M, N),
        frequencies=np.linspace(27e9, 30e9, n_frequencies),
        snr_db=snr_db,
        rng_seed=rng_seed,
    )
