"""Polarimetric array response assembled from per-element EADFs."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ModeMismatch
from .geometry import SPEED_OF_LIGHT, AngularGrid, unit_vector
from .pattern import Polarization
from .transform import Eadf, reconstruct, reconstruct_grid

POLARIZATION_ORDER = (Polarization.H, Polarization.V)


class Mode(str, enum.Enum):
    CONVENTIONAL = "conventional"
    ENHANCED = "enhanced"


@dataclass(frozen=True)
class ElementModel:
    element_id: int
    eadfs: dict[Polarization, Eadf]
    phase_center: NDArray[np.float64] | None = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        # None marks an unknown phase center
        pc = np.full(3, np.nan) if self.phase_center is None else np.array(self.phase_center, dtype=float)
        pc = pc.reshape(3)
        pc.flags.writeable = False
        object.__setattr__(self, "phase_center", pc)
        object.__setattr__(self, "eadfs", {Polarization.parse(k): v for k, v in self.eadfs.items()})


@dataclass(frozen=True)
class ArrayModel:
    """EADFs of all elements at one frequency.

    In enhanced mode each EADF describes the phase-compensated pattern and the
    element's phase factor ``exp(j 2 pi u.d / lambda)`` is applied on evaluation.
    ``grid`` is the grid the EADFs were built on.
    """

    grid: AngularGrid
    frequency: float
    mode: Mode
    elements: tuple[ElementModel, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            for q in el.eadfs.values():
                if q.grid != self.grid:
                    raise ValueError(f"element {el.element_id} EADF grid {q.grid} differs from model grid")
            if self.mode is Mode.ENHANCED and not np.all(np.isfinite(el.phase_center)):
                raise ModeMismatch(f"enhanced model lacks a finite phase center for element {el.element_id}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def element_ids(self) -> list[int]:
        return [el.element_id for el in self.elements]

    @property
    def phase_centers(self) -> NDArray[np.float64]:
        return np.array([el.phase_center for el in self.elements]).reshape(-1, 3)

    def element(self, element_id: int) -> ElementModel:
        for el in self.elements:
            if el.element_id == element_id:
                return el
        raise KeyError(f"element {element_id} not in model")

    def _beta(self, theta, phi, el: ElementModel):
        if self.mode is Mode.CONVENTIONAL:
            return 1.0
        proj = unit_vector(theta, phi) @ el.phase_center
        return np.exp(2j * np.pi * proj / self.wavelength)

    def element_response(self, element_id: int, polarization, theta: ArrayLike, phi: ArrayLike) -> NDArray:
        """Response of one element and polarization at arbitrary directions."""
        el = self.element(element_id)
        q = el.eadfs[Polarization.parse(polarization)]
        return reconstruct(q, theta, phi) * self._beta(theta, phi, el)

    def element_response_grid(self, element_id: int, polarization, grid: AngularGrid) -> NDArray:
        """Response of one element evaluated on every direction of ``grid``."""
        el = self.element(element_id)
        q = el.eadfs[Polarization.parse(polarization)]
        theta, phi = grid.mesh()
        return reconstruct_grid(q, grid.theta, grid.phi) * self._beta(theta, phi, el)


def array_response(model: ArrayModel, theta: ArrayLike, phi: ArrayLike) -> NDArray[np.complex128]:
    """Polarimetric array response ``G``.

    Returns an array of shape ``broadcast(theta, phi).shape + (P, 2)``; the last
    axis holds the H and V responses. A polarization that was not
    characterised is NaN. Enhanced models scale both polarizations of an
    element by the same phase factor.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    out = np.full(theta.shape + (len(model.elements), 2), np.nan + 0j)
    for p, el in enumerate(model.elements):
        beta = model._beta(theta, phi, el)
        for col, pol in enumerate(POLARIZATION_ORDER):
            if pol in el.eadfs:
                out[..., p, col] = reconstruct(el.eadfs[pol], theta, phi) * beta
    return out
