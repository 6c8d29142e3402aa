"""Conventional and enhanced EADF characterization of antenna arrays.

The effective aperture distribution function (EADF) of an element is the 2D
spatial-frequency spectrum of its full-sphere extended radiation pattern.
The enhanced variant removes the phase ramp of each element's phase-center
offset before the transform and restores it analytically on evaluation.
"""
from .array import ArrayModel, ElementModel, Mode, array_response
from .errors import (
    AllMasked,
    BandLimitViolation,
    DegenerateInput,
    EadfError,
    ModeMismatch,
    NonDivisibleFactor,
    RankDeficient,
    UndefinedAtZero,
)
from .geometry import SPEED_OF_LIGHT, AngularGrid, Direction, grid_directions, unit_vector
from .metrics import RemReport, eadf_power_spectrum, rem, rem_map
from .pattern import (
    ExtendedPattern,
    PatternSet,
    Polarization,
    RadiationPattern,
    extend,
    subsample,
    validate,
)
from .phase_center import (
    DelayMap,
    PhaseCenterEstimate,
    build_conventional_model,
    build_delay_map,
    build_enhanced_model,
    compensate,
    estimate_delay,
    fit_phase_center,
    main_coverage_mask,
)
from .transform import Eadf, SpatialFreqBudget, forward, max_spatial_freq, reconstruct, truncate

__version__ = "0.1.0"
