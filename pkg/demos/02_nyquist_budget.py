"""
How far apart can the samples be?
=================================

A phase center displaced by ``d`` from the chamber origin multiplies the
pattern by ``exp(j 2 pi u.d / lambda)``. Its local spatial frequency is at
most ``|d|/lambda`` cycles per radian in zenith and ``|d_xy|/lambda`` in
azimuth, so Nyquist asks for steps below ``1/(2 f)``. An offset of 38
wavelengths needs zenith steps below 0.75 degrees. At 28.5 GHz a 20 cm
offset is 19 wavelengths, whose phase still spans 38 turns from pole to
pole. Sampling such elements every few degrees aliases.
"""

# %%
import numpy as np

from eadf import AngularGrid, SPEED_OF_LIGHT, max_spatial_freq
from eadf.array import ArrayModel, Mode
from eadf.metrics import rem_map
from eadf.phase_center import characterize_element
from eadf.synth import ChamberSpec, ElementSpec, simulate
from eadf.transform import array_budget

wavelength = SPEED_OF_LIGHT / 28.5e9

# %%
for label, d in [("on the origin", (0, 0, 0)), ("10 lambda up", (0, 0, 10 * wavelength)),
                 ("20 cm up", (0, 0, 0.2)), ("3-4-5 lambda", (3 * wavelength, 4 * wavelength, 0))]:
    b = max_spatial_freq(d, wavelength)
    print(f"{label:14s} f_theta={b.f_theta_max:6.2f} f_phi={b.f_phi_max:6.2f} cyc/rad "
          f"zenith step <= {b.max_zenith_step_deg:.4f} deg")

# %%
# The budget of an array is set by its worst element.
row = np.array([[0, y, 0.2] for y in np.arange(-5.5, 6) * 0.006])
print("12-element row:", array_budget(row, wavelength).as_dict())

# %%
# An omni element 10 wavelengths up, measured every 1.5 degrees. A
# conventional EADF built from every fourth sample (6 degrees) cannot follow
# the phase; compensating the known offset first removes the problem.
d = (0.0, 0.0, 10 * wavelength)
pset = simulate(ChamberSpec((ElementSpec(position=d),), AngularGrid(120, 120), [28.5e9]))
truth = pset.pattern(0, 28.5e9)
for mode, center in [(Mode.CONVENTIONAL, None), (Mode.ENHANCED, d)]:
    element = characterize_element(pset, 0, 28.5e9, center, factors=(4, 4))
    model = ArrayModel(pset.grid.subgrid(4, 4), 28.5e9, mode, [element])
    print(f"{mode.value:12s} median REM {rem_map(truth, model).median_db:8.2f} dB")
