"""
From a measured pattern to its EADF
===================================

A chamber samples an element on an equiangular grid: zenith ``0..pi`` in
``M`` steps and azimuth ``0..2 pi`` in ``2N`` steps. Continuing the zenith
axis through the poles turns the sphere into a torus, where a 2D DFT gives
the effective aperture distribution function (EADF). The EADF is an exact
interpolator of the samples and a compact model of the element.
"""

# %%
import numpy as np

from eadf import AngularGrid, RadiationPattern, extend, forward, reconstruct
from eadf.metrics import central_power_fraction, eadf_power_spectrum
from eadf.synth import ElementSpec, PatternModel, sample_a0

# %%
# A patch-like element looking along +x, sampled every 3 degrees.
grid = AngularGrid(60, 60)
patch = sample_a0(ElementSpec(model=PatternModel.PATCH, order=2.0), grid, frequency=28.5e9)
print("pattern matrix", patch.data.shape, "peak", np.abs(patch.data).max())

# %%
# The extension appends rows M-1..1 with the azimuth rotated by half a turn,
# so that row M+r describes the direction (2 pi - theta, phi + pi).
ext = extend(patch)
r, c = 20, 7
print("C[M+r, c] == C[M-r, c+N]:", ext.data[grid.M + r, c] == ext.data[grid.M - r, (c + grid.N) % (2 * grid.N)])

# %%
# The spectrum is DC-centred with integer frequencies -M..M-1 and -N..N-1.
q = forward(ext)
spec_db = eadf_power_spectrum(q)
print("spectrum shape", q.data.shape, "frequencies", q.theta_freqs[0], "..", q.theta_freqs[-1])
print(f"share of power in the central quarter: {central_power_fraction(q):.5f}")
print("bins within 40 dB of the peak:", int(np.sum(spec_db > -40)), "of", spec_db.size)

# %%
# Reconstruction returns the samples exactly and interpolates in between.
theta, phi = grid.mesh()
print("max error on the grid:", np.max(np.abs(reconstruct(q, theta, phi) - patch.data)))
t, p = np.deg2rad(91.3), np.deg2rad(4.1)
print("response at (91.3, 4.1) deg:", complex(reconstruct(q, t, p)))
