"""
Containers and the command line
===============================

Measurements and models live in a JSON manifest next to a raw little-endian
complex128 file, so other tools can read them without this package. The
``eadf`` command wraps the same steps; this script drives it in-process.
"""

# %%
import json
import tempfile
from pathlib import Path

import numpy as np

from eadf.cli import main
from eadf.io import read_model, read_pattern_set

work = Path(tempfile.mkdtemp())
spec = work / "scenario.toml"
spec.write_text("""
[chamber]
M = 30
N = 30
snr_db = 60.0
seed = 2024
[chamber.frequencies]
start_hz = 27.0e9
stop_hz = 30.0e9
count = 61
[[row]]
count = 4
pitch_m = 0.006
axis = "y"
center_m = [0.0, 0.0, 0.2]
model = "patch"
delta_tau_s = 5e-9
""")

# %%
main(["simulate", "--spec", str(spec), "--out", str(work / "set.json")])
main(["validate", "--input", str(work / "set.json")])
pset = read_pattern_set(work / "set.json")
print("memory-mapped data:", type(pset.data).__name__, pset.data.shape)

# %%
main(["characterize", "--input", str(work / "set.json"), "--out", str(work / "model"), "--step", "12"])
model = read_model(work / "model" / "model.json")
print("phase centers (mm):\n", np.round(model.phase_centers * 1e3, 3))

# %%
main(["evaluate", "--truth", str(work / "set.json"), "--out", str(work / "eval"),
      "--steps", "12,30", "--conventional-steps", "12"])
summary = json.loads((work / "eval" / "cdf_enhanced_12deg.json").read_text())
print("CDF points at -40/-30/-20 dB:", [p for b, p in summary["cdf"] if b in (-40.0, -30.0, -20.0)])

# %%
main(["budget", "--model", str(work / "model" / "model.json")])
print("outputs in", work)
