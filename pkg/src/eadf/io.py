"""On-disk formats: JSON manifest + raw little-endian complex128 data files.

Complex values are stored as interleaved float64 ``re, im`` pairs in
little-endian byte order (numpy dtype ``<c16``). See ``docs/formats.md``.
"""
from __future__ import annotations

import contextlib
import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .array import ArrayModel, ElementModel, Mode
from .errors import ContainerError
from .geometry import AngularGrid
from .metrics import RemReport, eadf_power_spectrum
from .pattern import PatternSet, Polarization
from .phase_center import DelayMap, PhaseCenterEstimate
from .transform import Eadf

FORMAT_VERSION = 1
SCALAR = "float64 interleaved re,im"
PATTERN_LAYOUT = "element-major then frequency, then polarization, then zenith row-major, then azimuth"
DTYPE = np.dtype("<c16")


@contextlib.contextmanager
def atomic_path(path: "str | os.PathLike") -> Iterator[Path]:
    """Yield a temporary sibling path that replaces ``path`` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_json(path, obj) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ContainerError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def data_path_for(manifest_path) -> Path:
    return Path(manifest_path).with_suffix(".bin")


class PatternSetWriter:
    """Write a pattern set element by element without holding it in memory.

    Use as a context manager; files appear atomically when the block exits
    without error.
    """

    def __init__(self, manifest_path, grid: AngularGrid, frequencies, element_ids, polarizations, meta=None):
        self.manifest_path = Path(manifest_path)
        self.data_path = data_path_for(manifest_path)
        self.grid = grid
        self.frequencies = [float(f) for f in frequencies]
        self.element_ids = [int(e) for e in element_ids]
        self.polarizations = [Polarization.parse(p).value for p in polarizations]
        self.meta = dict(meta or {})
        self.block_shape = (len(self.frequencies), len(self.polarizations)) + grid.shape
        self._written = 0

    def __enter__(self):
        self.data_path.parent.mkdir(parents=True, exist_ok=True)
        fd, self._tmp = tempfile.mkstemp(prefix=f".{self.data_path.name}.", dir=self.data_path.parent)
        self._fh = os.fdopen(fd, "wb")
        return self

    def write_element(self, block: np.ndarray) -> None:
        block = np.asarray(block)
        if block.shape != self.block_shape:
            raise ValueError(f"element block shape {block.shape}, expected {self.block_shape}")
        if self._written >= len(self.element_ids):
            raise ValueError("more element blocks than declared elements")
        self._fh.write(np.ascontiguousarray(block, dtype=DTYPE).tobytes())
        self._written += 1

    def __exit__(self, exc_type, exc, tb):
        self._fh.close()
        try:
            if exc_type is not None:
                return False
            if self._written != len(self.element_ids):
                raise ContainerError(f"wrote {self._written} of {len(self.element_ids)} element blocks")
            os.replace(self._tmp, self.data_path)
            write_json(self.manifest_path, self.manifest())
        finally:
            if os.path.exists(self._tmp):
                os.unlink(self._tmp)
        return False

    def manifest(self) -> dict:
        return {
            "format": "eadf-pattern-set",
            "version": FORMAT_VERSION,
            "M": self.grid.M,
            "N": self.grid.N,
            "frequencies_hz": self.frequencies,
            "elements": self.element_ids,
            "polarizations": self.polarizations,
            "data_file": self.data_path.name,
            "shape": [len(self.element_ids)] + list(self.block_shape),
            "layout": PATTERN_LAYOUT,
            "endianness": "little",
            "scalar": SCALAR,
            "meta": self.meta,
        }


def write_pattern_set(manifest_path, pset: PatternSet) -> None:
    meta = {k: v for k, v in pset.meta.items() if _jsonable(v)}
    if not pset.present.all():
        meta["present"] = pset.present.astype(int).tolist()
    with PatternSetWriter(manifest_path, pset.grid, pset.frequencies, pset.element_ids,
                          pset.polarizations, meta) as writer:
        for p in range(pset.n_elements):
            writer.write_element(pset.data[p])


def _jsonable(value) -> bool:
    try:
        json.dumps(value)
    except TypeError:
        return False
    return True


def read_pattern_set(manifest_path, mmap: bool = True) -> PatternSet:
    """Load a pattern set; the data are memory-mapped read-only by default."""
    manifest_path = Path(manifest_path)
    man = read_json(manifest_path)
    for key in ("M", "N", "frequencies_hz", "elements", "polarizations", "data_file"):
        if key not in man:
            raise ContainerError(f"{manifest_path}: manifest lacks '{key}'")
    if man.get("format", "eadf-pattern-set") != "eadf-pattern-set":
        raise ContainerError(f"{manifest_path}: not a pattern-set manifest ({man.get('format')})")
    if man.get("endianness", "little") != "little" or man.get("scalar", SCALAR) != SCALAR:
        raise ContainerError(f"{manifest_path}: unsupported scalar encoding")
    grid = AngularGrid(man["M"], man["N"])
    shape = (len(man["elements"]), len(man["frequencies_hz"]), len(man["polarizations"])) + grid.shape
    data_path = manifest_path.parent / man["data_file"]
    expected = int(np.prod(shape)) * DTYPE.itemsize
    actual = data_path.stat().st_size
    if actual != expected:
        raise ContainerError(f"{data_path}: {actual} bytes, expected {expected} for shape {shape}")
    if mmap:
        data = np.memmap(data_path, dtype=DTYPE, mode="r", shape=shape)
    else:
        data = np.fromfile(data_path, dtype=DTYPE).reshape(shape)
    meta = dict(man.get("meta", {}))
    present = meta.pop("present", None)
    present = None if present is None else np.asarray(present, dtype=bool)
    return PatternSet(grid, np.asarray(man["frequencies_hz"], dtype=float), man["elements"],
                      man["polarizations"], data, present, meta)


def write_model(manifest_path, model: ArrayModel) -> None:
    """Store an array model: per-element, per-polarization spectra plus phase centers."""
    manifest_path = Path(manifest_path)
    data_path = data_path_for(manifest_path)
    entries = []
    offset = 0
    with atomic_path(data_path) as tmp, open(tmp, "wb") as fh:
        for el in model.elements:
            spectra = {}
            for pol in sorted(el.eadfs, key=lambda p: p.value):
                q = el.eadfs[pol]
                fh.write(np.ascontiguousarray(q.data, dtype=DTYPE).tobytes())
                (t0, t1), (p0, p1) = q.window
                spectra[pol.value] = {
                    "offset": offset,
                    "shape": list(q.data.shape),
                    "theta_freqs": [t0, t1],
                    "phi_freqs": [p0, p1],
                }
                offset += q.data.size
            entries.append({
                "id": el.element_id,
                "phase_center_m": [float(v) for v in el.phase_center],
                "spectra": spectra,
            })
    write_json(manifest_path, {
        "format": "eadf-model",
        "version": FORMAT_VERSION,
        "mode": model.mode.value,
        "frequency_hz": float(model.frequency),
        "M": model.grid.M,
        "N": model.grid.N,
        "normalization": "1/(4MN) in forward transform",
        "data_file": data_path.name,
        "endianness": "little",
        "scalar": SCALAR,
        "elements": entries,
        "meta": {k: v for k, v in model.meta.items() if _jsonable(v)},
    })


def read_model(manifest_path) -> ArrayModel:
    manifest_path = Path(manifest_path)
    man = read_json(manifest_path)
    if man.get("format") != "eadf-model":
        raise ContainerError(f"{manifest_path}: not a model manifest")
    grid = AngularGrid(man["M"], man["N"])
    raw = np.fromfile(manifest_path.parent / man["data_file"], dtype=DTYPE)
    elements = []
    for entry in man["elements"]:
        eadfs = {}
        for pol, spec in entry["spectra"].items():
            size = int(np.prod(spec["shape"]))
            block = raw[spec["offset"]:spec["offset"] + size]
            if block.size != size:
                raise ContainerError(f"{manifest_path}: data file too short for element {entry['id']}")
            t0, t1 = spec["theta_freqs"]
            p0, p1 = spec["phi_freqs"]
            eadfs[pol] = Eadf(grid, block.reshape(spec["shape"]), np.arange(t0, t1 + 1), np.arange(p0, p1 + 1))
        pc = entry.get("phase_center_m")
        elements.append(ElementModel(entry["id"], eadfs, None if pc is None else pc))
    return ArrayModel(grid, man["frequency_hz"], Mode(man["mode"]), elements, man.get("meta", {}))


def _write_rows(path, header: list[str], rows: Iterable) -> None:
    with atomic_path(path) as tmp, open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _grid_rows(grid: AngularGrid):
    theta_deg = np.rad2deg(grid.theta)
    phi_deg = np.rad2deg(grid.phi)
    for r in range(grid.M + 1):
        for c in range(2 * grid.N):
            yield r, c, f"{theta_deg[r]:.6g}", f"{phi_deg[c]:.6g}"


def write_delay_map_csv(path, delay_map: DelayMap) -> None:
    def rows():
        for r, c, t, p in _grid_rows(delay_map.grid):
            d = delay_map.delays[r, c]
            yield t, p, (f"{d * 1e9:.12g}" if np.isfinite(d) else ""), int(delay_map.mask[r, c])
    _write_rows(path, ["theta_deg", "phi_deg", "delay_ns", "masked"], rows())


def write_phase_centers_json(path, estimates: Iterable[PhaseCenterEstimate]) -> None:
    write_json(path, {"version": FORMAT_VERSION, "elements": [e.as_dict() for e in estimates]})


def write_rem_csv(path, reports: "RemReport | Iterable[RemReport]") -> None:
    """Per-direction REM of one or more elements, one row per (element, direction)."""
    reports = [reports] if isinstance(reports, RemReport) else list(reports)

    def rows():
        for report in reports:
            for r, c, t, p in _grid_rows(report.grid):
                v = report.rem[r, c]
                if np.isfinite(v):
                    db = max(20 * np.log10(v), -300.0) if v > 0 else -300.0
                    yield report.element_id, t, p, f"{v:.12g}", f"{db:.6g}", int(report.mask[r, c])
                else:
                    yield report.element_id, t, p, "", "", 0
    _write_rows(path, ["element_id", "theta_deg", "phi_deg", "rem", "rem_db", "in_mask"], rows())


def write_spectrum_csv(path, q: Eadf) -> None:
    spec = eadf_power_spectrum(q)

    def rows():
        for i, kt in enumerate(q.theta_freqs):
            for j, kp in enumerate(q.phi_freqs):
                yield int(kt), int(kp), f"{spec[i, j]:.6g}"
    _write_rows(path, ["theta_freq", "phi_freq", "power_db"], rows())
