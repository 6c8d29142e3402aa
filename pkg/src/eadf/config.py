"""Chamber configuration files (TOML).

Schema::

    [chamber]
    M = 120                  # zenith half-resolution (step = 180/M deg)
    N = 120                  # azimuth half-resolution
    snr_db = 60.0            # or "none" for noiseless data
    seed = 2024
    polarizations = ["V"]

    [chamber.frequencies]    # either start/stop/count or values_hz
    start_hz = 27.0e9
    stop_hz = 30.0e9
    count = 301

    [[row]]                  # uniformly spaced elements
    count = 12
    pitch_m = 0.006
    axis = "y"
    center_m = [0.0, 0.0, 0.2]
    model = "patch"          # omni | patch | bandlimited
    order = 2.0
    boresight_deg = [90.0, 0.0]
    back_lobe_db = -30.0
    delta_tau_s = 5e-9

    [[element]]              # individual elements
    position_m = [0.0, 0.0, 0.0]
    model = "bandlimited"
    k_theta = 8
    k_phi = 8
    seed = 1

Element ids are assigned in file order (rows first, then single elements)
unless an ``id`` is given.
"""
from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import EadfError
from .geometry import AngularGrid
from .synth import ChamberSpec, ElementSpec, PatternModel

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

BUNDLED = ("paper_sect5.toml",)
AXES = {"x": 0, "y": 1, "z": 2}


class ConfigError(EadfError, ValueError):
    """Invalid chamber configuration."""


def resolve(path: "str | Path") -> Path:
    """A local file, or a bundled configuration referred to by name."""
    path = Path(path)
    if path.exists():
        return path
    if path.name in BUNDLED or f"{path.name}.toml" in BUNDLED:
        name = path.name if path.name.endswith(".toml") else f"{path.name}.toml"
        return Path(str(resources.files("eadf").joinpath("data", name)))
    raise FileNotFoundError(f"no configuration file {path}")


def _get(table: dict, key: str, where: str, kind=None, default=...):
    if key not in table:
        if default is ...:
            raise ConfigError(f"{where}: missing key '{key}'")
        return default
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {_kind_name(kind)}, got {type(value).__name__} {value!r}")
    return value


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _vec(table, key, where, n, default=...):
    value = _get(table, key, where, list, default)
    if value is default:
        return value
    if len(value) != n or not all(isinstance(v, (int, float)) for v in value):
        raise ConfigError(f"{where}.{key}: expected {n} numbers, got {value!r}")
    return tuple(float(v) for v in value)


def _element_kwargs(table: dict, where: str) -> dict:
    model = _get(table, "model", where, str, "omni")
    try:
        model = PatternModel(model)
    except ValueError:
        raise ConfigError(f"{where}.model: unknown pattern model {model!r}") from None
    kwargs = {"model": model, "delta_tau": float(_get(table, "delta_tau_s", where, (int, float), 0.0))}
    if model is PatternModel.PATCH:
        kwargs["order"] = float(_get(table, "order", where, (int, float), 2.0))
        bore = _vec(table, "boresight_deg", where, 2, (90.0, 0.0))
        kwargs["boresight"] = tuple(np.deg2rad(bore))
        kwargs["back_lobe_db"] = float(_get(table, "back_lobe_db", where, (int, float), -30.0))
    elif model is PatternModel.BANDLIMITED:
        kwargs["k_theta"] = int(_get(table, "k_theta", where, int, 8))
        kwargs["k_phi"] = int(_get(table, "k_phi", where, int, 8))
        kwargs["seed"] = int(_get(table, "seed", where, int, 0))
    return kwargs


def _frequencies(table: dict, where: str) -> np.ndarray:
    if "values_hz" in table:
        values = _get(table, "values_hz", where, list)
        return np.asarray(values, dtype=float)
    start = float(_get(table, "start_hz", where, (int, float)))
    stop = float(_get(table, "stop_hz", where, (int, float)))
    count = int(_get(table, "count", where, int))
    return np.linspace(start, stop, count)


def chamber_from_dict(cfg: dict, source: str = "<config>") -> ChamberSpec:
    chamber = _get(cfg, "chamber", source, dict)
    where = f"{source}: [chamber]"
    grid = AngularGrid(int(_get(chamber, "M", where, int)), int(_get(chamber, "N", where, int)))
    snr = _get(chamber, "snr_db", where, (int, float, str), None)
    if isinstance(snr, str):
        if snr.lower() != "none":
            raise ConfigError(f"{where}.snr_db: expected a number or \"none\", got {snr!r}")
        snr = None
    freqs = _frequencies(_get(chamber, "frequencies", where, dict), f"{where}.frequencies")

    elements: list[ElementSpec] = []
    for i, row in enumerate(cfg.get("row", [])):
        w = f"{source}: [[row]] #{i + 1}"
        count = int(_get(row, "count", w, int))
        pitch = float(_get(row, "pitch_m", w, (int, float)))
        axis = _get(row, "axis", w, str, "y")
        if axis not in AXES:
            raise ConfigError(f"{w}.axis: expected one of x, y, z, got {axis!r}")
        center = np.array(_vec(row, "center_m", w, 3, (0.0, 0.0, 0.0)))
        kwargs = _element_kwargs(row, w)
        base_seed = kwargs.pop("seed", 0)
        for k in range(count):
            pos = center.copy()
            pos[AXES[axis]] += (k - (count - 1) / 2) * pitch
            elements.append(ElementSpec(position=tuple(pos), element_id=len(elements),
                                        seed=base_seed + k, **kwargs))
    for i, el in enumerate(cfg.get("element", [])):
        w = f"{source}: [[element]] #{i + 1}"
        pos = _vec(el, "position_m", w, 3)
        eid = int(_get(el, "id", w, int, len(elements)))
        elements.append(ElementSpec(position=pos, element_id=eid, **_element_kwargs(el, w)))
    if not elements:
        raise ConfigError(f"{source}: no [[row]] or [[element]] entries")
    ids = [e.element_id for e in elements]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"{source}: duplicate element ids {ids}")
    try:
        return ChamberSpec(
            elements=tuple(elements),
            grid=grid,
            frequencies=freqs,
            snr_db=None if snr is None else float(snr),
            rng_seed=int(_get(chamber, "seed", where, int, 0)),
            polarizations=tuple(_get(chamber, "polarizations", where, list, ["V"])),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def load_chamber(path: "str | Path") -> ChamberSpec:
    """Read a chamber TOML file (or a bundled one by name)."""
    path = resolve(path)
    try:
        cfg = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return chamber_from_dict(cfg, str(path))
