"""Command-line driver: ``eadf simulate|characterize|evaluate|budget|validate``.

Angles are given in degrees on the command line. ``EADF_NUM_THREADS`` sets
the number of worker threads used across elements (default 1).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .array import ArrayModel, Mode
from .config import load_chamber
from .errors import EadfError
from .geometry import SPEED_OF_LIGHT
from .metrics import rem_map, summarize
from .pattern import step_to_factors, validate
from .phase_center import DEFAULT_THRESHOLD_DB, build_delay_map, characterize_element, fit_phase_center
from .synth import simulate_element
from .transform import array_budget, max_spatial_freq

log = logging.getLogger("eadf")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EADF_NUM_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _snr(value: str):
    return None if value.lower() == "none" else float(value)


def _floats(value: str) -> list[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def cmd_simulate(args) -> int:
    chamber = load_chamber(args.spec)
    if args.snr is not None:
        chamber = replace(chamber, snr_db=_snr(args.snr))
    if args.seed is not None:
        chamber = replace(chamber, rng_seed=args.seed)
    meta = {"snr_db": chamber.snr_db, "rng_seed": chamber.rng_seed,
            "positions_m": chamber.positions.tolist()}
    with io.PatternSetWriter(args.out, chamber.grid, chamber.frequencies, chamber.element_ids,
                             chamber.polarizations, meta) as writer:
        for p in range(len(chamber.elements)):
            writer.write_element(simulate_element(chamber, p))
    snr = "none" if chamber.snr_db is None else f"{chamber.snr_db:g} dB"
    print(f"wrote {args.out}: P={len(chamber.elements)} S={len(chamber.frequencies)} "
          f"grid M={chamber.grid.M} N={chamber.grid.N} ({180 / chamber.grid.M:g} deg) SNR={snr}")
    return 0


def _factors(grid, step):
    return (1, 1) if step is None else step_to_factors(grid, step)


def _estimate(pset, pol, threshold_db, out_dir: Path | None):
    def one(element_id):
        dmap = build_delay_map(pset, element_id, pol, threshold_db)
        if out_dir is not None:
            io.write_delay_map_csv(out_dir / "delay_maps" / f"element_{element_id}.csv", dmap)
        return fit_phase_center(dmap)
    return dict(zip(pset.element_ids, _map(one, pset.element_ids)))


def _build(pset, mode: Mode, frequency, factors, power_fraction, estimates):
    def one(element_id):
        pc = None if mode is Mode.CONVENTIONAL else estimates[element_id].d_hat
        return characterize_element(pset, element_id, frequency, pc, factors, power_fraction)
    elements = _map(one, pset.element_ids)
    meta = {}
    if estimates:
        meta["phase_center_estimates"] = {str(k): v.as_dict() for k, v in estimates.items()}
    return ArrayModel(pset.grid.subgrid(*factors), frequency, mode, elements, meta)


def cmd_characterize(args) -> int:
    pset = io.read_pattern_set(args.input)
    mode = Mode(args.mode)
    factors = _factors(pset.grid, args.step)
    frequency = pset.frequencies[pset.frequency_index(args.freq)] if args.freq else pset.center_frequency
    out = Path(args.out)
    pol = args.polarization or pset.polarizations[0]
    estimates = {}
    if mode is Mode.ENHANCED:
        estimates = _estimate(pset, pol, args.threshold_db, out)
        io.write_phase_centers_json(out / "phase_centers.json", estimates.values())
    model = _build(pset, mode, frequency, factors, args.power_fraction, estimates)
    io.write_model(out / "model.json", model)
    for el in model.elements:
        for p, q in el.eadfs.items():
            io.write_spectrum_csv(out / "spectra" / f"element_{el.element_id}_{p.value}.csv", q)
    print(f"wrote {out / 'model.json'}: mode={mode.value} P={len(model.elements)} "
          f"grid M={model.grid.M} N={model.grid.N} f={frequency:.6g} Hz")
    return 0


def _step_label(mode: Mode, step: float | None, grid) -> str:
    step = 180.0 / grid.M if step is None else step
    return f"{mode.value}_{step:g}deg"


def _evaluate_model(pset, model, args, label):
    region_all = args.region == "all"
    pol = args.polarization or pset.polarizations[0]
    reports = []
    for element_id in model.element_ids:
        truth = pset.pattern(element_id, model.frequency, pol)
        region = np.ones(truth.grid.shape, dtype=bool) if region_all else None
        reports.append(rem_map(truth, model, region=region, threshold_db=args.threshold_db, label=label))
    out = Path(args.out)
    io.write_rem_csv(out / f"rem_{label}.csv", reports)
    summary = summarize(reports, label)
    summary["per_element_median_db"] = {str(r.element_id): r.median_db for r in reports}
    io.write_json(out / f"cdf_{label}.json", summary)
    print(f"{label}: median REM {summary['median_db']:.2f} dB over {summary['n_directions']} directions")
    return summary


def cmd_evaluate(args) -> int:
    pset = io.read_pattern_set(args.truth)
    if args.model:
        model = io.read_model(args.model)
        if pset.grid.M % model.grid.M or pset.grid.N % model.grid.N:
            raise EadfError(f"model grid ({model.grid.M}, {model.grid.N}) is not a subgrid of the "
                            f"truth grid ({pset.grid.M}, {pset.grid.N})")
        try:
            pset.frequency_index(model.frequency)
        except KeyError:
            raise EadfError(f"model frequency {model.frequency} Hz is not in the truth set") from None
        step = 180.0 / model.grid.M
        _evaluate_model(pset, model, args, _step_label(model.mode, step, model.grid))
        return 0

    if not args.steps and not args.conventional_steps:
        raise EadfError("give --model, or --steps and/or --conventional-steps")
    frequency = pset.frequencies[pset.frequency_index(args.freq)] if args.freq else pset.center_frequency
    pol = args.polarization or pset.polarizations[0]
    runs = [(Mode(args.mode), s) for s in _floats(args.steps or "")]
    runs += [(Mode.CONVENTIONAL, s) for s in _floats(args.conventional_steps or "")]
    # resolve every step before any heavy work so bad steps fail fast
    factors = {step: _factors(pset.grid, step) for _, step in runs}
    estimates = {}
    if any(mode is Mode.ENHANCED for mode, _ in runs):
        estimates = _estimate(pset, pol, args.threshold_db, None)
    for mode, step in runs:
        model = _build(pset, mode, frequency, factors[step], args.power_fraction,
                       estimates if mode is Mode.ENHANCED else {})
        _evaluate_model(pset, model, args, _step_label(mode, step, pset.grid))
    return 0


def _fmt_step(rad: float) -> str:
    return "unbounded" if np.isinf(rad) else f"{rad:.6g} rad ({np.rad2deg(rad):.4f} deg)"


def cmd_budget(args) -> int:
    positions, ids, wavelength = [], [], None
    if args.model:
        model = io.read_model(args.model)
        positions = list(model.phase_centers)
        ids = model.element_ids
        wavelength = model.wavelength
    elif args.spec:
        chamber = load_chamber(args.spec)
        positions = list(chamber.positions)
        ids = chamber.element_ids
        wavelength = SPEED_OF_LIGHT / chamber.frequencies[(len(chamber.frequencies) - 1) // 2]
    for i, text in enumerate(args.position or []):
        values = _floats(text)
        if len(values) != 3:
            raise EadfError(f"--position expects x,y,z, got {text!r}")
        positions.append(np.array(values))
        ids.append(len(ids))
    if args.freq:
        wavelength = SPEED_OF_LIGHT / args.freq
    if args.wavelength:
        wavelength = args.wavelength
    if not positions:
        raise EadfError("no element positions: give --position, --spec or --model")
    if wavelength is None:
        raise EadfError("no wavelength: give --freq or --wavelength")
    if args.in_wavelengths:
        positions = [np.asarray(p) * wavelength for p in positions]

    report = {"wavelength_m": wavelength, "elements": []}
    for eid, d in zip(ids, positions):
        b = max_spatial_freq(d, wavelength)
        report["elements"].append({"id": int(eid), "position_m": [float(v) for v in d], **b.as_dict()})
        print(f"element {eid}: f_theta_max={b.f_theta_max:.6g} f_phi_max={b.f_phi_max:.6g} cyc/rad; "
              f"zenith step <= {_fmt_step(b.max_zenith_step)}, azimuth step <= {_fmt_step(b.max_azimuth_step)}")
    total = array_budget(np.array(positions), wavelength)
    report["array"] = total.as_dict()
    print(f"array: zenith step <= {_fmt_step(total.max_zenith_step)}, "
          f"azimuth step <= {_fmt_step(total.max_azimuth_step)}")
    if args.json:
        io.write_json(args.json, report)
    return 0


def cmd_validate(args) -> int:
    pset = io.read_pattern_set(args.input)
    diags = validate(pset)
    for d in diags:
        print(f"{d.kind}: {d.message}")
    if not diags:
        print(f"{args.input}: ok")
    return 1 if diags else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eadf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate chamber measurements")
    p.add_argument("--spec", required=True, help="chamber TOML file or bundled name (paper_sect5.toml)")
    p.add_argument("--out", required=True, help="output manifest path (.json)")
    p.add_argument("--snr", help="override SNR in dB, or 'none'")
    p.add_argument("--seed", type=int, help="override the noise seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("characterize", help="build a conventional or enhanced EADF model")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="enhanced")
    p.add_argument("--step", type=float, help="sampling step in degrees (multiple of the grid step)")
    p.add_argument("--freq", type=float, help="frequency in Hz (default: centre frequency)")
    p.add_argument("--threshold-db", type=float, default=DEFAULT_THRESHOLD_DB)
    p.add_argument("--power-fraction", type=float, default=1.0)
    p.add_argument("--polarization", help="polarization used for delay estimation")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("evaluate", help="REM of models against a measured set")
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", help="model manifest to evaluate")
    p.add_argument("--steps", help="comma-separated steps (deg) to build and evaluate")
    p.add_argument("--conventional-steps", help="comma-separated steps for conventional baselines")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="enhanced")
    p.add_argument("--freq", type=float)
    p.add_argument("--threshold-db", type=float, default=DEFAULT_THRESHOLD_DB)
    p.add_argument("--power-fraction", type=float, default=1.0)
    p.add_argument("--region", choices=["main", "all"], default="main",
                   help="directions entering the statistics")
    p.add_argument("--polarization")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("budget", help="Nyquist angle steps for phase-center offsets")
    p.add_argument("--position", action="append", help="x,y,z in metres (repeatable)")
    p.add_argument("--in-wavelengths", action="store_true", help="--position values are in wavelengths")
    p.add_argument("--spec", help="take positions from a chamber TOML")
    p.add_argument("--model", help="take phase centers and frequency from a model")
    p.add_argument("--freq", type=float)
    p.add_argument("--wavelength", type=float)
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("validate", help="check a pattern container")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (EadfError, FileNotFoundError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"eadf {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
