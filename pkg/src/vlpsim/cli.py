"""Command-line interface: experiment dispatch and single-shot estimation.

Subcommands: ``coverage``, ``accuracy``, ``tilt``, ``noise``, ``timing``,
``estimate``.  Each experiment subcommand writes deterministic CSV files
plus rendered figures into the output directory and prints a short
summary table.  Exit codes: 0 success, 1 configuration error, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import figures
from .baselines import RssrMode, estimate_ca_rssr, estimate_rssr
from .channel import NoiseModel
from .compensation import CompensationConfig
from .config import (
    build_camera,
    build_pd,
    build_scene,
    build_spec,
    dump_config,
    load_config,
)
from .errors import ConfigError, VlpError
from .compensation import estimate as estimate_dispatch
from .geometry import ReceiverPose, vec3
from .harness import (
    run_accuracy,
    run_coverage,
    run_image_noise,
    run_tilt,
    run_timing,
    write_accuracy_summary_csv,
    write_coverage_csv,
    write_image_noise_csv,
    write_timing_csv,
    write_trials_csv,
)
from .sensing import ImageNoiseModel, LinkObservation, ObservationSet, observe


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated number list, got '{text}'") from exc


def _parse_fov_spec(text: str) -> list[float]:
    """Either 'start:stop:step' (stop inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"field-of-view range must be start:stop:step, got '{text}'")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("field-of-view step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        return out
    return _parse_float_list(text)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="JSON config file")
    sub.add_argument("--out", metavar="DIR", default="results",
                     help="output directory (default: results)")
    sub.add_argument("--seed", type=int, help="master RNG seed")
    sub.add_argument("--trials", type=int, help="Monte-Carlo trials per sweep point")
    sub.add_argument("--dim", choices=["2d", "3d"], help="positioning dimension")
    sub.add_argument("--dpc", metavar="LIST",
                     help="PD-camera offsets in cm, comma separated")
    sub.add_argument("--delta", type=float, metavar="CM",
                     help="offset threshold for the compensation dispatch, cm")
    sub.add_argument("--fov", metavar="SPEC",
                     help="field-of-view sweep: start:stop:step or comma list, deg")
    sub.add_argument("--sigma-px", metavar="LIST",
                     help="pixel-noise sweep values, comma separated")
    sub.add_argument("--snr-floor", type=float, metavar="DB",
                     help="SNR requirement for a usable link, dB")
    sub.add_argument("--grid-step", type=float, metavar="M",
                     help="coverage grid spacing, metres")
    sub.add_argument("--paper-scale", action="store_true",
                     help="full-scale run: 100000 trials and 5 cm grid")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip figure rendering, CSV only")
    sub.add_argument("--dump-config", metavar="PATH",
                     help="write the effective config to PATH and continue")


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.dim is not None:
        overrides["dimension"] = args.dim
    if args.dpc is not None:
        overrides["dpc_sweep_cm"] = _parse_float_list(args.dpc)
    if args.delta is not None:
        overrides["delta_cm"] = args.delta
    if args.fov is not None:
        overrides["fov_sweep_deg"] = _parse_fov_spec(args.fov)
    if args.sigma_px is not None:
        overrides["sigma_px_sweep"] = _parse_float_list(args.sigma_px)
    if args.snr_floor is not None:
        overrides["snr_floor_db"] = args.snr_floor
    if args.grid_step is not None:
        overrides["grid_step"] = args.grid_step
    if args.paper_scale:
        overrides["trials"] = 100_000
        overrides["grid_step"] = 0.05
    return overrides


def _setup(args: argparse.Namespace, kind: str):
    config = load_config(args.config, _overrides_from_args(args))
    if args.dump_config:
        dump_config(config, args.dump_config)
    scene = build_scene(config)
    pd = build_pd(config)
    intr = build_camera(config)
    spec = build_spec(config, kind)
    os.makedirs(args.out, exist_ok=True)
    return scene, pd, intr, spec


def _dpc_token(dpc_cm: float) -> str:
    return f"{dpc_cm:g}".replace(".", "p")


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    line = "  ".join(str(h).ljust(w) for h, w in zip(header, widths))
    print(line)
    print("-" * len(line))
    for row in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))


def cmd_coverage(args: argparse.Namespace) -> int:
    scene, pd, intr, spec = _setup(args, "coverage")
    results = run_coverage(scene, spec, pd, intr)
    csv_path = os.path.join(args.out, f"coverage_{spec.dimension}.csv")
    write_coverage_csv(results, csv_path, spec.dimension)
    written = [csv_path]
    if not args.no_plot:
        written.append(figures.save_coverage_figure(
            results, spec.dimension,
            os.path.join(args.out, f"coverage_{spec.dimension}.png")))
    algorithms = sorted(results[0].cr) if results else []
    _print_table(["fov_deg"] + algorithms,
                 [[f"{r.fov_deg:g}"] + [f"{r.cr[a]:.3f}" for a in algorithms]
                  for r in results])
    print("wrote:", ", ".join(written))
    return 0


def _cmd_trials(args: argparse.Namespace, kind: str, runner) -> int:
    scene, pd, intr, spec = _setup(args, kind)
    result = runner(scene, spec, pd, intr)
    stem = {"accuracy": "accuracy", "tilt": "tilt"}[kind]
    summary = os.path.join(args.out, f"{stem}_summary_{spec.dimension}.csv")
    write_accuracy_summary_csv(result, summary)
    written = [summary]
    for dpc_cm in spec.dpc_sweep_cm:
        path = os.path.join(
            args.out, f"{stem}_trials_{spec.dimension}_dpc{_dpc_token(dpc_cm)}.csv")
        write_trials_csv(result, float(dpc_cm), path)
        written.append(path)
    if not args.no_plot:
        written.append(figures.save_cdf_figure(
            result, os.path.join(args.out, f"{stem}_cdf_{spec.dimension}.png")))
    rows = []
    for (algorithm, dpc_cm) in sorted(result.records):
        rows.append([algorithm, f"{dpc_cm:g}",
                     f"{result.percentile(algorithm, dpc_cm, 50) * 100:.2f}",
                     f"{result.percentile(algorithm, dpc_cm, 80) * 100:.2f}",
                     str(result.failure_count(algorithm, dpc_cm))])
    _print_table(["algorithm", "dpc_cm", "median_cm", "p80_cm", "failures"], rows)
    print("wrote:", ", ".join(written))
    return 0


def cmd_accuracy(args: argparse.Namespace) -> int:
    return _cmd_trials(args, "accuracy", run_accuracy)


def cmd_tilt(args: argparse.Namespace) -> int:
    return _cmd_trials(args, "tilt", run_tilt)


def cmd_noise(args: argparse.Namespace) -> int:
    scene, pd, intr, spec = _setup(args, "image_noise")
    result = run_image_noise(scene, spec, pd, intr)
    csv_path = os.path.join(args.out, f"image_noise_{spec.dimension}.csv")
    write_image_noise_csv(result, csv_path)
    written = [csv_path]
    if not args.no_plot:
        written.append(figures.save_image_noise_figure(
            result, os.path.join(args.out, f"image_noise_{spec.dimension}.png")))
    _print_table(["sigma_px", "algorithm", "dpc_cm", "mean_cm", "large_pe_pct"],
                 [[f"{r[0]:g}", r[1], f"{r[2]:g}", f"{r[3] * 100:.2f}",
                   f"{r[4] * 100:.3f}"] for r in sorted(result.rows)])
    print("wrote:", ", ".join(written))
    return 0


def cmd_timing(args: argparse.Namespace) -> int:
    scene, pd, intr, spec = _setup(args, "timing")
    result = run_timing(scene, spec, pd, intr)
    csv_path = os.path.join(args.out, f"timing_{spec.dimension}.csv")
    write_timing_csv(result, csv_path)
    written = [csv_path]
    if not args.no_plot:
        written.append(figures.save_timing_figure(
            result, os.path.join(args.out, f"timing_{spec.dimension}.png")))
    _print_table(["algorithm", "median_ms", "mean_ms", "p95_ms"],
                 [[a, f"{s[0] * 1e3:.3f}", f"{s[1] * 1e3:.3f}", f"{s[2] * 1e3:.3f}"]
                  for a, s in sorted(result.stats.items())])
    print("wrote:", ", ".join(written))
    return 0


def _load_observations(path: str) -> ObservationSet:
    """Replay file: JSON array of {led_id, power_w, pixel: [u, v]}."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read observation file: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigError("observation file must be a JSON array")
    observations = []
    for entry in raw:
        try:
            observations.append(LinkObservation(
                led_id=int(entry["led_id"]),
                mean_power=float(entry["power_w"]),
                mean_pixel=np.asarray(entry["pixel"], dtype=float),
                snr_db=math.inf, in_pd_fov=True, in_camera_frame=True))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad observation entry {entry}: {exc}") from exc
    return ObservationSet(observations=observations, receiver_truth=None)


def cmd_estimate(args: argparse.Namespace) -> int:
    config = load_config(args.config, {})
    scene = build_scene(config)
    pd = build_pd(config)
    intr = build_camera(config)
    exp = config["experiment"]
    delta_cm = args.delta if args.delta is not None else exp["delta_cm"]
    dpc_cm = _parse_float_list(args.dpc)[0] if args.dpc else 0.0
    dim = args.dim or exp["dimension"]

    if args.obs:
        obs = _load_observations(args.obs)
        known_z = args.known_z
    elif args.pose:
        coords = _parse_float_list(args.pose)
        if len(coords) != 3:
            raise ConfigError("--pose must be x,y,z in metres")
        pose = ReceiverPose(position=vec3(*coords), rotation=np.eye(3))
        if args.seed is not None:
            from .channel import calibrate_noise
            reference = ReceiverPose(position=vec3(0, 0, 0), rotation=np.eye(3))
            noise = calibrate_noise(scene, pd, reference, exp["snr_floor_db"],
                                    rss_samples_averaged=exp["rss_samples"])
            sigma_eff = exp["pixel_noise_std"] * math.sqrt(exp["images_averaged"])
            img = ImageNoiseModel(sigma_eff, exp["images_averaged"])
        else:
            noise = NoiseModel(0.0, 1)
            img = ImageNoiseModel(0.0, 1)
        obs = observe(scene, pose, intr, pd, noise, img,
                      rng_seed=args.seed if args.seed is not None else 0,
                      pd_offset_camera=vec3(dpc_cm / 100.0, 0.0, 0.0),
                      snr_threshold_db=exp["snr_floor_db"])
        known_z = coords[2]
    else:
        raise ConfigError("estimate needs --pose x,y,z or --obs FILE")

    algorithm = args.algorithm
    if algorithm == "eca-rssr":
        cfg = CompensationConfig(pd_offset_camera=vec3(dpc_cm / 100.0, 0.0, 0.0),
                                 threshold=delta_cm / 100.0)
        est = estimate_dispatch(obs, scene, intr, cfg, dim, known_z)
    elif algorithm == "ca-rssr":
        est = estimate_ca_rssr(obs, scene, intr, dim, known_z=known_z)
    elif algorithm in ("rssr-ideal", "rssr-portable"):
        est = estimate_rssr(obs, scene, RssrMode(algorithm.split("-")[1]),
                            dim, known_z=known_z)
    else:
        raise ConfigError(f"unknown algorithm '{algorithm}'")

    coords = est.position(known_z) if dim == "3d" else est.xy
    label = "x,y,z" if dim == "3d" else "x,y"
    print(f"position ({label}): " + ", ".join(f"{c:.6f}" for c in coords))
    print(f"mode: {est.mode}")
    print(f"iterations: {est.iterations}")
    print(f"residual: {est.residual:.3e}")
    print(f"elapsed_s: {est.elapsed_s:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlpsim",
        description="Visible-light positioning simulator and experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, doc in [
        ("coverage", cmd_coverage, "coverage ratio over a position grid vs field of view"),
        ("accuracy", cmd_accuracy, "positioning-error CDFs vs PD-camera offset"),
        ("tilt", cmd_tilt, "positioning-error CDFs under random receiver tilt"),
        ("noise", cmd_noise, "mean error and large-error ratio vs pixel noise"),
        ("timing", cmd_timing, "wall-clock cost per estimate"),
    ]:
        p = sub.add_parser(name, help=doc)
        _add_common_flags(p)
        p.set_defaults(handler=fn)

    p = sub.add_parser("estimate", help="single-shot estimate from a pose or a recorded observation file")
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--pose", metavar="X,Y,Z", help="true receiver position for a synthetic shot")
    p.add_argument("--obs", metavar="FILE", help="recorded observation JSON to replay")
    p.add_argument("--algorithm", default="eca-rssr",
                   choices=["eca-rssr", "ca-rssr", "rssr-ideal", "rssr-portable"])
    p.add_argument("--dpc", metavar="CM", help="PD-camera offset in cm")
    p.add_argument("--delta", type=float, metavar="CM", help="dispatch threshold in cm")
    p.add_argument("--dim", choices=["2d", "3d"])
    p.add_argument("--seed", type=int, help="add configured measurement noise with this seed")
    p.add_argument("--known-z", type=float, default=0.0,
                   help="receiver height used by 2d solvers on replayed data")
    p.set_defaults(handler=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except VlpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
