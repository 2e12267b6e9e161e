"""Versioned JSON run configuration.

A config file fully describes scene, camera, PD and experiment settings;
command-line flags override individual experiment fields.  Unknown keys
are rejected so that typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json

from .channel import LedFixture, PdCharacteristics
from .errors import ConfigError
from .geometry import CameraIntrinsics
from .harness import ExperimentSpec
from .scene import Scene, default_camera, default_pd, default_scene

CONFIG_VERSION = 1

_EXPERIMENT_FIELDS = {f.name for f in dataclasses.fields(ExperimentSpec)} - {"kind"}


def default_config() -> dict:
    """Reference configuration as a plain JSON-serialisable dict."""
    scene = default_scene()
    pd = default_pd()
    cam = default_camera()
    return {
        "version": CONFIG_VERSION,
        "scene": {
            "room": list(scene.room),
            "leds": [
                {
                    "id": led.id,
                    "position": [float(v) for v in led.position],
                    "semiangle_deg": led.semiangle_deg,
                    "transmit_power": led.transmit_power,
                }
                for led in scene.leds
            ],
        },
        "camera": {
            "f_u": cam.f_u, "f_v": cam.f_v, "u0": cam.u0, "v0": cam.v0,
            "width": cam.width, "height": cam.height,
            "focal_length": cam.focal_length,
        },
        "pd": {
            "area": pd.area, "filter_gain": pd.filter_gain,
            "concentrator_index": pd.concentrator_index,
            "fov_deg": pd.fov_deg, "responsivity": pd.responsivity,
        },
        "experiment": {
            "trials": 10_000,
            "seed": 1,
            "grid_step": 0.10,
            "fov_sweep_deg": list(range(0, 85, 5)),
            "dpc_sweep_cm": [1.0],
            "sigma_px_sweep": [0.0, 2.5, 5.0, 7.5, 10.0],
            "algorithms": [],
            "snr_floor_db": 13.6,
            "dimension": "2d",
            "delta_cm": 6.0,
            "pixel_noise_std": 2.5,
            "images_averaged": 10,
            "rss_samples": 1000,
            "tilt_max_deg": 10.0,
            "tilt_perturb_max_deg": 5.0,
            "clip_to_frame": False,
            "large_pe_threshold_m": 1.0,
        },
    }


def _reject_unknown(section: str, given: dict, allowed: set) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {sorted(unknown)}")


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            out[key] = _merge(base[key], value, f"{path}{key}.")
        else:
            out[key] = value
    return out


def load_config(path: str | None = None, overrides: dict | None = None) -> dict:
    """Defaults, optionally overlaid with a JSON file and flag overrides."""
    config = default_config()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        _reject_unknown("config", user, {"version", "scene", "camera", "pd", "experiment"})
        version = user.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {version}")
        _reject_unknown("scene", user.get("scene", {}), {"room", "leds"})
        _reject_unknown("camera", user.get("camera", {}),
                        set(default_config()["camera"]))
        _reject_unknown("pd", user.get("pd", {}), set(default_config()["pd"]))
        _reject_unknown("experiment", user.get("experiment", {}), _EXPERIMENT_FIELDS)
        config = _merge(config, user)
    if overrides:
        _reject_unknown("experiment", overrides, _EXPERIMENT_FIELDS)
        config["experiment"] = _merge(config["experiment"], overrides)
    return config


def build_scene(config: dict) -> Scene:
    sc = config["scene"]
    try:
        leds = [LedFixture(id=int(led["id"]),
                           position=led["position"],
                           semiangle_deg=float(led["semiangle_deg"]),
                           transmit_power=float(led["transmit_power"]))
                for led in sc["leds"]]
        return Scene(room=sc["room"], leds=leds)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scene: {exc}") from exc


def build_camera(config: dict) -> CameraIntrinsics:
    cam = config["camera"]
    try:
        return CameraIntrinsics.from_pixel_geometry(
            f_u=float(cam["f_u"]), f_v=float(cam["f_v"]),
            u0=float(cam["u0"]), v0=float(cam["v0"]),
            width=float(cam["width"]), height=float(cam["height"]),
            focal_length=float(cam["focal_length"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid camera: {exc}") from exc


def build_pd(config: dict, fov_deg: float | None = None) -> PdCharacteristics:
    pd = config["pd"]
    try:
        return PdCharacteristics(
            area=float(pd["area"]), filter_gain=float(pd["filter_gain"]),
            concentrator_index=float(pd["concentrator_index"]),
            fov_deg=float(fov_deg if fov_deg is not None else pd["fov_deg"]),
            responsivity=float(pd["responsivity"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid pd: {exc}") from exc


def build_spec(config: dict, kind: str) -> ExperimentSpec:
    exp = config["experiment"]
    try:
        return ExperimentSpec(kind=kind, **exp)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid experiment settings: {exc}") from exc


def dump_config(config: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
