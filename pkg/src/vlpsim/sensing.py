"""Synthetic per-pose measurements: visibility, noisy pixels, noisy power.

For every LED the simulated receiver records an averaged power reading
from the PD and an averaged pixel coordinate from the camera.  Pixel
averaging models processing several images of the same position; power
averaging models repeated photocurrent sampling.  Visibility is a
noise-free property of the geometry and the configured SNR floor so
that coverage sweeps are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import NoiseModel, PdCharacteristics, received_power, snr_db, sample_measured_power
from .errors import InsufficientLedsError, NonPositiveDistanceError
from .geometry import (
    CameraIntrinsics,
    ReceiverPose,
    Vec3,
    in_frame,
    project_to_pixel,
    vec3,
    world_to_camera,
)
from .scene import Scene


@dataclass
class ImageNoiseModel:
    """White Gaussian pixel noise, averaged over several images."""

    pixel_noise_std: float
    images_averaged: int = 1

    def __post_init__(self):
        if self.pixel_noise_std < 0:
            raise ValueError("pixel noise std must be non-negative")
        if self.images_averaged < 1:
            raise ValueError("must average at least one image")


@dataclass
class LinkObservation:
    """Measurements and visibility flags for one LED."""

    led_id: int
    mean_power: float
    mean_pixel: Optional[np.ndarray]
    snr_db: float
    in_pd_fov: bool
    in_camera_frame: bool
    snr_ok: bool = True

    @property
    def visible(self) -> bool:
        return self.in_pd_fov and self.in_camera_frame and self.snr_ok


@dataclass
class ObservationSet:
    """All per-LED observations for one receiver pose.

    ``receiver_truth`` is retained only for scoring the positioning
    error; estimators must not read it (the ideal-orientation baseline
    is the single sanctioned exception, since knowing the true tilt is
    its defining assumption).
    """

    observations: list[LinkObservation]
    receiver_truth: Optional[ReceiverPose] = None

    def visible_observations(self) -> list[LinkObservation]:
        return [o for o in self.observations if o.visible]


@dataclass
class LedVisibility:
    """Noise-free visibility breakdown for one LED."""

    led_id: int
    in_pd_fov: bool
    in_camera_frame: bool
    snr_ok: bool

    @property
    def visible(self) -> bool:
        return self.in_pd_fov and self.in_camera_frame and self.snr_ok


def _camera_state(pose: ReceiverPose, pd: PdCharacteristics,
                  pd_offset_camera: Optional[Vec3]):
    offset = vec3(0, 0, 0) if pd_offset_camera is None else np.asarray(pd_offset_camera, float)
    pd_position = pose.position + pose.rotation @ offset
    pd_normal_world = pose.rotation @ pd.normal_camera_frame
    return pd_position, pd_normal_world


def _true_power(led, pd, pd_position, pd_normal_world) -> float:
    try:
        return received_power(led, pd, pd_position, pd_normal_world)
    except NonPositiveDistanceError:
        # PD sitting exactly on the LED: no usable link.
        return 0.0


def visibility(scene: Scene, pose: ReceiverPose, intr: CameraIntrinsics,
               pd: PdCharacteristics,
               noise: Optional[NoiseModel] = None,
               snr_threshold_db: Optional[float] = None,
               clip_to_frame: bool = False) -> list[LedVisibility]:
    """Per-LED visibility flags for a receiver pose.

    An LED is visible when its true incidence angle lies within the PD
    field of view, it projects in front of the camera, and its noise-free
    SNR clears ``snr_threshold_db`` (skipped when no threshold or noise
    model is given).  ``clip_to_frame`` additionally requires the
    projection to land within the sensor bounds; it is off by default
    because the simulated world treats the pinhole as unbounded and uses
    the PD field of view as the only angular limit.
    """
    pd_position, pd_normal_world = _camera_state(pose, pd, None)
    out = []
    for led in scene.leds:
        p_true = _true_power(led, pd, pd_position, pd_normal_world)
        fov_ok = p_true > 0.0
        p_cam = world_to_camera(pose, led.position)
        cam_ok = p_cam[2] > 0.0
        if cam_ok and clip_to_frame:
            cam_ok = in_frame(intr, project_to_pixel(intr, p_cam))
        if snr_threshold_db is None or noise is None:
            s_ok = True
        else:
            s_ok = (p_true > 0.0
                    and snr_db(pd, noise, p_true) >= snr_threshold_db - 1e-12)
        out.append(LedVisibility(led_id=led.id, in_pd_fov=fov_ok,
                                 in_camera_frame=cam_ok, snr_ok=s_ok))
    return out


def observe(scene: Scene, pose: ReceiverPose, intr: CameraIntrinsics,
            pd: PdCharacteristics, noise: NoiseModel,
            img_noise: ImageNoiseModel, rng_seed: int,
            pd_offset_camera: Optional[Vec3] = None,
            snr_threshold_db: Optional[float] = None,
            clip_to_frame: bool = False) -> ObservationSet:
    """Synthesise one observation set for a receiver pose.

    Power readings are taken at the PD, which may sit at
    ``pd_offset_camera`` (camera-frame metres) away from the camera
    optical centre; pixel readings come from the camera itself.  The
    draw order is fixed (per LED in id order: power samples, then pixel
    samples), so a seed fully determines the output.
    """
    rng = np.random.default_rng(rng_seed)
    pd_position, pd_normal_world = _camera_state(pose, pd, pd_offset_camera)

    observations = []
    for led in sorted(scene.leds, key=lambda l: l.id):
        p_true = _true_power(led, pd, pd_position, pd_normal_world)
        mean_power = max(0.0, sample_measured_power(p_true, pd, noise, rng))

        p_cam = world_to_camera(pose, led.position)
        cam_ok = p_cam[2] > 0.0
        mean_pixel = None
        if cam_ok:
            true_px = project_to_pixel(intr, p_cam)
            if img_noise.pixel_noise_std > 0.0:
                jitter = rng.normal(0.0, img_noise.pixel_noise_std,
                                    (img_noise.images_averaged, 2))
                mean_pixel = true_px + jitter.mean(axis=0)
            else:
                mean_pixel = true_px
            if clip_to_frame:
                cam_ok = in_frame(intr, true_px)

        if noise.current_noise_std > 0.0:
            link_snr = snr_db(pd, noise, p_true)
        else:
            link_snr = math.inf if p_true > 0.0 else -math.inf
        s_ok = True if snr_threshold_db is None else link_snr >= snr_threshold_db - 1e-12

        observations.append(LinkObservation(
            led_id=led.id, mean_power=mean_power, mean_pixel=mean_pixel,
            snr_db=link_snr, in_pd_fov=p_true > 0.0,
            in_camera_frame=cam_ok, snr_ok=s_ok))
    return ObservationSet(observations=observations, receiver_truth=pose)


def select_strongest(obs: ObservationSet, k: int) -> ObservationSet:
    """Keep the ``k`` visible observations with the largest mean power.

    Returned in descending power order; ties break toward the lower LED
    id so repeated runs select deterministically.
    """
    visible = obs.visible_observations()
    if len(visible) < k:
        raise InsufficientLedsError(visible=len(visible), required=k)
    ranked = sorted(visible, key=lambda o: (-o.mean_power, o.led_id))
    return ObservationSet(observations=ranked[:k], receiver_truth=obs.receiver_truth)
