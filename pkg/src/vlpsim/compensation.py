"""Compensation of the PD-to-camera offset, plus algorithm dispatch.

The closed-form path treats the power sensor (PD) and the camera as one
point.  When their separation d_pc is not negligible the measured power
belongs to the PD while the pixels belong to the camera, which biases
the distance ratios.  The compensation loop removes that bias by
re-deriving, at every candidate camera position r:

1. the LED coordinates in the camera frame (pixel rays scaled by the
   candidate LED distances),
2. the light incidence angles at the offset PD,
3. the receiver rotation, from a linear fit of camera-frame LED
   coordinates onto candidate-centred world coordinates, projected to
   the nearest orthonormal matrix,
4. the PD position in world coordinates,
5. model power ratios at the PD; their mismatch against the measured
   ratios is the residual vector driving a damped least-squares solve
   over r, started from the closed-form estimate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CoincidentPointsError,
    GrazingRayError,
    NonFiniteResidualError,
    SingularConfigurationError,
)
from .estimator import PositionEstimate, estimate_basic
from .geometry import CameraIntrinsics, Vec3, nearest_rotation, pixel_to_camera_ray, vec3
from .lm import LmOptions, LmResult, solve
from .scene import Scene
from .sensing import ObservationSet, select_strongest

_EPS = 1e-12

# Ordered LED index pairs used for the six ratio residuals.
_PAIRS = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


@dataclass
class CompensationConfig:
    """Receiver offset geometry and solver settings.

    ``pd_offset_camera`` is the vector from the camera optical centre to
    the PD, expressed in the camera frame and known from the device
    layout.  ``threshold`` selects the closed-form path whenever the
    offset norm does not exceed it.
    """

    pd_offset_camera: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, 0.0))
    threshold: float = 0.06
    lm_options: LmOptions = field(default_factory=LmOptions)

    def __post_init__(self):
        self.pd_offset_camera = np.asarray(self.pd_offset_camera, dtype=float)
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")

    @property
    def offset_norm(self) -> float:
        return float(np.linalg.norm(self.pd_offset_camera))


@dataclass
class RigidPoseEstimate:
    """Receiver rotation and PD world position at one candidate point."""

    rotation: np.ndarray
    pd_world: Vec3
    rotation_unprojected: np.ndarray


def led_camera_coords(pixels: list[np.ndarray], intr: CameraIntrinsics,
                      led_positions: np.ndarray, r_candidate: Vec3) -> np.ndarray:
    """Camera-frame LED coordinates at a candidate camera position.

    Each pixel fixes the LED direction; the candidate fixes its range
    ``|s_w - r|``, so the LED sits at the unit ray scaled by that range.
    """
    out = np.empty((len(pixels), 3))
    for k, px in enumerate(pixels):
        ray = pixel_to_camera_ray(intr, px)
        n = np.linalg.norm(ray)
        if n < _EPS:  # unreachable for finite pixels (z component is 1)
            raise GrazingRayError("degenerate camera ray")
        dist = np.linalg.norm(led_positions[k] - r_candidate)
        out[k] = ray / n * dist
    return out


def pd_incidence(s_camera: Vec3, cfg: CompensationConfig,
                 pd_normal_camera: Vec3) -> float:
    """Incidence angle at the offset PD for an LED at camera coords ``s_camera``."""
    v = np.asarray(s_camera, float) - cfg.pd_offset_camera
    n = np.linalg.norm(v)
    if n < _EPS:
        raise CoincidentPointsError("LED coincides with the PD")
    c = float(np.dot(pd_normal_camera, v) / n)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def estimate_rotation(s_camera: np.ndarray, s_world: np.ndarray,
                      r_candidate: Vec3) -> tuple[np.ndarray, np.ndarray]:
    """Camera-to-world rotation from three LED correspondences.

    Solves the linear system (camera coords) @ R^T = (world coords - r)
    through the normal equations, then projects the result to the
    nearest orthonormal matrix so downstream angle computations stay
    stable under noise.  Returns ``(projected, unprojected)``.
    """
    a = np.asarray(s_camera, float)
    scale = float(np.abs(a).max())
    if scale <= 0 or abs(np.linalg.det(a)) < 1e-12 * scale ** 3:
        raise SingularConfigurationError("LED rays are coplanar with the camera centre")
    b = np.asarray(s_world, float) - np.asarray(r_candidate, float)
    r_t = np.linalg.solve(a.T @ a, a.T @ b)
    raw = r_t.T
    return nearest_rotation(raw), raw


def pd_world_position(rotation: np.ndarray, cfg: CompensationConfig,
                      r_candidate: Vec3) -> Vec3:
    """PD world coordinates: rotate the known offset and add the camera position."""
    return rotation @ cfg.pd_offset_camera + np.asarray(r_candidate, float)


def rigid_pose_at(pixels, intr, led_positions, cfg, pd_normal_camera,
                  r_candidate) -> tuple[RigidPoseEstimate, np.ndarray, np.ndarray]:
    """Steps 1-4 at one candidate: pose estimate, LED camera coords, PD angles."""
    s_cam = led_camera_coords(pixels, intr, led_positions, r_candidate)
    psis = np.array([pd_incidence(s, cfg, pd_normal_camera) for s in s_cam])
    rotation, raw = estimate_rotation(s_cam, led_positions, r_candidate)
    pd_world = pd_world_position(rotation, cfg, r_candidate)
    return RigidPoseEstimate(rotation, pd_world, raw), s_cam, psis


def rssr_residuals(obs: ObservationSet, scene: Scene, intr: CameraIntrinsics,
                   cfg: CompensationConfig, pd_normal_camera: Vec3,
                   r_candidate: Vec3) -> np.ndarray:
    """Ratio mismatch residuals at a candidate camera position.

    For each ordered LED pair (i, j) the residual is
        P_j/P_i  -  (|d_i|/|d_j|)^(m+2) * cos(psi_j)/cos(psi_i)
    with distances and PD incidence angles evaluated at the offset PD
    position implied by the candidate.  All six residuals vanish at the
    true position for noise-free measurements, for any offset.
    """
    picked = select_strongest(obs, 3).observations
    led_positions = np.array([scene.led_by_id(o.led_id).position for o in picked])
    pixels = [o.mean_pixel for o in picked]
    powers = np.array([o.mean_power for o in picked])
    m = scene.lambertian_order

    pose, _, psis = rigid_pose_at(pixels, intr, led_positions, cfg,
                                  pd_normal_camera, r_candidate)
    d_pd = np.linalg.norm(led_positions - pose.pd_world, axis=1)
    cosp = np.cos(psis)
    if np.any(d_pd < _EPS) or np.any(cosp < _EPS) or np.any(powers <= 0):
        raise NonFiniteResidualError("compensation step left the model domain")

    res = np.empty(len(_PAIRS))
    for k, (i, j) in enumerate(_PAIRS):
        model = (d_pd[i] / d_pd[j]) ** (m + 2.0) * (cosp[j] / cosp[i])
        res[k] = powers[j] / powers[i] - model
    return res


def estimate_compensated(obs: ObservationSet, scene: Scene, intr: CameraIntrinsics,
                         cfg: CompensationConfig, mode: str = "3d",
                         known_z: float = 0.0,
                         pd_normal_camera: Optional[Vec3] = None) -> PositionEstimate:
    """Offset-compensated estimate: damped least squares over the camera
    position with the closed-form result as the starting value.

    In ``'2d'`` mode only (x, y) are optimised and the receiver height
    is pinned at ``known_z``; in ``'3d'`` mode all three coordinates are
    free.  The accepted cost never exceeds the cost at the start value.
    """
    t0 = time.perf_counter()
    if mode not in ("2d", "3d"):
        raise ValueError("mode must be '2d' or '3d'")
    normal = vec3(0, 0, 1) if pd_normal_camera is None else np.asarray(pd_normal_camera, float)

    start = estimate_basic(obs, scene, intr, mode)

    def unpack(params: np.ndarray) -> np.ndarray:
        if mode == "2d":
            return np.array([params[0], params[1], known_z])
        return np.asarray(params, float)

    def residual_fn(params: np.ndarray) -> np.ndarray:
        return rssr_residuals(obs, scene, intr, cfg, normal, unpack(params))

    x0 = start.xy if mode == "2d" else start.position()
    result: LmResult = solve(residual_fn, x0, cfg.lm_options)
    r = unpack(result.solution)

    return PositionEstimate(
        xy=r[:2], z=(None if mode == "2d" else float(r[2])),
        mode="compensated", iterations=result.iterations,
        residual=result.final_cost, elapsed_s=time.perf_counter() - t0,
        converged=result.converged,
        extras={"start_xy": start.xy, "gradient_norm": result.gradient_norm})


def estimate(obs: ObservationSet, scene: Scene, intr: CameraIntrinsics,
             cfg: CompensationConfig, mode: str = "3d",
             known_z: float = 0.0) -> PositionEstimate:
    """Dispatch on the offset norm: closed-form path when
    ``|d_pc| <= threshold``, compensation loop otherwise."""
    if cfg.offset_norm <= cfg.threshold:
        return estimate_basic(obs, scene, intr, mode)
    return estimate_compensated(obs, scene, intr, cfg, mode, known_z)
