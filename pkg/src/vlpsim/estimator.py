"""Camera-assisted RSS-ratio trilateration (closed-form path).

The pipeline turns one camera image plus per-LED power readings into a
position without knowing the receiver orientation:

1. Incidence angles from pixels.  The camera ray of an LED projection
   makes the same angle with the optical axis as the incoming light
   makes with the PD normal (both are rigidly mounted and parallel), so
   psi is available regardless of how the receiver is tilted.
2. Distance ratios from power ratios.  For equal-height LEDs the
   irradiance cosine is h/d, so the ratio of two received powers
   collapses to (d_i/d_j)^(m+2) * cos(psi_j)/cos(psi_i), which inverts
   to d_i/d_j once the incidence angles are known.
3. Absolute distances from the law of cosines.  The angle between two
   LED rays plus the known LED-to-LED baseline pins the triangle scale:
       d_1 = rho * b / sqrt(1 + rho^2 - 2 rho cos(alpha)),  d_2 = d_1/rho.
4. Plan-view position by linear least squares on the differenced range
   equations, plus an optional height recovery from one slant range.

Steps 1-4 are closed-form; no iteration and no starting value.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CollinearLedsError,
    DegenerateTriangleError,
    GrazingIncidenceError,
    InconsistentGeometryError,
    NonPositivePowerError,
)
from .geometry import CameraIntrinsics, Vec3, inter_led_angle, pixel_to_camera_ray
from .scene import Scene
from .sensing import ObservationSet, select_strongest

_COS_EPS = 1e-9
_TRIANGLE_EPS = 1e-12
_RADICAND_CLAMP = 1e-4  # m^2; tolerated numeric overshoot in height recovery


@dataclass
class PositionEstimate:
    """Estimated receiver coordinates plus solver diagnostics."""

    xy: np.ndarray
    z: Optional[float]
    mode: str                      # 'basic', 'compensated' or 'baseline-*'
    iterations: int = 0
    residual: float = 0.0
    elapsed_s: float = 0.0
    converged: bool = True
    extras: dict = field(default_factory=dict)

    def position(self, known_z: float = 0.0) -> np.ndarray:
        """Full 3-vector, substituting ``known_z`` when z was not estimated."""
        z = self.z if self.z is not None else known_z
        return np.array([self.xy[0], self.xy[1], z])


def incidence_angle(intr: CameraIntrinsics, px: np.ndarray) -> float:
    """Incidence angle (radians) of the LED whose projection is ``px``.

    Equal to the angle between the back-projected camera ray and the
    optical axis: arccos(1 / sqrt(n1^2 + n2^2 + 1)) with
    n1 = (u - u0)/f_u and n2 = (v - v0)/f_v.
    """
    ray = pixel_to_camera_ray(intr, px)
    return float(np.arccos(1.0 / np.linalg.norm(ray)))


def distance_ratio(power_i: float, power_j: float,
                   psi_i: float, psi_j: float, m: float) -> float:
    """Estimate d_i/d_j from two power readings and incidence angles.

    rho_ij = (P_j/P_i * cos(psi_i)/cos(psi_j))^(1/(m+2)) for LEDs sharing
    one mounting height and Lambertian order ``m``.
    """
    if power_i <= 0.0 or power_j <= 0.0:
        raise NonPositivePowerError(
            f"power ratio needs positive readings, got {power_i}, {power_j}")
    cos_i = math.cos(psi_i)
    cos_j = math.cos(psi_j)
    if cos_i <= _COS_EPS or cos_j <= _COS_EPS:
        raise GrazingIncidenceError("incidence too close to 90 degrees")
    return ((power_j / power_i) * (cos_i / cos_j)) ** (1.0 / (m + 2.0))


def absolute_distances(ratio_12: float, ratio_13: float,
                       alpha_12: float, alpha_13: float,
                       baseline_12: float, baseline_13: float) -> tuple[float, float, float]:
    """Recover the three absolute LED distances from two ratios.

    In the triangle (LED1, receiver, LED2) the law of cosines with
    d_2 = d_1 / rho_12 gives
        d_1 = rho_12 * b_12 / sqrt(1 + rho_12^2 - 2 rho_12 cos(alpha_12)),
    and d_2, d_3 follow from the ratios.  The returned distances satisfy
    d_1^2 + d_2^2 - 2 d_1 d_2 cos(alpha_12) = b_12^2 identically.
    """
    if ratio_12 <= 0 or ratio_13 <= 0:
        raise ValueError("distance ratios must be positive")
    denom = 1.0 + ratio_12 * ratio_12 - 2.0 * ratio_12 * math.cos(alpha_12)
    if denom <= _TRIANGLE_EPS:
        raise DegenerateTriangleError(
            "LED rays indistinguishable; triangle with the receiver collapsed")
    d1 = ratio_12 * baseline_12 / math.sqrt(denom)
    return d1, d1 / ratio_12, d1 / ratio_13


def solve_plan_position(led_positions: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """Plan-view (x, y) from three slant ranges to equal-height LEDs.

    Differencing the squared range equations of LEDs 2 and 3 against
    LED 1 cancels the unknown height and leaves two linear equations,
    solved through the normal equations.
    """
    p = np.asarray(led_positions, float)
    d = np.asarray(distances, float)
    a = np.array([[p[1, 0] - p[0, 0], p[1, 1] - p[0, 1]],
                  [p[2, 0] - p[0, 0], p[2, 1] - p[0, 1]]])
    scale = max(np.linalg.norm(a[0]), np.linalg.norm(a[1]), 1e-30)
    if abs(np.linalg.det(a)) < 1e-9 * scale * scale:
        raise CollinearLedsError("LEDs are collinear in plan view")
    b = 0.5 * np.array([
        d[0] ** 2 - d[1] ** 2 + p[1, 0] ** 2 + p[1, 1] ** 2 - p[0, 0] ** 2 - p[0, 1] ** 2,
        d[0] ** 2 - d[2] ** 2 + p[2, 0] ** 2 + p[2, 1] ** 2 - p[0, 0] ** 2 - p[0, 1] ** 2,
    ])
    return np.linalg.solve(a.T @ a, a.T @ b)


def recover_height(led1_position: Vec3, xy: np.ndarray, d1: float) -> float:
    """Receiver height from one slant range and the plan-view solution.

    z = h - sqrt(d_1^2 - (x_1-x)^2 - (y_1-y)^2) with h the LED mounting
    height; the h + sqrt(...) branch would put the receiver above the
    ceiling and is discarded.  A slightly negative radicand (numeric
    overshoot of the plan solve) is clamped to zero.
    """
    if d1 <= 0:
        raise ValueError("slant range must be positive")
    led = np.asarray(led1_position, float)
    radicand = d1 * d1 - (led[0] - xy[0]) ** 2 - (led[1] - xy[1]) ** 2
    if radicand < -_RADICAND_CLAMP:
        raise InconsistentGeometryError(
            f"slant range {d1} shorter than plan offset to the LED")
    return float(led[2] - math.sqrt(max(radicand, 0.0)))


def estimate_basic(obs: ObservationSet, scene: Scene, intr: CameraIntrinsics,
                   mode: str = "3d") -> PositionEstimate:
    """Run the closed-form pipeline on the three strongest visible LEDs.

    ``mode`` is ``'2d'`` (plan position only, receiver height known to
    the caller) or ``'3d'`` (height recovered from the strongest link).
    The strongest LED anchors the triangle as LED 1.
    """
    t0 = time.perf_counter()
    if mode not in ("2d", "3d"):
        raise ValueError("mode must be '2d' or '3d'")
    picked = select_strongest(obs, 3).observations
    leds = [scene.led_by_id(o.led_id) for o in picked]
    m = scene.lambertian_order

    rays = [pixel_to_camera_ray(intr, o.mean_pixel) for o in picked]
    psis = [incidence_angle(intr, o.mean_pixel) for o in picked]

    rho_12 = distance_ratio(picked[0].mean_power, picked[1].mean_power,
                            psis[0], psis[1], m)
    rho_13 = distance_ratio(picked[0].mean_power, picked[2].mean_power,
                            psis[0], psis[2], m)
    alpha_12 = inter_led_angle(rays[0], rays[1])
    alpha_13 = inter_led_angle(rays[0], rays[2])

    positions = np.array([led.position for led in leds])
    b12 = float(np.linalg.norm(positions[1] - positions[0]))
    b13 = float(np.linalg.norm(positions[2] - positions[0]))
    d1, d2, d3 = absolute_distances(rho_12, rho_13, alpha_12, alpha_13, b12, b13)

    xy = solve_plan_position(positions, np.array([d1, d2, d3]))
    z = recover_height(positions[0], xy, d1) if mode == "3d" else None

    # Consistency of the unused LED pair (2,3); zero for noise-free input.
    alpha_23 = inter_led_angle(rays[1], rays[2])
    b23 = float(np.linalg.norm(positions[2] - positions[1]))
    residual = abs(d2 * d2 + d3 * d3 - 2.0 * d2 * d3 * math.cos(alpha_23) - b23 * b23)

    return PositionEstimate(
        xy=xy, z=z, mode="basic", iterations=0, residual=residual,
        elapsed_s=time.perf_counter() - t0,
        extras={"distances": (d1, d2, d3),
                "led_ids": [o.led_id for o in picked]})
