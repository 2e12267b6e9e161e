"""Comparison algorithms: plain RSS-ratio and camera-assisted RSS-ratio.

Both baselines solve a nonlinear least-squares problem over the receiver
position with a neutral starting value (room centre), unlike the
closed-form path which needs no start at all.

* ``rssr``: uses power ratios only.  It must assume a receiver
  orientation to evaluate the incidence cosines; the ideal variant is
  granted the true tilt, the portable variant assumes the receiver is
  level.  Needs 4 LEDs for a plan fix and 5 for a full 3D fix.
* ``ca-rssr``: converts power ratios to distance ratios using the
  camera-measured incidence angles (orientation-free) and fits the
  position to those ratios.  Needs 3 LEDs in 2D and 5 in 3D.
* ``pnp``: the camera-only scheme participates in coverage counting
  (4 LEDs either way); its pose solver is external and not reproduced
  here.

The reconstruction of the plain RSS-ratio model follows the same
(m+2)-exponent ratio law used throughout this package.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientLedsError, NonFiniteResidualError, UnknownAlgorithmError
from .estimator import PositionEstimate, distance_ratio, incidence_angle
from .geometry import CameraIntrinsics, vec3
from .lm import LmOptions, solve
from .scene import Scene
from .sensing import ObservationSet

_EPS = 1e-9


@dataclass
class RssrMode:
    """Orientation knowledge granted to the plain RSS-ratio baseline."""

    variant: str  # 'ideal' (true tilt known) or 'portable' (assumes level)

    def __post_init__(self):
        if self.variant not in ("ideal", "portable"):
            raise ValueError("variant must be 'ideal' or 'portable'")


@dataclass
class LedRequirement:
    algorithm: str
    needed_2d: int
    needed_3d: int


_REQUIREMENTS = {
    "rssr": LedRequirement("rssr", 4, 5),
    "pnp": LedRequirement("pnp", 4, 4),
    "ca-rssr": LedRequirement("ca-rssr", 3, 5),
    "eca-rssr": LedRequirement("eca-rssr", 3, 3),
}


def required_leds(algorithm: str) -> LedRequirement:
    """LED counts sufficient for a plan / full position fix."""
    key = algorithm.lower()
    if key not in _REQUIREMENTS:
        raise UnknownAlgorithmError(f"unknown algorithm '{algorithm}'")
    return _REQUIREMENTS[key]


def _required(algorithm: str, dim: str) -> int:
    req = required_leds(algorithm)
    return req.needed_2d if dim == "2d" else req.needed_3d


def _ordered_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def _pack_start(scene: Scene, dim: str, known_z: float) -> np.ndarray:
    centre = scene.room / 2.0
    if dim == "2d":
        return centre[:2]
    return np.array([centre[0], centre[1], scene.room[2] / 2.0])


def estimate_rssr(obs: ObservationSet, scene: Scene, mode: RssrMode,
                  dim: str = "2d", lm: LmOptions | None = None,
                  known_z: float = 0.0) -> PositionEstimate:
    """Plain RSS-ratio positioning under an assumed receiver orientation.

    The fitted model for an ordered LED pair (i, j) is
        (d_i/d_j)^(m+2) * cos(psi_j)/cos(psi_i)
    with the incidence cosines taken against the assumed receiver
    normal.  A tilt the model does not know about therefore biases every
    ratio, which is the known weakness of this scheme.
    """
    t0 = time.perf_counter()
    if dim not in ("2d", "3d"):
        raise ValueError("dim must be '2d' or '3d'")
    visible = obs.visible_observations()
    need = _required("rssr", dim)
    if len(visible) < need:
        raise InsufficientLedsError(visible=len(visible), required=need)

    if mode.variant == "ideal":
        # Defining assumption of the ideal case: the true tilt is available.
        normal_world = obs.receiver_truth.rotation @ vec3(0, 0, 1)
    else:
        normal_world = vec3(0, 0, 1)

    led_positions = np.array([scene.led_by_id(o.led_id).position for o in visible])
    powers = np.array([o.mean_power for o in visible])
    if np.any(powers <= 0):
        raise NonFiniteResidualError("non-positive power reading")
    m = scene.lambertian_order
    pairs = _ordered_pairs(len(visible))

    def residual_fn(params: np.ndarray) -> np.ndarray:
        r = np.array([params[0], params[1], known_z]) if dim == "2d" else params
        diff = led_positions - r
        d = np.linalg.norm(diff, axis=1)
        cosp = (diff @ normal_world) / np.maximum(d, _EPS)
        if np.any(d < _EPS) or np.any(cosp < _EPS):
            raise NonFiniteResidualError("candidate outside the model domain")
        res = np.empty(len(pairs))
        for k, (i, j) in enumerate(pairs):
            res[k] = powers[j] / powers[i] - (d[i] / d[j]) ** (m + 2.0) * cosp[j] / cosp[i]
        return res

    result = solve(residual_fn, _pack_start(scene, dim, known_z), lm or LmOptions())
    sol = result.solution
    return PositionEstimate(
        xy=sol[:2], z=(None if dim == "2d" else float(sol[2])),
        mode=f"baseline-rssr-{mode.variant}", iterations=result.iterations,
        residual=result.final_cost, elapsed_s=time.perf_counter() - t0,
        converged=result.converged)


def estimate_ca_rssr(obs: ObservationSet, scene: Scene, intr: CameraIntrinsics,
                     dim: str = "2d", lm: LmOptions | None = None,
                     known_z: float = 0.0) -> PositionEstimate:
    """Camera-assisted RSS-ratio positioning (ratio-fit formulation).

    Distance ratios are measured once from powers and camera incidence
    angles, then the position is fitted so the geometric ratios
    |s_i - r| / |s_j - r| match them.
    """
    t0 = time.perf_counter()
    if dim not in ("2d", "3d"):
        raise ValueError("dim must be '2d' or '3d'")
    visible = obs.visible_observations()
    need = _required("ca-rssr", dim)
    if len(visible) < need:
        raise InsufficientLedsError(visible=len(visible), required=need)

    led_positions = np.array([scene.led_by_id(o.led_id).position for o in visible])
    powers = [o.mean_power for o in visible]
    psis = [incidence_angle(intr, o.mean_pixel) for o in visible]
    m = scene.lambertian_order
    pairs = _ordered_pairs(len(visible))
    measured = np.array([distance_ratio(powers[i], powers[j], psis[i], psis[j], m)
                         for (i, j) in pairs])

    def residual_fn(params: np.ndarray) -> np.ndarray:
        r = np.array([params[0], params[1], known_z]) if dim == "2d" else params
        d = np.linalg.norm(led_positions - r, axis=1)
        if np.any(d < _EPS):
            raise NonFiniteResidualError("candidate coincides with an LED")
        return np.array([measured[k] - d[i] / d[j] for k, (i, j) in enumerate(pairs)])

    result = solve(residual_fn, _pack_start(scene, dim, known_z), lm or LmOptions())
    sol = result.solution
    return PositionEstimate(
        xy=sol[:2], z=(None if dim == "2d" else float(sol[2])),
        mode="baseline-ca-rssr", iterations=result.iterations,
        residual=result.final_cost, elapsed_s=time.perf_counter() - t0,
        converged=result.converged)
