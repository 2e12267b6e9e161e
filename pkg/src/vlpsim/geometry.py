"""Coordinate frames, rotations, and the pinhole camera model.

Conventions used throughout the package:

* World frame: right-handed, origin in a room corner, z up.
* Camera frame: right-handed, camera looks along its +z axis.
* Pixel frame: origin in the upper-left image corner, u right, v down.
* A receiver pose stores the camera position in world coordinates and
  the camera-to-world rotation matrix R, so a world point maps into the
  camera frame as ``R.T @ (p - position)``.

Pixel coordinates stay continuous reals; quantisation to integer pixels
is never applied (measurement noise dominates and the sensor resolution
only matters for containment tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BehindCameraError, DegenerateRayError

# A Vec3 is a plain float ndarray of shape (3,).
Vec3 = np.ndarray

_DEGENERATE_NORM = 1e-12


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=float)


def unit(v: Vec3) -> Vec3:
    """Normalise ``v`` to unit length."""
    n = np.linalg.norm(v)
    if n < _DEGENERATE_NORM:
        raise DegenerateRayError(f"cannot normalise near-zero vector {v}")
    return np.asarray(v, dtype=float) / n


def rotation_about_axis(axis: Vec3, angle: float) -> np.ndarray:
    """Rotation matrix for a rotation of ``angle`` radians about ``axis``.

    Rodrigues' formula; ``axis`` need not be normalised.
    """
    k = unit(axis)
    kx = np.array([[0.0, -k[2], k[1]],
                   [k[2], 0.0, -k[0]],
                   [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * kx + (1.0 - np.cos(angle)) * (kx @ kx)


def tilted_rotation(tilt: float, axis_azimuth: float, yaw: float = 0.0) -> np.ndarray:
    """Camera-to-world rotation for a receiver tilted away from vertical.

    Starting from the face-up orientation (camera axis along world +z),
    the frame is first spun by ``yaw`` about its optical axis, then
    tilted by ``tilt`` radians about the horizontal axis with azimuth
    ``axis_azimuth``.
    """
    axis = vec3(np.cos(axis_azimuth), np.sin(axis_azimuth), 0.0)
    return rotation_about_axis(axis, tilt) @ rotation_about_axis(vec3(0, 0, 1), yaw)


def aimed_rotation(position: Vec3, target: Vec3) -> np.ndarray:
    """Camera-to-world rotation pointing the optical axis from ``position``
    at ``target``.

    Falls back to the face-up orientation when the two points coincide.
    The roll about the optical axis is fixed by keeping the camera x axis
    horizontal where possible.
    """
    d = np.asarray(target, float) - np.asarray(position, float)
    n = np.linalg.norm(d)
    if n < _DEGENERATE_NORM:
        return np.eye(3)
    z = d / n
    helper = vec3(0, 0, 1) if abs(z[2]) < 1.0 - 1e-9 else vec3(1, 0, 0)
    x = np.cross(helper, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


def is_rotation(matrix: np.ndarray, tol: float = 1e-9) -> bool:
    """True when ``matrix`` is orthonormal with determinant +1 within ``tol``."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        return False
    return (np.allclose(m.T @ m, np.eye(3), atol=tol)
            and abs(np.linalg.det(m) - 1.0) <= tol)


def nearest_rotation(matrix: np.ndarray) -> np.ndarray:
    """Project a 3x3 matrix to the nearest proper rotation (Frobenius norm).

    Computed from the SVD orthogonal factor with the determinant sign
    folded into the last singular direction.
    """
    u, _, vt = np.linalg.svd(np.asarray(matrix, dtype=float))
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed random rotation (QR of a Gaussian matrix)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


@dataclass
class CameraIntrinsics:
    """Pinhole camera parameters.

    ``f_u``/``f_v`` are the focal lengths normalised to pixels,
    ``(u0, v0)`` the principal point, ``width``/``height`` the sensor
    bounds in pixels.  ``pixel_pitch_x``/``pixel_pitch_y`` (metres per
    pixel) and ``focal_length`` (metres) tie the pixel scale back to
    physical image-plane coordinates; they must satisfy
    ``f_u == focal_length / pixel_pitch_x`` (same for v).
    """

    f_u: float
    f_v: float
    u0: float
    v0: float
    width: float
    height: float
    pixel_pitch_x: float
    pixel_pitch_y: float
    focal_length: float

    def __post_init__(self):
        if self.f_u <= 0 or self.f_v <= 0:
            raise ValueError("normalised focal lengths must be positive")
        if not (0 < self.u0 < self.width and 0 < self.v0 < self.height):
            raise ValueError("principal point must lie inside the sensor")
        for f_px, pitch in ((self.f_u, self.pixel_pitch_x), (self.f_v, self.pixel_pitch_y)):
            if abs(f_px - self.focal_length / pitch) > 1e-9 * max(1.0, f_px):
                raise ValueError("focal_length / pixel_pitch must equal the pixel focal length")

    @classmethod
    def from_pixel_geometry(cls, f_u: float, f_v: float, u0: float, v0: float,
                            width: float, height: float,
                            focal_length: float = 4e-3) -> "CameraIntrinsics":
        """Build intrinsics from pixel-level parameters.

        The physical focal length only fixes the metric scale of the
        image plane; every estimate in this package is invariant to it,
        so a nominal 4 mm lens is assumed unless stated.
        """
        return cls(f_u=f_u, f_v=f_v, u0=u0, v0=v0, width=width, height=height,
                   pixel_pitch_x=focal_length / f_u,
                   pixel_pitch_y=focal_length / f_v,
                   focal_length=focal_length)


@dataclass
class ReceiverPose:
    """Camera position in world coordinates plus camera-to-world rotation."""

    position: Vec3
    rotation: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.rotation = np.asarray(self.rotation, dtype=float)
        if self.position.shape != (3,):
            raise ValueError("position must be a 3-vector")
        if not is_rotation(self.rotation):
            raise ValueError("rotation must be orthonormal with determinant +1")


def world_to_camera(pose: ReceiverPose, p_world: Vec3) -> Vec3:
    """Map a world point into the camera frame: ``R.T @ (p - position)``."""
    return pose.rotation.T @ (np.asarray(p_world, float) - pose.position)


def camera_to_world(pose: ReceiverPose, p_camera: Vec3) -> Vec3:
    """Inverse of :func:`world_to_camera`."""
    return pose.rotation @ np.asarray(p_camera, float) + pose.position


def project_to_pixel(intr: CameraIntrinsics, p_camera: Vec3) -> np.ndarray:
    """Project a camera-frame point to continuous pixel coordinates.

    Raises :class:`BehindCameraError` for points with non-positive depth.
    """
    x, y, z = np.asarray(p_camera, float)
    if z <= 0.0:
        raise BehindCameraError(f"point has non-positive depth z={z}")
    return np.array([intr.f_u * x / z + intr.u0,
                     intr.f_v * y / z + intr.v0])


def pixel_to_camera_ray(intr: CameraIntrinsics, px: np.ndarray) -> Vec3:
    """Back-project a pixel to the camera-frame ray ((u-u0)/f_u, (v-v0)/f_v, 1).

    The ray is left un-normalised; its direction is what matters and its
    z component is one by construction.
    """
    u, v = np.asarray(px, float)
    return np.array([(u - intr.u0) / intr.f_u, (v - intr.v0) / intr.f_v, 1.0])


def in_frame(intr: CameraIntrinsics, px: np.ndarray) -> bool:
    """True when the pixel lies within the sensor bounds [0,w] x [0,h]."""
    u, v = np.asarray(px, float)
    return bool(0.0 <= u <= intr.width and 0.0 <= v <= intr.height)


def inter_led_angle(ray_i: Vec3, ray_j: Vec3) -> float:
    """Angle in [0, pi] between two direction vectors.

    Frame invariant: rotating both rays by the same rotation leaves the
    angle unchanged, so camera-frame rays give the same separation angle
    as the corresponding world-frame link vectors.
    """
    ri = np.asarray(ray_i, float)
    rj = np.asarray(ray_j, float)
    ni = np.linalg.norm(ri)
    nj = np.linalg.norm(rj)
    if ni < _DEGENERATE_NORM or nj < _DEGENERATE_NORM:
        raise DegenerateRayError("zero-length ray")
    c = np.dot(ri, rj) / (ni * nj)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))
