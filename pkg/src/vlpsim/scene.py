"""Room description and reference configuration defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import LedFixture, PdCharacteristics
from .geometry import CameraIntrinsics, Vec3, vec3

_HEIGHT_TOL = 1e-9


@dataclass
class Scene:
    """Room extents and the LED constellation.

    The estimators in this package assume all LEDs share one mounting
    height and one Lambertian order, which is validated on construction.
    The world origin sits in a floor corner with z up.
    """

    room: Vec3                      # length x width x height, metres
    leds: list[LedFixture] = field(default_factory=list)

    def __post_init__(self):
        self.room = np.asarray(self.room, dtype=float)
        if self.room.shape != (3,) or np.any(self.room <= 0):
            raise ValueError("room extents must be three positive lengths")
        if len(self.leds) < 3:
            raise ValueError("scene needs at least 3 LEDs")
        ids = [led.id for led in self.leds]
        if len(set(ids)) != len(ids):
            raise ValueError("LED ids must be unique")
        for led in self.leds:
            if np.any(led.position < -_HEIGHT_TOL) or np.any(led.position > self.room + _HEIGHT_TOL):
                raise ValueError(f"LED {led.id} lies outside the room")
        heights = {round(float(led.position[2]), 12) for led in self.leds}
        if len(heights) != 1:
            raise ValueError("all LEDs must share one mounting height")
        orders = {round(led.lambertian_order, 12) for led in self.leds}
        if len(orders) != 1:
            raise ValueError("all LEDs must share one Lambertian order")

    @property
    def led_height(self) -> float:
        return float(self.leds[0].position[2])

    @property
    def lambertian_order(self) -> float:
        return float(self.leds[0].lambertian_order)

    def led_by_id(self, led_id: int) -> LedFixture:
        for led in self.leds:
            if led.id == led_id:
                return led
        raise KeyError(f"no LED with id {led_id}")

    @property
    def aim_point(self) -> Vec3:
        """Centroid of the LED constellation (used to orient receivers)."""
        return np.mean([led.position for led in self.leds], axis=0)


def default_scene() -> Scene:
    """5 m x 5 m x 3 m reference room with five ceiling LEDs.

    Four LEDs sit over the corners of a 3 m square plus one over the room
    centre; 2.2 W transmit power and a 60 degree semi-angle each.
    """
    coords = [(1.0, 1.0), (1.0, 4.0), (4.0, 4.0), (4.0, 1.0), (2.5, 2.5)]
    leds = [LedFixture(id=i + 1, position=vec3(x, y, 3.0),
                       semiangle_deg=60.0, transmit_power=2.2)
            for i, (x, y) in enumerate(coords)]
    return Scene(room=vec3(5.0, 5.0, 3.0), leds=leds)


def default_pd(fov_deg: float = 60.0) -> PdCharacteristics:
    """Reference photodiode: 1 cm^2 detector, unity filter gain,
    refractive index 1.5 concentrator, 0.5 A/W responsivity."""
    return PdCharacteristics(area=1e-4, filter_gain=1.0,
                             concentrator_index=1.5, fov_deg=fov_deg,
                             responsivity=0.5)


def default_camera() -> CameraIntrinsics:
    """Reference 640x480 camera with principal point (320, 240) and
    normalised focal lengths f_u = f_v = 800 px."""
    return CameraIntrinsics.from_pixel_geometry(
        f_u=800.0, f_v=800.0, u0=320.0, v0=240.0, width=640.0, height=480.0)
