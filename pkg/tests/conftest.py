import numpy as np
import pytest

from vlpsim.channel import NoiseModel
from vlpsim.geometry import ReceiverPose, tilted_rotation, vec3
from vlpsim.scene import default_camera, default_pd, default_scene
from vlpsim.sensing import ImageNoiseModel, observe


@pytest.fixture
def scene():
    return default_scene()


@pytest.fixture
def pd():
    return default_pd()


@pytest.fixture
def intr():
    return default_camera()


@pytest.fixture
def no_noise():
    return NoiseModel(0.0, 1)


@pytest.fixture
def no_img_noise():
    return ImageNoiseModel(0.0, 1)


def face_up_pose(x, y, z=0.0):
    return ReceiverPose(position=vec3(x, y, z), rotation=np.eye(3))


def tilted_pose(x, y, z, tilt_deg, azimuth_deg=0.0, yaw_deg=0.0):
    rotation = tilted_rotation(np.radians(tilt_deg), np.radians(azimuth_deg),
                               np.radians(yaw_deg))
    return ReceiverPose(position=vec3(x, y, z), rotation=rotation)


def exact_observation(scene, pose, intr, pd, pd_offset=None):
    """Noise-free observation set for a pose."""
    return observe(scene, pose, intr, pd, NoiseModel(0.0, 1),
                   ImageNoiseModel(0.0, 1), rng_seed=0,
                   pd_offset_camera=pd_offset)


def _strongest_triangle_ok(scene, obs):
    """True when the three strongest visible LEDs span a usable triangle
    in plan view (degenerate selections cannot be positioned by any
    three-LED scheme and count as infeasible poses)."""
    from vlpsim.sensing import select_strongest

    picked = select_strongest(obs, 3).observations
    p = np.array([scene.led_by_id(o.led_id).position for o in picked])
    det = ((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1])
           - (p[1, 1] - p[0, 1]) * (p[2, 0] - p[0, 0]))
    return abs(det) > 1e-6


def random_feasible_pose(rng, scene, intr, pd, z_max=2.0, tilt_max_deg=20.0,
                         min_visible=3, pd_offset=None):
    """Sample a pose with enough visible LEDs and a usable strongest-three
    triangle, noise-free."""
    while True:
        pose = ReceiverPose(
            position=vec3(rng.uniform(0.2, scene.room[0] - 0.2),
                          rng.uniform(0.2, scene.room[1] - 0.2),
                          rng.uniform(0.0, z_max)),
            rotation=tilted_rotation(rng.uniform(0, np.radians(tilt_max_deg)),
                                     rng.uniform(0, 2 * np.pi),
                                     rng.uniform(0, 2 * np.pi)))
        obs = exact_observation(scene, pose, intr, pd, pd_offset)
        if (len(obs.visible_observations()) >= min_visible
                and _strongest_triangle_ok(scene, obs)):
            return pose, obs
