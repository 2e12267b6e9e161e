"""Offset-compensation steps, residuals, and dispatch."""

import numpy as np
import pytest

from conftest import exact_observation, face_up_pose, random_feasible_pose
from vlpsim.compensation import (
    CompensationConfig,
    estimate,
    estimate_compensated,
    estimate_rotation,
    led_camera_coords,
    pd_incidence,
    pd_world_position,
    rssr_residuals,
)
from vlpsim.errors import SingularConfigurationError
from vlpsim.estimator import estimate_basic, incidence_angle
from vlpsim.geometry import vec3, world_to_camera
from vlpsim.sensing import select_strongest

UP = vec3(0, 0, 1)


def picked_pixels_and_leds(scene, obs, intr):
    picked = select_strongest(obs, 3).observations
    pixels = [o.mean_pixel for o in picked]
    led_positions = np.array([scene.led_by_id(o.led_id).position for o in picked])
    return picked, pixels, led_positions


class TestLedCameraCoords:
    def test_true_candidate_recovers_camera_coords(self, scene, pd, intr):
        rng = np.random.default_rng(1)
        pose, obs = random_feasible_pose(rng, scene, intr, pd)
        _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        coords = led_camera_coords(pixels, intr, led_positions, pose.position)
        for row, led in zip(coords, led_positions):
            np.testing.assert_allclose(row, world_to_camera(pose, led), atol=1e-9)

    def test_on_axis_led(self, scene, pd, intr):
        pose = face_up_pose(2.5, 2.5)
        obs = exact_observation(scene, pose, intr, pd)
        px = obs.observations[4].mean_pixel  # LED directly overhead
        coords = led_camera_coords([px], intr,
                                   np.array([scene.leds[4].position]), pose.position)
        np.testing.assert_allclose(coords[0], [0.0, 0.0, 3.0], atol=1e-12)

    def test_linear_in_candidate_distance(self, scene, pd, intr):
        pose = face_up_pose(2.5, 2.5)
        obs = exact_observation(scene, pose, intr, pd)
        px = obs.observations[4].mean_pixel
        led = np.array([scene.leds[4].position])
        near = led_camera_coords([px], intr, led, vec3(2.5, 2.5, 1.5))
        far = led_camera_coords([px], intr, led, vec3(2.5, 2.5, 0.0))
        np.testing.assert_allclose(far[0], 2.0 * near[0], atol=1e-12)


class TestPdIncidence:
    def test_zero_offset_equals_camera_angle(self, scene, pd, intr):
        pose = face_up_pose(1.5, 2.0)
        obs = exact_observation(scene, pose, intr, pd)
        _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        coords = led_camera_coords(pixels, intr, led_positions, pose.position)
        cfg = CompensationConfig(pd_offset_camera=vec3(0, 0, 0))
        for row, px in zip(coords, pixels):
            assert pd_incidence(row, cfg, UP) == pytest.approx(
                incidence_angle(intr, px), abs=1e-12)

    def test_aligned_link_gives_zero(self):
        cfg = CompensationConfig(pd_offset_camera=vec3(0.1, 0.0, 0.0))
        assert pd_incidence(vec3(0.1, 0.0, 2.0), cfg, UP) == pytest.approx(0.0)

    def test_matches_world_frame_geometry(self, scene, pd, intr):
        offset = vec3(0.2, 0.0, 0.0)
        rng = np.random.default_rng(2)
        pose, obs = random_feasible_pose(rng, scene, intr, pd, pd_offset=offset)
        _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        coords = led_camera_coords(pixels, intr, led_positions, pose.position)
        cfg = CompensationConfig(pd_offset_camera=offset)
        pd_world = pose.position + pose.rotation @ offset
        normal_world = pose.rotation @ UP
        for row, led in zip(coords, led_positions):
            link = led - pd_world
            true_angle = np.arccos(float(link @ normal_world) / np.linalg.norm(link))
            assert pd_incidence(row, cfg, UP) == pytest.approx(true_angle, abs=1e-9)


class TestRotationEstimate:
    def test_aligned_frames_give_identity(self, scene, pd, intr):
        pose = face_up_pose(1.5, 2.5)
        obs = exact_observation(scene, pose, intr, pd)
        _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        coords = led_camera_coords(pixels, intr, led_positions, pose.position)
        rot, raw = estimate_rotation(coords, led_positions, pose.position)
        np.testing.assert_allclose(rot, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(raw, np.eye(3), atol=1e-6)

    def test_recovers_known_rotation(self, scene, pd, intr):
        rng = np.random.default_rng(3)
        for _ in range(25):
            pose, obs = random_feasible_pose(rng, scene, intr, pd)
            _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
            coords = led_camera_coords(pixels, intr, led_positions, pose.position)
            rot, _ = estimate_rotation(coords, led_positions, pose.position)
            assert np.linalg.norm(rot - pose.rotation) < 1e-6
            np.testing.assert_allclose(rot.T @ rot, np.eye(3), atol=1e-12)

    def test_coplanar_rays_rejected(self):
        coords = np.array([[0.5, 0.0, 1.0], [-0.3, 0.0, 1.0], [0.1, 0.0, 1.0]])
        world = np.array([[1.0, 1.0, 3.0], [1.0, 4.0, 3.0], [4.0, 4.0, 3.0]])
        with pytest.raises(SingularConfigurationError):
            estimate_rotation(coords, world, vec3(2.0, 2.0, 0.0))


class TestPdWorldPosition:
    def test_zero_offset_returns_candidate(self):
        cfg = CompensationConfig(pd_offset_camera=vec3(0, 0, 0))
        np.testing.assert_allclose(
            pd_world_position(np.eye(3), cfg, vec3(1, 2, 0)), [1, 2, 0])

    def test_identity_rotation_adds_offset(self):
        cfg = CompensationConfig(pd_offset_camera=vec3(0.1, 0.0, 0.0))
        np.testing.assert_allclose(
            pd_world_position(np.eye(3), cfg, vec3(1, 1, 0)), [1.1, 1, 0])

    def test_matches_truth_at_true_candidate(self, scene, pd, intr):
        offset = vec3(0.15, -0.05, 0.0)
        rng = np.random.default_rng(4)
        pose, obs = random_feasible_pose(rng, scene, intr, pd, pd_offset=offset)
        _, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        coords = led_camera_coords(pixels, intr, led_positions, pose.position)
        cfg = CompensationConfig(pd_offset_camera=offset)
        rot, _ = estimate_rotation(coords, led_positions, pose.position)
        np.testing.assert_allclose(
            pd_world_position(rot, cfg, pose.position),
            pose.position + pose.rotation @ offset, atol=1e-9)


class TestResiduals:
    def test_zero_at_truth_for_any_offset(self, scene, pd, intr):
        rng = np.random.default_rng(5)
        for offset in (vec3(0, 0, 0), vec3(0.2, 0, 0), vec3(0.1, -0.15, 0.05)):
            cfg = CompensationConfig(pd_offset_camera=offset)
            pose, obs = random_feasible_pose(rng, scene, intr, pd, pd_offset=offset)
            res = rssr_residuals(obs, scene, intr, cfg, UP, pose.position)
            assert np.linalg.norm(res) < 1e-9

    def test_zero_offset_reduces_to_plain_ratio_mismatch(self, scene, pd, intr):
        pose = face_up_pose(1.4, 2.1)
        obs = exact_observation(scene, pose, intr, pd)
        cfg = CompensationConfig(pd_offset_camera=vec3(0, 0, 0))
        candidate = vec3(2.0, 2.0, 0.0)
        res = rssr_residuals(obs, scene, intr, cfg, UP, candidate)
        picked, pixels, led_positions = picked_pixels_and_leds(scene, obs, intr)
        powers = [o.mean_power for o in picked]
        m = scene.lambertian_order
        rays = [vec3((px[0] - intr.u0) / intr.f_u, (px[1] - intr.v0) / intr.f_v, 1.0)
                for px in pixels]
        d = np.linalg.norm(led_positions - candidate, axis=1)
        cosp = np.array([1.0 / np.linalg.norm(r) for r in rays])
        pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        expected = [powers[j] / powers[i]
                    - (d[i] / d[j]) ** (m + 2.0) * (cosp[j] / cosp[i])
                    for i, j in pairs]
        np.testing.assert_allclose(res, expected, atol=1e-12)

    def test_pair_swap_antisymmetry_near_truth(self, scene, pd, intr):
        # for a pair with equal measured powers, f_ij = 1 - g and
        # f_ji = 1 - 1/g: antisymmetric to first order in (g - 1), so the
        # sum is second-order small near the true position
        pose = face_up_pose(2.5, 2.5)
        obs = exact_observation(scene, pose, intr, pd)
        cfg = CompensationConfig(pd_offset_camera=vec3(0, 0, 0))
        # displace along y to break the symmetry between the two picked
        # corner LEDs (they differ only in their y coordinate)
        candidate = vec3(2.5, 2.5 + 1e-3, 0.0)
        res = rssr_residuals(obs, scene, intr, cfg, UP, candidate)
        pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        lookup = {pair: val for pair, val in zip(pairs, res)}
        # picked order at the centre is LED ids [5, 1, 2]; indices 1 and 2
        # are the equal-power corner LEDs
        f_ij, f_ji = lookup[(1, 2)], lookup[(2, 1)]
        assert abs(f_ij) > 1e-12  # not trivially zero away from the truth
        assert f_ij == pytest.approx(-f_ji, rel=1e-3)
        assert abs(f_ij + f_ji) < 1e-3 * abs(f_ij)


class TestEstimateCompensated:
    def test_zero_offset_matches_basic(self, scene, pd, intr):
        pose = face_up_pose(1.7, 2.4)
        obs = exact_observation(scene, pose, intr, pd)
        cfg = CompensationConfig(pd_offset_camera=vec3(0, 0, 0))
        basic = estimate_basic(obs, scene, intr, "2d")
        comp = estimate_compensated(obs, scene, intr, cfg, "2d", known_z=0.0)
        assert np.linalg.norm(comp.xy - basic.xy) < 1e-6

    def test_exact_plan_recovery_with_large_offset(self, scene, pd, intr):
        offset = vec3(0.2, 0.0, 0.0)
        cfg = CompensationConfig(pd_offset_camera=offset)
        rng = np.random.default_rng(6)
        for _ in range(25):
            pose, obs = random_feasible_pose(rng, scene, intr, pd, z_max=0.0,
                                             pd_offset=offset)
            est = estimate_compensated(obs, scene, intr, cfg, "2d", known_z=0.0)
            assert np.linalg.norm(est.xy - pose.position[:2]) < 1e-3

    def test_never_worse_than_start_cost(self, scene, pd, intr):
        offset = vec3(0.2, 0.0, 0.0)
        cfg = CompensationConfig(pd_offset_camera=offset)
        rng = np.random.default_rng(7)
        for _ in range(10):
            pose, obs = random_feasible_pose(rng, scene, intr, pd, pd_offset=offset)
            basic = estimate_basic(obs, scene, intr, "3d")
            start_res = rssr_residuals(obs, scene, intr, cfg, UP, basic.position())
            comp = estimate_compensated(obs, scene, intr, cfg, "3d")
            assert comp.residual <= float(start_res @ start_res) + 1e-15


class TestDispatch:
    def test_small_offset_uses_basic(self, scene, pd, intr):
        obs = exact_observation(scene, face_up_pose(2.0, 2.0), intr, pd)
        cfg = CompensationConfig(pd_offset_camera=vec3(0.01, 0, 0), threshold=0.06)
        assert estimate(obs, scene, intr, cfg, "2d").mode == "basic"

    def test_large_offset_uses_compensation(self, scene, pd, intr):
        offset = vec3(0.10, 0, 0)
        obs = exact_observation(scene, face_up_pose(2.0, 2.0), intr, pd,
                                pd_offset=offset)
        cfg = CompensationConfig(pd_offset_camera=offset, threshold=0.06)
        assert estimate(obs, scene, intr, cfg, "2d").mode == "compensated"

    def test_boundary_stays_basic(self, scene, pd, intr):
        obs = exact_observation(scene, face_up_pose(2.0, 2.0), intr, pd)
        cfg = CompensationConfig(pd_offset_camera=vec3(0.06, 0, 0), threshold=0.06)
        assert estimate(obs, scene, intr, cfg, "2d").mode == "basic"
