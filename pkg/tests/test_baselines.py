"""Nonlinear least-squares baselines and LED requirements."""

import numpy as np
import pytest

from conftest import exact_observation, face_up_pose, random_feasible_pose, tilted_pose
from vlpsim.baselines import RssrMode, estimate_ca_rssr, estimate_rssr, required_leds
from vlpsim.channel import calibrate_noise
from vlpsim.errors import InsufficientLedsError, UnknownAlgorithmError
from vlpsim.sensing import ImageNoiseModel, ObservationSet, observe


class TestRequiredLeds:
    @pytest.mark.parametrize("algorithm,needed_2d,needed_3d", [
        ("rssr", 4, 5),
        ("pnp", 4, 4),
        ("ca-rssr", 3, 5),
        ("eca-rssr", 3, 3),
    ])
    def test_table(self, algorithm, needed_2d, needed_3d):
        req = required_leds(algorithm)
        assert (req.needed_2d, req.needed_3d) == (needed_2d, needed_3d)

    def test_unknown_algorithm(self):
        with pytest.raises(UnknownAlgorithmError):
            required_leds("fingerprinting")


class TestRssr:
    def test_exact_when_level(self, scene, pd, intr):
        pose = face_up_pose(1.9, 2.8)
        obs = exact_observation(scene, pose, intr, pd)
        for variant in ("ideal", "portable"):
            est = estimate_rssr(obs, scene, RssrMode(variant), "2d", known_z=0.0)
            assert np.linalg.norm(est.xy - pose.position[:2]) < 1e-6

    def test_exact_3d_when_level(self, scene, pd, intr):
        pose = face_up_pose(2.1, 2.9, 0.4)
        obs = exact_observation(scene, pose, intr, pd)
        est = estimate_rssr(obs, scene, RssrMode("ideal"), "3d")
        assert np.linalg.norm(est.position() - pose.position) < 1e-6

    def test_ideal_handles_tilt_portable_does_not(self, scene, pd, intr):
        pose = tilted_pose(2.2, 2.4, 0.0, tilt_deg=5.0, azimuth_deg=30.0)
        obs = exact_observation(scene, pose, intr, pd)
        ideal = estimate_rssr(obs, scene, RssrMode("ideal"), "2d", known_z=0.0)
        portable = estimate_rssr(obs, scene, RssrMode("portable"), "2d", known_z=0.0)
        pe_ideal = np.linalg.norm(ideal.xy - pose.position[:2])
        pe_portable = np.linalg.norm(portable.xy - pose.position[:2])
        assert pe_ideal < 1e-6
        assert pe_portable > 2.0 * max(pe_ideal, 1e-9)

    def test_zero_tilt_variants_identical(self, scene, pd, intr):
        pose = face_up_pose(1.2, 3.3)
        obs = exact_observation(scene, pose, intr, pd)
        a = estimate_rssr(obs, scene, RssrMode("ideal"), "2d", known_z=0.0)
        b = estimate_rssr(obs, scene, RssrMode("portable"), "2d", known_z=0.0)
        np.testing.assert_array_equal(a.xy, b.xy)

    def test_insufficient_leds(self, scene, pd, intr):
        obs = exact_observation(scene, face_up_pose(2.5, 2.5), intr, pd)
        trimmed = ObservationSet(observations=obs.observations[:3],
                                 receiver_truth=obs.receiver_truth)
        with pytest.raises(InsufficientLedsError):
            estimate_rssr(trimmed, scene, RssrMode("portable"), "2d")


class TestCaRssr:
    def test_exact_plan_fix(self, scene, pd, intr):
        rng = np.random.default_rng(12)
        for _ in range(10):
            pose, obs = random_feasible_pose(rng, scene, intr, pd, z_max=0.0)
            est = estimate_ca_rssr(obs, scene, intr, "2d", known_z=0.0)
            assert np.linalg.norm(est.xy - pose.position[:2]) < 1e-6

    def test_orientation_free(self, scene, pd, intr):
        pose = tilted_pose(2.0, 2.6, 0.0, tilt_deg=12.0, azimuth_deg=75.0)
        obs = exact_observation(scene, pose, intr, pd)
        est = estimate_ca_rssr(obs, scene, intr, "2d", known_z=0.0)
        assert np.linalg.norm(est.xy - pose.position[:2]) < 1e-6

    def test_3d_needs_five(self, scene, pd, intr):
        obs = exact_observation(scene, face_up_pose(2.5, 2.5), intr, pd)
        trimmed = ObservationSet(observations=obs.observations[:4],
                                 receiver_truth=obs.receiver_truth)
        with pytest.raises(InsufficientLedsError):
            estimate_ca_rssr(trimmed, scene, intr, "3d")

    def test_noisy_accuracy_comparable(self, scene, pd, intr):
        """Sanity: with reference noise both camera-assisted schemes stay
        at centimetre scale on the floor plane."""
        noise = calibrate_noise(scene, pd, face_up_pose(0, 0), 13.6,
                                rss_samples_averaged=1000)
        img = ImageNoiseModel(2.5 * np.sqrt(10), 10)
        rng = np.random.default_rng(3)
        pes = []
        for k in range(60):
            pose = face_up_pose(rng.uniform(0.5, 4.5), rng.uniform(0.5, 4.5))
            obs = observe(scene, pose, intr, pd, noise, img, rng_seed=k)
            est = estimate_ca_rssr(obs, scene, intr, "2d", known_z=0.0)
            pes.append(np.linalg.norm(est.xy - pose.position[:2]))
        assert np.median(pes) < 0.05
