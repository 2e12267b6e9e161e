"""Optical channel gains, received power, SNR, and noise calibration."""

import math

import numpy as np
import pytest

from conftest import face_up_pose, tilted_pose
from vlpsim.channel import (
    LedFixture,
    NoiseModel,
    calibrate_noise,
    concentrator_gain,
    dc_gain,
    lambertian_order,
    received_power,
    sample_measured_power,
    snr_db,
)
from vlpsim.errors import (
    NonPositiveDistanceError,
    NoVisibleLinkError,
    ZeroNoiseError,
)
from vlpsim.geometry import vec3


def make_led(semiangle=60.0, power=2.2, position=(2.5, 2.5, 3.0)):
    return LedFixture(id=1, position=vec3(*position), semiangle_deg=semiangle,
                      transmit_power=power)


class TestLambertianOrder:
    def test_sixty_degree_semiangle_gives_order_one(self):
        # -ln 2 / ln cos 60 = -ln 2 / ln 0.5 = 1
        assert lambertian_order(60.0) == pytest.approx(1.0, abs=1e-12)

    def test_narrower_semiangle_raises_order(self):
        assert lambertian_order(30.0) > lambertian_order(60.0)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            lambertian_order(90.0)


class TestConcentratorGain:
    def test_inside_fov(self, pd):
        # n^2 / sin^2(60 deg) = 2.25 / 0.75 = 3 at any admitted angle
        assert concentrator_gain(pd, math.radians(30)) == pytest.approx(3.0)

    def test_outside_fov_is_zero(self, pd):
        assert concentrator_gain(pd, math.radians(61)) == 0.0

    def test_boundary_included(self, pd):
        assert concentrator_gain(pd, pd.fov_rad) == pytest.approx(3.0)


class TestDcGain:
    def test_hand_evaluated_reference_link(self, pd):
        # (m+1) A / (2 pi d^2) * T_s * g * 1:  2e-4 / (2 pi 9) * 3
        led = make_led()
        expected = 2.0 * 1e-4 / (2.0 * math.pi * 9.0) * 1.0 * 3.0
        assert dc_gain(led, pd, 3.0, 0.0, 0.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.0610329539e-5, rel=1e-9)

    def test_cutoff_beyond_fov(self, pd):
        led = make_led()
        assert dc_gain(led, pd, 3.0, 0.0, math.radians(75)) == 0.0

    def test_inverse_square_law(self, pd):
        led = make_led()
        h1 = dc_gain(led, pd, 2.0, 0.2, 0.3)
        h2 = dc_gain(led, pd, 4.0, 0.2, 0.3)
        assert h2 == pytest.approx(h1 / 4.0, rel=1e-12)

    def test_nonpositive_distance_rejected(self, pd):
        with pytest.raises(NonPositiveDistanceError):
            dc_gain(make_led(), pd, 0.0, 0.0, 0.0)

    def test_continuous_in_distance_and_irradiance(self, pd):
        led = make_led()
        eps = 1e-9
        base = dc_gain(led, pd, 2.0, 0.4, 0.3)
        assert dc_gain(led, pd, 2.0 + eps, 0.4, 0.3) == pytest.approx(base, rel=1e-6)
        assert dc_gain(led, pd, 2.0, 0.4 + eps, 0.3) == pytest.approx(base, rel=1e-6)

    def test_discontinuous_only_at_fov_cutoff(self, pd):
        led = make_led()
        eps = 1e-9
        inside = dc_gain(led, pd, 2.0, 0.3, pd.fov_rad - eps)
        outside = dc_gain(led, pd, 2.0, 0.3, pd.fov_rad + eps)
        assert inside > 0.0
        assert outside == 0.0


class TestReceivedPower:
    def test_directly_below(self, pd):
        led = make_led()
        p = received_power(led, pd, vec3(2.5, 2.5, 0.0), vec3(0, 0, 1))
        assert p == pytest.approx(2.2 * 1.0610329539e-5, rel=1e-9)

    def test_symmetric_links_equal(self, scene, pd):
        centre = vec3(2.5, 2.5, 0.0)
        up = vec3(0, 0, 1)
        powers = [received_power(led, pd, centre, up) for led in scene.leds[:4]]
        assert max(powers) == pytest.approx(min(powers), rel=1e-12)

    def test_ratio_matches_closed_form(self, scene, pd):
        # power ratio between equal-height links collapses to
        # (d_i/d_j)^(m+2) cos(psi_j)/cos(psi_i) for a face-up receiver
        rng = np.random.default_rng(5)
        up = vec3(0, 0, 1)
        m = scene.lambertian_order
        for _ in range(25):
            pos = vec3(rng.uniform(0.5, 4.5), rng.uniform(0.5, 4.5), rng.uniform(0, 2))
            led_i, led_j = scene.leds[0], scene.leds[2]
            p_i = received_power(led_i, pd, pos, up)
            p_j = received_power(led_j, pd, pos, up)
            if p_i == 0.0 or p_j == 0.0:
                continue
            d_i = np.linalg.norm(led_i.position - pos)
            d_j = np.linalg.norm(led_j.position - pos)
            cos_i = (led_i.position[2] - pos[2]) / d_i
            cos_j = (led_j.position[2] - pos[2]) / d_j
            closed_form = (d_i / d_j) ** (m + 2.0) * (cos_j / cos_i)
            assert p_j / p_i == pytest.approx(closed_form, rel=1e-12)


class TestSnr:
    def test_unity_ratio_is_zero_db(self, pd):
        noise = NoiseModel(current_noise_std=1e-6)
        assert snr_db(pd, noise, 1e-6 / pd.responsivity) == pytest.approx(0.0, abs=1e-9)

    def test_decade_is_twenty_db(self, pd):
        noise = NoiseModel(current_noise_std=1e-6)
        assert snr_db(pd, noise, 1e-5 / pd.responsivity) == pytest.approx(20.0, abs=1e-9)

    def test_zero_noise_undefined(self, pd):
        with pytest.raises(ZeroNoiseError):
            snr_db(pd, NoiseModel(0.0), 1e-6)

    def test_monotone_in_power(self, pd):
        noise = NoiseModel(1e-6)
        values = [snr_db(pd, noise, p) for p in (1e-7, 1e-6, 1e-5)]
        assert values == sorted(values)


class TestCalibration:
    def test_definitional_round_trip(self, scene, pd):
        pose = face_up_pose(0.0, 0.0)
        noise = calibrate_noise(scene, pd, pose, 13.6)
        up = vec3(0, 0, 1)
        powers = [received_power(led, pd, pose.position, up) for led in scene.leds]
        weakest = min(p for p in powers if p > 0)
        assert snr_db(pd, noise, weakest) == pytest.approx(13.6, abs=1e-9)

    def test_target_scaling(self, scene, pd):
        pose = face_up_pose(0.0, 0.0)
        low = calibrate_noise(scene, pd, pose, 13.6)
        high = calibrate_noise(scene, pd, pose, 20.0)
        assert low.current_noise_std / high.current_noise_std == pytest.approx(
            10.0 ** ((20.0 - 13.6) / 20.0), rel=1e-12)

    def test_no_visible_link(self, scene, pd):
        looking_down = tilted_pose(2.5, 2.5, 1.0, tilt_deg=180.0)
        with pytest.raises(NoVisibleLinkError):
            calibrate_noise(scene, pd, looking_down, 13.6)


class TestSampling:
    def test_zero_noise_exact(self, pd):
        noise = NoiseModel(0.0, 1000)
        assert sample_measured_power(1e-5, pd, noise, 42) == 1e-5

    def test_fixed_seed_repeatable(self, pd):
        noise = NoiseModel(1e-6, 100)
        a = sample_measured_power(1e-5, pd, noise, 7)
        b = sample_measured_power(1e-5, pd, noise, 7)
        assert a == b

    def test_averaging_reduces_std(self, pd):
        # std of the averaged reading = sigma / (R_p sqrt(n))
        sigma, n, p_true = 2e-6, 1000, 1e-5
        noise = NoiseModel(sigma, n)
        draws = np.array([sample_measured_power(p_true, pd, noise, seed)
                          for seed in range(10_000)])
        expected = sigma / (pd.responsivity * math.sqrt(n))
        assert draws.std() == pytest.approx(expected, rel=0.10)
        assert draws.mean() == pytest.approx(p_true, rel=1e-3)
