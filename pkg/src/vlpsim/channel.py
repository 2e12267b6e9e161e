"""Lambertian line-of-sight optical channel and photodiode noise model.

A ceiling LED with generalised Lambertian order m illuminates a
photodiode (PD).  The channel DC gain between them is

    H = (m+1) * A / (2 pi d^2) * cos(phi)^m * T_s * g(psi) * cos(psi)

with d the link distance, phi the irradiance angle at the LED, psi the
incidence angle at the PD, A the detector area, T_s the optical filter
gain and g the concentrator gain.  The concentrator passes light only
inside the PD field of view: g = n^2 / sin^2(Psi_c) for psi <= Psi_c and
zero beyond.  Received optical power is P_t * H, converted to a
photocurrent by the responsivity R_p and disturbed by additive white
Gaussian current noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonPositiveDistanceError,
    NoVisibleLinkError,
    ZeroNoiseError,
)
from .geometry import Vec3, vec3

_EPS = 1e-12


def lambertian_order(semiangle_deg: float) -> float:
    """Lambertian mode number from the half-power semi-angle, -ln2/ln(cos)."""
    if not 0.0 < semiangle_deg < 90.0:
        raise ValueError("semi-angle must be in (0, 90) degrees")
    return -math.log(2.0) / math.log(math.cos(math.radians(semiangle_deg)))


@dataclass
class LedFixture:
    """One ceiling LED: position, orientation and emission parameters."""

    id: int
    position: Vec3
    semiangle_deg: float
    transmit_power: float
    normal: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, -1.0))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.normal = np.asarray(self.normal, dtype=float)
        if self.transmit_power <= 0:
            raise ValueError("transmit power must be positive")
        n = np.linalg.norm(self.normal)
        if abs(n - 1.0) > 1e-9:
            raise ValueError("LED normal must be unit length")
        self.lambertian_order = lambertian_order(self.semiangle_deg)


@dataclass
class PdCharacteristics:
    """Photodiode/concentrator parameters of the receiver."""

    area: float                 # detector area, m^2
    filter_gain: float          # optical filter gain T_s
    concentrator_index: float   # refractive index n of the concentrator
    fov_deg: float              # field-of-view half angle Psi_c, degrees
    responsivity: float         # optical-to-electrical conversion, A/W
    normal_camera_frame: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, 1.0))

    def __post_init__(self):
        self.normal_camera_frame = np.asarray(self.normal_camera_frame, dtype=float)
        if self.area <= 0:
            raise ValueError("detector area must be positive")
        if not 0.0 < self.fov_deg <= 90.0:
            raise ValueError("field of view must be in (0, 90] degrees")
        if self.responsivity <= 0:
            raise ValueError("responsivity must be positive")

    @property
    def fov_rad(self) -> float:
        return math.radians(self.fov_deg)


@dataclass
class NoiseModel:
    """Additive white Gaussian current noise at the PD.

    ``current_noise_std`` is the per-sample standard deviation of the
    photocurrent noise (shot and thermal contributions lumped together);
    ``rss_samples_averaged`` is how many consecutive samples the receiver
    averages for one power reading.
    """

    current_noise_std: float
    rss_samples_averaged: int = 1

    def __post_init__(self):
        if self.current_noise_std < 0:
            raise ValueError("noise std must be non-negative")
        if self.rss_samples_averaged < 1:
            raise ValueError("must average at least one sample")


def concentrator_gain(pd: PdCharacteristics, psi: float) -> float:
    """Optical concentrator gain at incidence angle ``psi`` (radians).

    n^2/sin^2(Psi_c) inside the field of view (boundary included),
    zero outside.
    """
    if psi < 0 or psi > math.pi:
        raise ValueError("incidence angle must be in [0, pi]")
    if psi > pd.fov_rad:
        return 0.0
    return pd.concentrator_index ** 2 / math.sin(pd.fov_rad) ** 2


def dc_gain(led: LedFixture, pd: PdCharacteristics, d: float,
            phi: float, psi: float) -> float:
    """Channel DC gain for link distance ``d`` and angles ``phi``, ``psi``.

    Returns zero outside the PD field of view or outside the forward
    emission hemisphere of the LED (cos(phi) <= 0, where the generalised
    Lambertian pattern is undefined for non-integer order).
    """
    if d <= 0:
        raise NonPositiveDistanceError(f"link distance must be positive, got {d}")
    cos_phi = math.cos(phi)
    cos_psi = math.cos(psi)
    if cos_phi <= 0.0 or cos_psi <= 0.0:
        return 0.0
    g = concentrator_gain(pd, psi)
    if g == 0.0:
        return 0.0
    m = led.lambertian_order
    return ((m + 1.0) * pd.area / (2.0 * math.pi * d * d)
            * cos_phi ** m * pd.filter_gain * g * cos_psi)


def link_geometry(led: LedFixture, pd_position: Vec3, pd_normal_world: Vec3):
    """Distance and angles of the LED-to-PD link.

    Returns ``(d, phi, psi)`` where phi is measured at the LED against
    its normal and psi at the PD against ``pd_normal_world``.
    """
    v = led.position - np.asarray(pd_position, float)  # PD -> LED
    d = float(np.linalg.norm(v))
    if d <= _EPS:
        raise NonPositiveDistanceError("PD coincides with the LED")
    cos_phi = float(np.dot(-v, led.normal)) / d
    cos_psi = float(np.dot(v, np.asarray(pd_normal_world, float))) / d
    phi = math.acos(min(1.0, max(-1.0, cos_phi)))
    psi = math.acos(min(1.0, max(-1.0, cos_psi)))
    return d, phi, psi


def received_power(led: LedFixture, pd: PdCharacteristics,
                   pd_position: Vec3, pd_normal_world: Vec3) -> float:
    """Noise-free received optical power P_t * H at the PD, watts."""
    d, phi, psi = link_geometry(led, pd_position, pd_normal_world)
    return led.transmit_power * dc_gain(led, pd, d, phi, psi)


def snr_db(pd: PdCharacteristics, noise: NoiseModel, p_received: float) -> float:
    """Electrical SNR of one power sample, 10*log10((P*R_p)^2 / sigma^2)."""
    if p_received < 0:
        raise ValueError("received power must be non-negative")
    if noise.current_noise_std == 0:
        raise ZeroNoiseError("SNR undefined for zero noise std")
    if p_received == 0.0:
        return -math.inf
    return 10.0 * math.log10((p_received * pd.responsivity) ** 2
                             / noise.current_noise_std ** 2)


def calibrate_noise(scene, pd: PdCharacteristics, reference_pose,
                    target_snr_db: float,
                    rss_samples_averaged: int = 1) -> NoiseModel:
    """Choose the current-noise std so the weakest visible link from the
    reference pose sits exactly at ``target_snr_db``.

    Visibility here means a positive noise-free received power, i.e. the
    LED lies inside the PD field of view and in front of its plane.  The
    resulting noise level represents a receiver that just meets its
    communication requirement at the worst usable link of the reference
    position.
    """
    pd_normal_world = reference_pose.rotation @ pd.normal_camera_frame
    powers = [received_power(led, pd, reference_pose.position, pd_normal_world)
              for led in scene.leds]
    visible = [p for p in powers if p > 0.0]
    if not visible:
        raise NoVisibleLinkError("reference pose has no LED within the PD field of view")
    weakest = min(visible)
    sigma = weakest * pd.responsivity * 10.0 ** (-target_snr_db / 20.0)
    return NoiseModel(current_noise_std=sigma,
                      rss_samples_averaged=rss_samples_averaged)


def sample_measured_power(p_true: float, pd: PdCharacteristics,
                          noise: NoiseModel,
                          rng: np.random.Generator | int) -> float:
    """One averaged power reading: mean of ``rss_samples_averaged`` noisy
    photocurrent samples converted back to optical power.

    Deterministic for a fixed seed, unbiased, and exactly ``p_true`` for
    zero noise std.
    """
    if noise.current_noise_std == 0.0:
        return float(p_true)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    currents = (p_true * pd.responsivity
                + gen.normal(0.0, noise.current_noise_std, noise.rss_samples_averaged))
    return float(currents.mean() / pd.responsivity)
