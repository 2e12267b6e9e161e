"""Visible-light indoor positioning: simulator, estimators, experiments.

A room of ceiling LEDs illuminates a receiver carrying a photodiode and
a pinhole camera.  The package simulates the optical channel and the
camera, implements a closed-form camera-assisted RSS-ratio positioning
pipeline with an offset-compensation loop, plus nonlinear least-squares
baselines, and drives Monte-Carlo coverage/accuracy/robustness/timing
experiments with CSV and figure output.
"""

from .channel import (
    LedFixture,
    NoiseModel,
    PdCharacteristics,
    calibrate_noise,
    concentrator_gain,
    dc_gain,
    received_power,
    sample_measured_power,
    snr_db,
)
from .compensation import (
    CompensationConfig,
    RigidPoseEstimate,
    estimate,
    estimate_compensated,
    rssr_residuals,
)
from .baselines import (
    LedRequirement,
    RssrMode,
    estimate_ca_rssr,
    estimate_rssr,
    required_leds,
)
from .estimator import (
    PositionEstimate,
    absolute_distances,
    distance_ratio,
    estimate_basic,
    incidence_angle,
    recover_height,
    solve_plan_position,
)
from .geometry import (
    CameraIntrinsics,
    ReceiverPose,
    camera_to_world,
    inter_led_angle,
    pixel_to_camera_ray,
    project_to_pixel,
    world_to_camera,
)
from .lm import LmOptions, LmResult, solve
from .scene import Scene, default_camera, default_pd, default_scene
from .sensing import (
    ImageNoiseModel,
    LinkObservation,
    ObservationSet,
    observe,
    select_strongest,
    visibility,
)

__version__ = "0.1.0"
