"""Exception types raised by the simulator and estimators."""


class VlpError(Exception):
    """Base class for all simulator/estimator errors."""


class BehindCameraError(VlpError):
    """Point has non-positive depth and cannot be projected."""


class DegenerateRayError(VlpError):
    """A direction vector is too short to define an angle."""


class NonPositiveDistanceError(VlpError):
    """Link distance must be strictly positive."""


class ZeroNoiseError(VlpError):
    """SNR is undefined for a zero noise standard deviation."""


class NoVisibleLinkError(VlpError):
    """No LED is visible from the reference pose used for calibration."""


class InsufficientLedsError(VlpError):
    """Fewer visible LEDs than the algorithm requires.

    Carries the visible count so the experiment harness can log the
    coverage gap instead of aborting a whole run.
    """

    def __init__(self, visible: int, required: int):
        super().__init__(f"insufficient LEDs: {visible} < {required}")
        self.visible = visible
        self.required = required


class NonPositivePowerError(VlpError):
    """Measured power must be strictly positive to form a ratio."""


class GrazingIncidenceError(VlpError):
    """Incidence angle too close to 90 degrees; cosine underflows."""


class DegenerateTriangleError(VlpError):
    """LED-pair triangle collapsed (rays indistinguishable)."""


class CollinearLedsError(VlpError):
    """Selected LEDs are collinear in plan view; 2D solve is rank deficient."""


class InconsistentGeometryError(VlpError):
    """Estimated slant distance is shorter than the horizontal offset."""


class GrazingRayError(VlpError):
    """Camera ray degenerate; cannot scale to a 3D point."""


class CoincidentPointsError(VlpError):
    """Two points coincide; the direction between them is undefined."""


class SingularConfigurationError(VlpError):
    """LED rays are coplanar with the origin; rotation fit is singular."""


class NonFiniteResidualError(VlpError):
    """Residual function returned NaN or infinity during iteration."""


class UnknownAlgorithmError(VlpError):
    """Algorithm name is not one of the registered positioning schemes."""


class ConfigError(VlpError):
    """Invalid run configuration (bad value, unknown key, missing file)."""
