"""Exception types raised across the package."""


class StereoCalibError(Exception):
    """Base class for all errors raised by stereocalib."""


class DegenerateBaseline(StereoCalibError):
    """Baseline direction is (nearly) parallel to the optical axis."""


class PointAtHorizon(StereoCalibError):
    """A ray lands on or behind the rotated principal plane."""


class TooFewPairs(StereoCalibError):
    """Not enough usable correspondences to constrain the solve."""


class NumericalFailure(StereoCalibError):
    """Normal equations could not be factorized (NaN contamination)."""


class DegenerateSum(StereoCalibError):
    """Unit vectors cancel out; their mean direction is undefined."""


class InsufficientVisibility(StereoCalibError):
    """Scene sampling could not find enough points seen by both cameras."""


class ParseError(StereoCalibError):
    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class MissingIntrinsics(StereoCalibError):
    """Intrinsics sidecar is absent or lacks a camera entry."""
