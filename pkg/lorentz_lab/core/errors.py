"""
Error types raised by lorentz-lab
"""


class LorentzLabError(Exception):
    """Base class for every library error"""


class InvariantViolation(LorentzLabError):
    """A value type was constructed from data that breaks its invariants"""


class DegenerateSpan(LorentzLabError):
    """Orthonormalization met an isotropic or linearly dependent vector"""


class OnBoundary(LorentzLabError):
    """A point expected in the open ball lies on (or beyond) the unit sphere"""


class CoincidentPoints(LorentzLabError):
    """Two points that must be distinct coincide"""


class UnequalRadii(LorentzLabError):
    """A rotation was asked to map points at different distances from its center"""


class CollinearDegenerate(LorentzLabError):
    """The rotation plane is undetermined because the points are collinear"""


class Unattainable(LorentzLabError):
    """No rotation about the center realizes the requested distance"""


class CollinearCenter(LorentzLabError):
    """The rotation center lies on the geodesic through the two base points"""


class EmptyProbeSet(LorentzLabError):
    """A pseudo-metric or probe was evaluated on no points"""


class IdentityInput(LorentzLabError):
    """The identity has no symmetry decomposition"""


class NotInStabilizer(LorentzLabError):
    """The isometry does not fix the given ideal point"""


class EmptyFunctionals(LorentzLabError):
    """A weak-topology probe was given no functionals"""


class InvalidFrustumPair(LorentzLabError):
    """The pair (y, r) violates ||y|| <= r <= 1"""


class LengthMismatch(LorentzLabError):
    """Parallel lists have different lengths or a block size is invalid"""


class InsufficientAngleDensity(LorentzLabError):
    """The angle set of the dense operator is too sparse for the requested accuracy"""


class ZeroTranslation(LorentzLabError):
    """A translation-to-rotation replacement was asked for the zero vector"""


class NonPositiveLength(LorentzLabError):
    """A translation length must be strictly positive"""


class NotInHilbertSpace(LorentzLabError):
    """A Hilbert-space vector uses coordinate 0, which is reserved for the time axis"""


class BoundExceeded(LorentzLabError):
    """A constructive approximation missed its certified error bound"""


class ExperimentConfigError(LorentzLabError):
    """An experiment configuration is malformed or inconsistent"""
