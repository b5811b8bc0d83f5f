"""Exception hierarchy shared by all modules."""


class PCurvesError(Exception):
    """Base class for all errors raised by this package."""


# --- frame ---------------------------------------------------------------

class DimensionMismatch(PCurvesError):
    pass


class SingularAngles(PCurvesError):
    """A leading spherical angle is too close to 0 or pi to define the frame."""


class ZeroVector(PCurvesError):
    pass


class NonOrthogonal(PCurvesError):
    pass


# --- domain / cross-sections ---------------------------------------------

class SliceHitsBase(PCurvesError):
    """Normal plane of a prism intersects one of the two bases."""


class EmptySection(PCurvesError):
    pass


class UnboundedSection(PCurvesError):
    pass


class MissingTruncation(PCurvesError):
    """Sampling an unbounded domain requires an explicit truncation range."""


# --- moments ---------------------------------------------------------------

class DegenerateInterval(PCurvesError):
    pass


class InvertedBounds(PCurvesError):
    pass


class DegeneratePolygon(PCurvesError):
    pass


class JacobianSignViolation(PCurvesError):
    """The weight 1 - sum(u_i kappa_i) becomes negative on the section."""


class NonConvergence(PCurvesError):
    """Adaptive quadrature exceeded its refinement budget."""


class SingularGram(PCurvesError):
    pass


class ZeroMass(PCurvesError):
    pass


# --- dynamics ---------------------------------------------------------------

class OutOfDomain(PCurvesError):
    pass


class StepSizeUnderflow(PCurvesError):
    pass


class InadmissibleStart(PCurvesError):
    pass


class NonOrthogonalRotation(PCurvesError):
    pass


# --- helix -------------------------------------------------------------------

class ZeroPitch(PCurvesError):
    pass


class OutOfRegime(PCurvesError):
    pass


# --- cli ----------------------------------------------------------------------

class IncompatibleTruncation(PCurvesError):
    """Quadrant trace cannot be closed into a square-symmetric curve at the chosen cut."""
