"""Exception hierarchy shared across the package."""


class CoulqedError(Exception):
    """Base class for all package errors."""


class ParityError(CoulqedError):
    """An operand of a graded operation has mixed Grassmann parity."""


class KinematicsError(CoulqedError):
    """Momenta violate on-shell or conservation requirements."""


class UnsupportedMassError(CoulqedError):
    """Spinor construction requested for a massless particle."""


class PoleError(CoulqedError):
    """A propagator denominator vanishes exactly."""


class FrameError(CoulqedError):
    """A frame-dependent quantity is undefined in the chosen frame."""


class DirectionError(CoulqedError):
    """A direction was requested for the zero vector."""


class StructureError(CoulqedError):
    """A constraint bracket matrix does not have the expected block form."""


class AlgorithmFailure(CoulqedError):
    """The constraint consistency algorithm met an unsolvable condition."""


class ZeroModeError(CoulqedError):
    """A kernel or projector was evaluated at zero three-momentum."""
