"""Exception hierarchy shared by all ghmkit modules."""


class GhmkitError(Exception):
    """Base class for every domain error raised by this package."""


# -- spectrum --------------------------------------------------------------

class NonHyperbolicError(GhmkitError):
    """A multiplier modulus is within tolerance of 1."""


class ConjugacyViolationError(GhmkitError):
    """Complex multipliers cannot be grouped into conjugate pairs."""


class OutOfRangeError(GhmkitError, ValueError):
    """Integer argument outside its documented range."""


# -- ghm -------------------------------------------------------------------

class EscapedError(GhmkitError, OverflowError):
    """An orbit left the escape radius (or produced a non-finite state)."""


class DegenerateFamilyError(GhmkitError):
    """Parameter combination with a continuum of fixed points."""


class OutOfRegimeError(GhmkitError, ValueError):
    """Rescaled parameter outside the small-|R| regime."""


# -- bifurcation -----------------------------------------------------------

class NoSeedError(GhmkitError):
    """Newton failed to converge from the continuation seed."""


class NotASaddleError(GhmkitError):
    """Manifold growth requested at a non-saddle fixed point."""


class InverseUndefinedError(GhmkitError):
    """Backward iteration hit a point where the inverse map degenerates."""


class NoSaddleError(GhmkitError):
    """No saddle fixed point exists at these parameters."""


class ArcEscapeError(GhmkitError):
    """A manifold arc left the working window before approaching the target."""


class NoCrossingError(GhmkitError):
    """No tangency zero-crossing was bracketed in the scanned region."""


# -- renorm ----------------------------------------------------------------

class Eq1ViolationError(GhmkitError, ValueError):
    """Model multipliers violate the saddle inequality set."""


class EmptyDomainError(GhmkitError):
    """Requested return-map domain is empty for this iterate count."""


class RankDeficientError(GhmkitError):
    """Sample too degenerate for the quadratic map fit."""


class InsufficientRangeError(GhmkitError):
    """Fewer usable iterate counts than the asymptotics report needs."""


# -- ergodic ---------------------------------------------------------------

class UnknownObservableError(GhmkitError, KeyError):
    """Observable name not in the built-in dictionary."""


class TooShortError(GhmkitError, ValueError):
    """Series shorter than the diagnostic requires."""


# -- cli -------------------------------------------------------------------

class BadConfigError(GhmkitError, ValueError):
    """Config file malformed, or contains unknown keys."""
