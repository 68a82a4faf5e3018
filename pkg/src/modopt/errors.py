"""Exception hierarchy shared across the package."""


class ModoptError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ModoptError):
    """A data file row could not be parsed."""


class ValidationError(ModoptError):
    """Input data violates a structural invariant."""


class Unreachable(ModoptError):
    """No path exists between the queried origin and destination."""


class DegenerateInput(ModoptError):
    """Input is usable only after clamping (e.g. fewer points than clusters)."""


class UnknownMode(ModoptError):
    """A mode key is missing from the coefficient set."""


class EmptyChoiceSet(ModoptError):
    """A choice probability was requested over zero alternatives."""


class ModeSetMismatch(ModoptError):
    """Two mode-share vectors do not cover the same mode set."""


class MissingOD(ModoptError):
    """A required origin-destination entry is unavailable."""


class MissingTierStats(ModoptError):
    """Simulation statistics lack an entry for a configured fleet tier."""


class NoFeasibleASC(ModoptError):
    """No grid point produced a transit share inside the target range."""


class SolverError(ModoptError):
    """Base class for optimization-solver failures."""


class NumericalInstability(SolverError):
    """The solver detected residuals beyond its feasibility tolerance."""


class SingularKernel(SolverError):
    """Kernel matrix stayed non-positive-definite after maximum jitter."""


class UnsupportedSmoothness(ModoptError):
    """Matern smoothness outside the implemented closed-form set."""


class InstanceTooLarge(ModoptError):
    """Brute-force oracle refused an instance above its enumeration cap."""


class ConfigError(ModoptError):
    """Run configuration is malformed or references missing files."""
