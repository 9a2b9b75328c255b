"""Exception types shared across the package."""

from __future__ import annotations


class SplitStepError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SplitStepError):
    """A config file or run option could not be parsed or failed schema checks."""


class ModelValidationError(SplitStepError):
    """A parameter model failed validation."""


class NormalizationError(ModelValidationError):
    """Sitewise constraint p^2 + |q|^2 = 1 or a^2 + |b|^2 = 1 violated."""

    def __init__(self, site: object, which: str, value: float):
        self.site = site
        self.which = which
        self.value = value
        super().__init__(f"{which}^2 + |{'q' if which == 'p' else 'b'}|^2 = {value!r} != 1 at site {site!r}")


class GapBoundViolation(ModelValidationError):
    """sup |p| or sup |a| reaches 1: the model leaves the admissible open range."""

    def __init__(self, which: str, value: float, site: object = None):
        self.which = which
        self.value = value
        self.site = site
        where = f" at site {site!r}" if site is not None else ""
        super().__init__(f"|{which}| = {value!r} reaches 1{where}")


class DomainError(SplitStepError):
    """Argument outside the open interval (-1, 1)."""


class StructureError(SplitStepError):
    """A matrix does not have the block structure the operation requires."""


class NonIntegerTrace(SplitStepError):
    """A symmetry trace that must be an integer drifted away from one."""

    def __init__(self, trace: float, drift: float):
        self.trace = trace
        self.drift = drift
        super().__init__(f"trace {trace!r} is {drift:.3e} away from the nearest integer")


class DimensionMismatch(SplitStepError):
    """Operands have incompatible shapes."""


class GapClosed(SplitStepError):
    """A symmetry point lies in the essential spectrum; the closed-form index does not apply."""

    def __init__(self, star: int, sign: int):
        self.star = star
        self.sign = sign
        end = "-inf" if star < 0 else "+inf"
        pt = "+1" if sign > 0 else "-1"
        super().__init__(f"gap closed at {pt}: p({end}) = {'+' if sign > 0 else '-'}a({end})")


class CaseBoundary(SplitStepError):
    """Asymptotic limits sit on a boundary |p| = |a| between classification cases."""

    def __init__(self, star: int):
        self.star = star
        end = "-inf" if star < 0 else "+inf"
        super().__init__(f"|p({end})| = |a({end})| within tolerance: not inside any of the 16 cases")


class InconclusiveClassification(SplitStepError):
    """A weight series could not be classified; the model is gapless or critical."""


class NotSquareSummable(SplitStepError):
    """The requested kernel branch is not square-summable; no eigenstate exists on it."""


class WindowTooSmallForDecay(SplitStepError):
    """Boundary amplitudes of the constructed state are not negligible on this window."""

    def __init__(self, boundary_amp: float, threshold: float):
        self.boundary_amp = boundary_amp
        self.threshold = threshold
        super().__init__(f"boundary amplitude {boundary_amp:.3e} exceeds {threshold:.1e}; enlarge the window")


class EpsilonOutOfRange(SplitStepError):
    """Envelope margin epsilon leaves no room between the decay ratios and (0, 1)."""


class EnvelopeViolation(SplitStepError):
    """A site violates the proven two-sided decay envelope."""

    def __init__(self, x: int, detail: str = ""):
        self.x = x
        super().__init__(f"envelope violated at x = {x}" + (f": {detail}" if detail else ""))
