"""Exception hierarchy shared by all ratdyn modules.

Every error carries a short machine-readable ``code`` used by the CLI when
mapping failures to exit statuses and JSON diagnostics.
"""

from __future__ import annotations


class RatdynError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "error"

    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info


class MapParseError(RatdynError):
    code = "map-parse"

    def __init__(self, message: str, position: int | None = None, **info):
        super().__init__(message, position=position, **info)
        self.position = position


class DegenerateMap(RatdynError):
    code = "degenerate-map"


class DegreeTooLow(RatdynError):
    code = "degree-too-low"


class DegreeCapExceeded(RatdynError):
    code = "degree-cap"


class RootFindingFailed(RatdynError):
    code = "root-finding"

    def __init__(self, message: str, unconverged: int = 0, **info):
        super().__init__(message, unconverged=unconverged, **info)
        self.unconverged = unconverged


class InexactDivision(RatdynError):
    """Exact polynomial division left a remainder.

    On the dynatomic path this signals a parabolic degeneracy (or a bug);
    it is reported, never swallowed.
    """

    code = "inexact-division"


class OrbitMismatch(RatdynError):
    code = "orbit-mismatch"


class NotACycle(RatdynError):
    code = "not-a-cycle"


class SingularCurve(RatdynError):
    code = "singular-curve"


class NotRepelling(RatdynError):
    code = "not-repelling"


class InPostcriticalSet(RatdynError):
    code = "in-postcritical-set"


class NoReturnFound(RatdynError):
    code = "no-return"

    def __init__(self, message: str, search_depth: int = 0, **info):
        super().__init__(message, search_depth=search_depth, **info)
        self.search_depth = search_depth


class NewtonDiverged(RatdynError):
    code = "newton-diverged"

    def __init__(self, message: str, n: int = 0, **info):
        super().__init__(message, n=n, **info)
        self.n = n


class PeriodCollision(RatdynError):
    """A refined point collapsed onto a proper-divisor period; the seed is bad."""

    code = "period-collision"

    def __init__(self, message: str, n: int = 0, **info):
        super().__init__(message, n=n, **info)
        self.n = n


class SpectrumNotRational(RatdynError):
    """Exact spectra are computed over the rationals; the map has Gaussian
    coefficients with nonzero imaginary part somewhere it matters."""

    code = "spectrum-not-rational"
