"""Exception types shared across the library."""

from __future__ import annotations


class MajorfixError(Exception):
    """Base class for library-specific failures."""


class NoExistenceError(MajorfixError):
    """The upper majorant stays above the bisectrix on the whole radius range.

    Carries the minimized gap ``min_r (upper(r) - r)`` and its location as a
    diagnostic: the distance to the solvability threshold.
    """

    def __init__(self, gap: float, argmin: float):
        self.gap = float(gap)
        self.argmin = float(argmin)
        super().__init__(
            f"upper majorant has no fixed point on the radius range: "
            f"min gap {self.gap:.6g} at r = {self.argmin:.6g}"
        )


class InadmissibleStartError(MajorfixError):
    """The initial iterate lies outside the certified start region."""

    def __init__(self, rho0: float, convergence_radius: float,
                 uniqueness_radius: float, closed: bool):
        self.rho0 = float(rho0)
        self.convergence_radius = float(convergence_radius)
        self.uniqueness_radius = float(uniqueness_radius)
        self.closed = bool(closed)
        bracket = "]" if closed else ")"
        super().__init__(
            f"start offset {self.rho0:.6g} outside the admissible region "
            f"[0, {self.convergence_radius:.6g}] U "
            f"({self.convergence_radius:.6g}, {self.uniqueness_radius:.6g}{bracket}"
        )


class BoundViolationError(MajorfixError):
    """An observed step norm exceeded its certified bound.

    Signals an inconsistent modulus: the supplied k(r) is not a valid
    Lipschitz bound for the operator on the stated ball. Carries the partial
    trace and the offending step record for diagnostics.
    """

    def __init__(self, message: str, trace=None, record=None):
        self.trace = trace
        self.record = record
        super().__init__(message)


class ConfigError(MajorfixError):
    """A problem configuration failed validation."""
