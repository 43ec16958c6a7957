"""Exception types raised by the lab.

Every error derives from :class:`LabError` so the CLI can map it to exit
code 1, and from the closest builtin so plain ``except ValueError`` keeps
working for library callers.
"""

from __future__ import annotations


class LabError(Exception):
    """Root of all lab errors."""


class DomainError(LabError, ValueError):
    """An argument is outside the operation's domain."""


class CapacityError(LabError, ValueError):
    """A size limit (generation index, degree cap) was exceeded."""


class ConfigError(LabError, ValueError):
    """A configuration file or value is invalid."""


class SingularSampleError(DomainError):
    """A quadrature sample of ``log|f|`` hit a zero of *f*."""

    def __init__(self, angle: float, magnitude: float) -> None:
        self.angle = angle
        self.magnitude = magnitude
        super().__init__(
            f"|f| vanishes at grid angle t={angle:.15g} (|f|={magnitude:.3e}); "
            f"use a different grid size"
        )


class ContourError(DomainError):
    """The integration contour passes too close to a zero."""

    def __init__(self, radius: float, arc: tuple[float, float]) -> None:
        self.radius = radius
        self.arc = arc
        super().__init__(
            f"contour |z|={radius:g} passes too close to a zero on the arc "
            f"t in [{arc[0]:.12g}, {arc[1]:.12g}]"
        )


class ConvergenceError(LabError, RuntimeError):
    """The root finder hit its iteration cap; ``partial`` holds the last iterate."""

    def __init__(self, message: str, partial: object) -> None:
        self.partial = partial
        super().__init__(message)


class InvariantError(LabError, RuntimeError):
    """A hard mathematical invariant was violated by computed data."""
