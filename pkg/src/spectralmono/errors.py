"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`SpectralMonoError`, so callers (and the CLI) can separate bad input
from bugs.
"""
from __future__ import annotations


class SpectralMonoError(Exception):
    pass


class ShapeMismatch(SpectralMonoError, ValueError):
    pass


class NotSquare(ShapeMismatch):
    pass


class NotFinite(SpectralMonoError, ValueError):
    pass


class NotNonnegative(SpectralMonoError, ValueError):
    pass


class NotSymmetric(SpectralMonoError, ValueError):
    pass


class NoConvergence(SpectralMonoError, ArithmeticError):
    pass


class Reducible(SpectralMonoError, ValueError):
    pass


class DimensionOverflow(SpectralMonoError, ValueError):
    pass


class NotSymmetrizable(SpectralMonoError, ValueError):
    pass


class PatternAsymmetric(NotSymmetrizable):
    """Some ``A[i, j] > 0`` has ``A[j, i] == 0``."""

    def __init__(self, edge: tuple[int, int]):
        self.edge = edge
        i, j = edge
        super().__init__(f"zero pattern not symmetric: A[{i},{j}] > 0 but A[{j},{i}] == 0")


class CycleInconsistent(NotSymmetrizable):
    """A cycle whose forward and backward products differ (Kolmogorov criterion)."""

    def __init__(self, cycle: tuple[int, ...], forward: float, backward: float):
        self.cycle = cycle
        self.forward = forward
        self.backward = backward
        path = " -> ".join(str(i) for i in cycle + cycle[:1])
        super().__init__(
            f"cycle {path} violates the product condition: "
            f"forward product {forward:.17g} != backward product {backward:.17g}"
        )


class NotCommuting(SpectralMonoError, ValueError):
    pass


class NotJointlySymmetrizable(SpectralMonoError, ValueError):
    pass


class JointDiagonalizationFailed(SpectralMonoError, ArithmeticError):
    pass


class SOSMismatch(SpectralMonoError, ArithmeticError):
    pass


class OracleDisagreement(SpectralMonoError, ArithmeticError):
    pass


class StepTooLarge(SpectralMonoError, ValueError):
    pass


class EmptySpectrum(SpectralMonoError, ValueError):
    pass


class NotStochastic(SpectralMonoError, ValueError):
    pass


class AbsorbingState(SpectralMonoError, ValueError):
    pass


class ComplexSpectrum(SpectralMonoError, ValueError):
    pass


class AlphaOutOfRange(SpectralMonoError, ValueError):
    pass


class GenerationExhausted(SpectralMonoError, RuntimeError):
    pass


class RegimeWarning(UserWarning):
    """Mutation rates outside ``(0, 1/2)``; no sign guarantee applies."""
