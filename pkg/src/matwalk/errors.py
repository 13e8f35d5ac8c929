"""Exception and warning types shared across the package."""


class NotDefinedError(ValueError):
    """An iterated logarithm (or an expression built from one) left its domain."""


class DegenerateEntryError(ArithmeticError):
    """A normalized product entry underflowed to zero although the exact value is positive."""

    def __init__(self, index, entry):
        self.index = index
        self.entry = entry
        super().__init__(
            f"entry {entry} of the normalized product underflowed to 0 at factor k={index}"
        )


class NonConvergenceError(RuntimeError):
    """A continued-fraction tail did not meet the tolerance within the depth cap."""


class InvalidProbabilityError(ValueError):
    """A derived transition probability left (0, 1)."""


class UnsupportedModelError(ValueError):
    """The operation requires a parametric (K, B, sign) model."""


class ZeroDenominatorError(ZeroDivisionError):
    """A hitting-probability ratio has an exactly-zero denominator."""


class CancellationWarning(RuntimeWarning):
    """A subtractive step lost more than half the significant digits."""
