"""Exception hierarchy shared by all modules."""


class RelaxedDesignError(Exception):
    """Base class for every error raised by this package."""


class SeedError(RelaxedDesignError):
    pass


class EmptyPartition(SeedError):
    pass


class NotUnitary(SeedError):
    def __init__(self, label, residual):
        super().__init__(f"gate {label!r} is not unitary (residual {residual:.3e})")
        self.label = label
        self.residual = residual


class NoInverse(SeedError):
    def __init__(self, label):
        super().__init__(f"gate {label!r} has no inverse partner in u_m")
        self.label = label


class TooLarge(RelaxedDesignError):
    """A brute-force or dense computation exceeds its configured cap."""


class TooLargeT(TooLarge):
    pass


class TooManyQubits(TooLarge):
    pass


class DimensionMismatch(RelaxedDesignError, ValueError):
    pass


class InvalidRange(RelaxedDesignError, ValueError):
    pass


class RegimeViolation(RelaxedDesignError, ValueError):
    """epsilon' + P(t) >= 1, so the depth bound has no finite solution."""


class EtaNotContractive(RelaxedDesignError, ValueError):
    pass


class NotFoundBelowCap(RelaxedDesignError):
    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep or []


class NotConverged(RelaxedDesignError):
    def __init__(self, estimate, residual, iterations):
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(estimate {estimate:.6g}, residual {residual:.2e})"
        )
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations
