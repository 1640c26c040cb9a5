"""Exception hierarchy.

Every error raised by the library derives from :class:`ThermoflowError`,
which is itself a :class:`ValueError` so callers validating user input can
catch either.
"""


class ThermoflowError(ValueError):
    """Base class for all library errors."""


class LengthMismatch(ThermoflowError):
    pass


class NegativeProbability(ThermoflowError):
    pass


class NotNormalized(ThermoflowError):
    def __init__(self, deviation):
        self.deviation = deviation
        super().__init__(f"probabilities sum to 1 {deviation:+.3e}")


class SpectrumMismatch(ThermoflowError):
    """Two objects that must share a Hamiltonian and temperature do not."""


class OutOfDomain(ThermoflowError):
    pass


class NotInBall(ThermoflowError):
    def __init__(self, distance, epsilon):
        self.distance = distance
        self.epsilon = epsilon
        super().__init__(f"trace distance {distance:.6g} exceeds epsilon {epsilon:.6g}")


class IndexOutOfRange(ThermoflowError):
    pass


class IndexInversion(ThermoflowError):
    """The flattest-state cut block and fill block overlap (M >= N)."""

    def __init__(self, m, n):
        self.m = m
        self.n = n
        super().__init__(f"flattest construction found M={m} >= N={n}")


class NonTrivialSpectrum(ThermoflowError):
    pass


class EpsilonTooLarge(ThermoflowError):
    def __init__(self, epsilon, bound_name, bound):
        self.epsilon = epsilon
        self.bound_name = bound_name
        self.bound = bound
        super().__init__(
            f"epsilon {epsilon:.6g} exceeds {bound_name} = {bound:.6g}"
        )


class NegativeAlpha(ThermoflowError):
    pass


class TooLarge(ThermoflowError):
    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(f"tensor power needs {required} classes, cap is {cap}")
