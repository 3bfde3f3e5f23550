"""Exception hierarchy shared by all qlump modules."""


class LumpingError(Exception):
    """Base class for every error raised by qlump."""


class ValidationError(LumpingError, ValueError):
    pass


class NegativeEntry(ValidationError):
    def __init__(self, i, j, value=None):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"negative entry at ({i}, {j}): {value!r}")


class RowSumViolation(ValidationError):
    def __init__(self, i, total):
        self.i, self.total = i, total
        super().__init__(f"row {i} sums to {total!r}, expected 1")


class TooSmall(ValidationError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"transition matrix needs at least 2 states, got {n}")


class DimensionMismatch(ValidationError):
    pass


class InvalidPartition(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class NoConvergence(LumpingError):
    def __init__(self, iterations):
        self.iterations = iterations
        super().__init__(f"no convergence after {iterations} iterations")


class ZeroAggregateMass(LumpingError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"aggregate {k} carries no stationary mass")


class ZeroStationaryMass(LumpingError):
    def __init__(self, i):
        self.i = i
        super().__init__(f"state {i} carries no stationary mass")


class AbsorbingAggregate(LumpingError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"aggregate {k} is absorbing (no exits)")


class EigenFailure(LumpingError):
    pass


class DecompositionFailure(LumpingError):
    pass


class DegenerateInput(LumpingError):
    pass


class GenerationExhausted(LumpingError):
    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"no valid matrix after {attempts} attempts")


class ParseError(LumpingError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")
