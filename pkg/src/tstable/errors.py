"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OracleScaleError(ValueError):
    """A brute-force oracle was asked to run beyond its enumerable scale."""


class PrecisionLossError(ArithmeticError):
    """A floating-point evaluation lost too much precision to be trusted."""
