class DescentError(Exception):
    """Base class for all errors raised by descent_kit."""


class DomainError(DescentError, ValueError):
    pass


class FactorizationIncomplete(DescentError):
    """A composite cofactor resisted splitting within the work budget."""

    def __init__(self, n, cofactor):
        super().__init__(f"could not split cofactor {cofactor} of {n}")
        self.n = n
        self.cofactor = cofactor


class SingularCurveError(DescentError, ValueError):
    pass


class DegenerateParameters(DescentError, ValueError):
    pass


class CurveMismatch(DescentError, ValueError):
    pass
