"""Exception types shared across the package."""


class CoalsynthError(Exception):
    """Base class for all errors raised by coalsynth."""


class FormulaSyntaxError(CoalsynthError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAtomError(CoalsynthError):
    pass


class NegatedCompoundError(FormulaSyntaxError):
    pass


class CapacityError(CoalsynthError):
    """A construction exceeded its configured state budget."""


class ProblemFormatError(CoalsynthError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class MissingTransitionError(ProblemFormatError):
    pass


class BudgetExceeded(CoalsynthError):
    """Brute-force enumeration would exceed the exhaustion budget."""


class ValidationError(CoalsynthError):
    pass
