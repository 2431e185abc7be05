"""Exception hierarchy."""


class ParahilbError(Exception):
    """Base class for all errors raised by parahilb."""


class NotAdmissibleError(ParahilbError, ValueError):
    """Index vector lies outside the admissible set."""


class NotGeneratorError(ParahilbError, ValueError):
    """Index vector is neither in C nor in -C."""


class WindowError(ParahilbError, ValueError):
    """Invalid window, or a level outside of it."""


class TruncationError(ParahilbError, ValueError):
    """Degree outside of a truncation order."""


class OrderMismatchError(ParahilbError, ValueError):
    """Binary series operation on different truncation orders."""


class SpaceMismatchError(ParahilbError, ValueError):
    """Cohomology class used on the wrong space, or a bad pairing."""


class CocharacterError(ParahilbError, RuntimeError):
    """No generic cocharacter found within the search bound."""


class ContractViolation(ParahilbError, AssertionError):
    """An internal cross-check disagreed with a closed-form statement."""
