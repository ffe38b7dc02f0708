"""Exception hierarchy. Every domain failure derives from PretlabError so the
CLI can map it to exit code 1 and print the class name."""


class PretlabError(Exception):
    pass


class IncompatibleCongruences(PretlabError):
    pass


class NotInvertible(PretlabError):
    pass


class NotSimpleRoot(PretlabError):
    pass


class NotARoot(PretlabError):
    pass


class LargeModulusNonSimple(PretlabError):
    pass


class ReducibleForm(PretlabError):
    pass


class NotReducible(PretlabError):
    pass


class MissingFill(PretlabError):
    pass


class NotFoundWithinCap(PretlabError):
    pass


class TooLarge(PretlabError):
    pass


class PrimeNotInSupport(PretlabError):
    pass


class BelowThreshold(PretlabError):
    pass


class BadOrdering(PretlabError):
    pass


class WrongFamily(PretlabError):
    pass


class HenselFailure(PretlabError):
    pass


class VerificationFailure(PretlabError):
    pass


class IndexOutOfRange(PretlabError):
    pass


class DivisibilityFailure(PretlabError):
    pass


class NotRadoTriple(PretlabError):
    pass


class NonpositiveFormValue(PretlabError):
    pass


class NotFound(PretlabError):
    def __init__(self, message, bounds=None):
        super().__init__(message)
        self.bounds = bounds


class HypothesisViolation(PretlabError):
    def __init__(self, hypothesis):
        super().__init__(hypothesis)
        self.hypothesis = hypothesis


class BothZero(PretlabError):
    pass
