"""Exception types with stable machine-readable codes.

Every error raised by the library carries a ``code`` string so that the CLI
and tests can match on failure kinds without parsing messages.
"""


class OrdsepError(Exception):
    code = "ERROR"

    def __init__(self, message="", *, code=None, **details):
        if code is not None:
            self.code = code
        self.details = details
        super().__init__(message or self.code)


class PreconditionError(OrdsepError):
    """A documented precondition of an operation was violated."""

    code = "PRECONDITION"


class ValidationError(OrdsepError):
    """A graph or structure failed its validity check."""

    code = "INVALID"


class BudgetExceeded(OrdsepError):
    """A bounded search ran out of budget without finding a certificate."""

    code = "BUDGET_EXCEEDED"


class UndecidedConjugacy(OrdsepError):
    """The bounded conjugacy checker could not decide the inputs."""

    code = "UNDECIDED_CONJUGACY"


class CapExceeded(OrdsepError):
    """An exhaustive enumeration was asked to exceed its configured cap."""

    code = "CAP_EXCEEDED"


EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_UNDECIDED = 4
EXIT_USAGE = 64


def exit_code_for(err):
    if isinstance(err, UndecidedConjugacy):
        return EXIT_UNDECIDED
    if isinstance(err, (BudgetExceeded, CapExceeded)):
        return EXIT_BUDGET
    if isinstance(err, OrdsepError):
        return EXIT_PRECONDITION
    return 1
