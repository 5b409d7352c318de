"""Exception types shared by the certification modules."""


class PreconditionError(ValueError):
    """An operation was called outside its admissible regime.

    Examples: requesting a basin certificate at a reference speed inside
    the unstable band, or a global certificate when the drift matrix is
    not Hurwitz.  Maps to CLI exit code 4.
    """


class CertificationFailure(RuntimeError):
    """No certificate was found within the declared solver budget.

    This is a failure to certify, not a proof of infeasibility.  Maps to
    CLI exit code 3.
    """

    def __init__(self, message: str, diagnostic: str = "solver-budget"):
        super().__init__(message)
        self.diagnostic = diagnostic
