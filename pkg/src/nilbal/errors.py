class NilbalError(Exception):
    pass


class InputError(NilbalError, ValueError):
    """Malformed or inadmissible input (bad syntax, unknown names, wrong shapes)."""


class RejectedError(NilbalError, ValueError):
    """Well-formed input that the requested computation refuses to handle."""


class NonStabilizationError(RejectedError):
    """The class bound is too small: the quotient tower has not stopped."""
