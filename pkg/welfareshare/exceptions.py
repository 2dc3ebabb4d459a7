"""Exception hierarchy for welfareshare"""


class WelfareShareError(Exception):
    """Base class for every error raised by the library"""


class InstanceError(WelfareShareError, ValueError):
    """Malformed instance, disagreement point or solution"""


class FixtureError(WelfareShareError, ValueError):
    """Unknown fixture name or out-of-range fixture parameter"""


class EnumerationBoundError(WelfareShareError):
    """An exhaustive enumeration would exceed the configured bound"""

    def __init__(self, what, size, bound, hint=None):
        self.what = what
        self.size = size
        self.bound = bound
        message = f"{what}: size {size} exceeds the enumeration bound {bound}"
        if hint:
            message += f" ({hint})"
        super().__init__(message)


class EmptyWSCoreError(WelfareShareError):
    """The welfare-sharing core is empty, so no core-based solution exists"""


class IncompatibleOptionsError(WelfareShareError):
    """Mechanism / disagreement / instance-kind combination is not supported"""


class ConvergenceError(WelfareShareError):
    """A floating-point diagnostic did not converge within its iteration cap"""
