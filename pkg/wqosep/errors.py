"""Exception hierarchy shared by the engines, the CLI and the HTTP routes."""


class WqoError(Exception):
    """Base class for every error raised by wqosep."""


class AlphabetMismatchError(WqoError):
    def __init__(self, left, right):
        self.left = frozenset(left)
        self.right = frozenset(right)
        super().__init__(
            f"alphabet mismatch: {sorted(map(str, self.left))} vs {sorted(map(str, self.right))}"
        )


class AutomatonFormatError(WqoError):
    """Malformed automaton, transducer or monoid description."""


class DeterminizationLimitError(WqoError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"determinization exceeded the state cap of {cap}")


class UnsupportedOrderError(WqoError):
    """The requested operation is not available for this order kind."""


class InvalidIdealError(WqoError):
    """An ideal representation is malformed or does not fit the order."""


class PreconditionError(WqoError):
    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f"{condition}: {message}")


class CertificationError(WqoError):
    """A check that must succeed by construction failed."""


class OrderSyntaxError(WqoError):
    pass


class PatternSyntaxError(WqoError):
    pass


class InconclusiveError(WqoError):
    """A budgeted search ended without a decision."""

    def __init__(self, budget, message: str):
        self.budget = budget
        super().__init__(f"inconclusive at budget {budget}: {message}")
