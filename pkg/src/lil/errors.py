"""Exception hierarchy.

Input problems (bad patterns, wrong sizes, unmet preconditions) derive from
``LilInputError``; the CLI maps those to exit code 2.
"""


class LilError(Exception):
    pass


class LilInputError(LilError, ValueError):
    pass


class DimensionMismatch(LilInputError):
    pass


class PatternError(LilInputError):
    pass


class NotReflexive(PatternError):
    def __init__(self, i):
        self.i = i
        super().__init__(f"pattern is not reflexive: ({i + 1},{i + 1}) missing")


class NotTransitive(PatternError):
    def __init__(self, i, j, k):
        self.triple = (i, j, k)
        super().__init__(
            f"pattern is not transitive: ({i + 1},{j + 1}) and ({j + 1},{k + 1}) "
            f"present but ({i + 1},{k + 1}) missing"
        )


class SupportError(LilInputError):
    """An element has a nonzero entry outside the pattern."""


class TooLarge(LilInputError):
    pass


class Singular(LilInputError):
    pass


class NotNilpotent(LilInputError):
    pass


class NotLieIdeal(LilInputError):
    def __init__(self, witness):
        self.witness = witness
        e, b = witness
        super().__init__(f"not a Lie ideal: bracket with unit {e} leaves the subspace")


class NotBlockIdeal(LilInputError):
    pass


class AddendRejected(LilInputError):
    """Raised by the addend classifier; ``condition`` is 'a', 'b', 'c' or 'domain'."""

    def __init__(self, condition, where, message):
        self.condition = condition
        self.where = where
        super().__init__(message)
