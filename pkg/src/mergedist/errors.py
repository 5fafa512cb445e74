class MergeDistError(Exception):
    """Base class for all errors raised by mergedist."""


class InvalidTreeError(MergeDistError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid merge tree: " + "; ".join(str(v) for v in self.violations))


class UnknownNodeError(MergeDistError, KeyError):
    pass


class PresentationError(MergeDistError, ValueError):
    pass


class IncompatibleError(MergeDistError, ValueError):
    """Two presentations (or functions) do not share an underlying shape."""


class ScaleGuardError(MergeDistError):
    """An exhaustive search would exceed its desk-scale limit."""

    def __init__(self, what, size, limit):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds guard limit {limit}")
