"""Exception hierarchy shared by every soficlab module."""


class SoficError(Exception):
    """Base class for all library errors."""


class SchemaError(SoficError):
    """A graph file is malformed JSON or misses required keys."""


class ValidationError(SoficError):
    """A structurally valid object violates a semantic invariant."""


class EmptyShiftError(SoficError):
    """No essential subgraph remains, so the presented shift is empty."""


class NotIrreducibleError(SoficError):
    pass


class BudgetExceeded(SoficError):
    """An enumeration or search would exceed its configured cap."""


class SearchBudgetExceeded(BudgetExceeded):
    pass


class IterationBudgetExceeded(BudgetExceeded):
    pass


class DepthBudgetExceeded(BudgetExceeded):
    pass


class NotReceptiveError(SoficError):
    pass


class ZeroEntropyError(SoficError):
    pass


class PreconditionError(SoficError):
    pass


class NotFiniteToOne(SoficError):
    pass


class NotContainedError(SoficError):
    pass
