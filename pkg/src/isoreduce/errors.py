class UsageError(ValueError):
    """Arguments that do not fit together (dimension or family mismatch, unknown key)."""


class ValidationError(ValueError):
    """Input data violating a geometric constraint (non-unit direction, non-orthogonal frame)."""


class OracleInconsistency(RuntimeError):
    """The orbit oracle declared two clouds congruent but could not align them."""
