"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Shapes of the inputs are inconsistent (non-square, mismatched sizes)."""


class SizeLimitError(ValueError):
    """An input exceeds a configured size cap (permanent order, grid size)."""


class InvariantError(ValueError):
    """A value violates a structural invariant (non-unitary matrix, broken Gram matrix)."""
