"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates an operation's contract."""


class CapacityError(RuntimeError):
    """A request exceeds a declared resource limit (qubits, register widths)."""
