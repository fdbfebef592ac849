"""Exception types shared across the package."""


class BalanceError(ValueError):
    """Two-color operation was given colors with unequal total weight."""


class SizeGuardError(ValueError):
    """An enumeration-based operation was asked to exceed its size guard."""


class InfeasibleTransportError(ValueError):
    """Transport instance has no feasible flow (unbalanced or disconnected)."""


class DataFormatError(ValueError):
    """Input file could not be turned into a usable dataset."""
