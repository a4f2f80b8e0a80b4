"""Exception types shared across the package."""


class CatSteerError(Exception):
    """Base class for all package errors."""


class GridResolutionError(CatSteerError, ValueError):
    """A quadrature grid is too coarse for the fringes or kernel it must resolve."""


class TruncationError(CatSteerError, ValueError):
    """A Fock-space truncation discards more probability than allowed."""


class ImpossibleOutcomeError(CatSteerError, ValueError):
    """Conditioning on an outcome that has zero probability."""


class NoSignatureError(CatSteerError):
    """No steering violation exists to locate a critical smearing width for."""


class InsufficientDataError(CatSteerError, ValueError):
    """Too few samples in a conditioning cell to form an estimate."""
