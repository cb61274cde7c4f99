"""Whittaker functions on GL_n over local fields.

Exact spherical values over non-Archimedean fields (``padic_whittaker``),
Mellin-Barnes evaluation over R and C (``mb_engine``, ``arch_whittaker``)
and Asai local zeta integrals (``asai_zeta``).
"""

from .errors import (DomainError, InfeasibleContour, InvalidWeight, LengthMismatch,
                     NumericalError, PoleError, PoleOnContour, RepeatedParameter, Unconverged,
                     UnsupportedRank, WhittakerError)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "InfeasibleContour", "InvalidWeight", "LengthMismatch", "NumericalError",
    "PoleError", "PoleOnContour", "RepeatedParameter", "Unconverged", "UnsupportedRank",
    "WhittakerError",
]
