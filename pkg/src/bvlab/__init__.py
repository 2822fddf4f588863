"""Verification workbench for an explicit Bombieri-Vinogradov theorem.

The package recomputes every explicit constant of the underlying
result with rigorous interval enclosures, implements the character
sums, progression discrepancies and sieve-weighted sums the proof
manipulates, and brute-force checks each explicit inequality at desk
scale.  See the README for the command-line surface.
"""

from .errors import CapacityError, ConsistencyError, DomainError
from .interval import RigorousValue

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "DomainError",
    "RigorousValue",
    "__version__",
]
