"""Exact quasi-shuffle Hopf algebras, Rota-Baxter splittings and Birkhoff factorizations."""
from .errors import (
    AlgebraError,
    ConilpotencyError,
    EssentialSingularityError,
    InadmissibleDecompositionError,
    ModelHypothesisError,
    ParseError,
    PrecisionError,
    ResonanceError,
    RingMismatchError,
    UndefinedHalfProductError,
)
from .rings import MS, QQ, LaurentRing, LaurentSeries, PolynomialRing, TruncatedPoly

__version__ = "0.1.0"
