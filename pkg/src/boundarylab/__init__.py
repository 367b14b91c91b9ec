"""Computational toolkit for contracting elements, projection complexes,
horofunction boundaries and growth of group actions on Cayley graphs."""

__version__ = "0.1.0"

from .errors import (AdmissibilityError, BoundaryLabError, CapabilityError, ConfigError, EnumerationCapError,
                     InconclusiveWindow, OrderError, SearchFailure, WordError)
from .space import IDENTITY, AnnulusSpec, GeodesicPath, ModelSpace, SubgroupPredicate, preset

__all__ = [
    "__version__", "IDENTITY", "AnnulusSpec", "GeodesicPath", "ModelSpace", "SubgroupPredicate", "preset",
    "AdmissibilityError", "BoundaryLabError", "CapabilityError", "ConfigError", "EnumerationCapError",
    "InconclusiveWindow", "OrderError", "SearchFailure", "WordError",
]
