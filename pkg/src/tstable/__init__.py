"""Bounded-degree induced subgraphs of G(n, p): exact counts, saddle
approximations, first-moment profiles and Monte Carlo experiments."""

from __future__ import annotations

from .errors import DomainError, OracleScaleError, PrecisionLossError
from .moments import Params

__all__ = ["DomainError", "OracleScaleError", "PrecisionLossError", "Params"]
__version__ = "0.1.0"
