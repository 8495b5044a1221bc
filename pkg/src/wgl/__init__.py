"""Comparison-game solver, reduction witnesses, sorting pipelines and a priority-construction simulator."""
from __future__ import annotations

from .game import ComparisonGame, GameParams, Position
from .solver import SolveResult, SolverConfig, solve, verify_strategy

__all__ = [
    "ComparisonGame",
    "GameParams",
    "Position",
    "SolveResult",
    "SolverConfig",
    "solve",
    "verify_strategy",
]
__version__ = "0.1.0"
