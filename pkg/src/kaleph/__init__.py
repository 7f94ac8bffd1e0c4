"""Maker-Breaker K^aleph0-building games on vertex-coloured infinite complete graphs."""

from .board import (
    Claim,
    ClaimLedger,
    Colouring,
    Diagonal,
    Edge,
    IllegalMoveError,
    ModK,
    Player,
    Table,
    canonical_edge,
    colour_of,
    edge_enumeration,
    edge_index,
)
from .engine import (
    BiasSchedule,
    CeilLog2,
    ConstantK,
    GameConfig,
    GameTrace,
    Linear,
    StrategyFault,
    TraceError,
    Unit,
    bias_allowance,
    replay,
    run_game,
)
from .game import play

__version__ = "0.1.0"
