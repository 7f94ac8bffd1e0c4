"""Build strategies from a config and play."""

from __future__ import annotations

from typing import Tuple

from .breaker import make_breaker
from .engine import GameConfig, GameTrace, run_game
from .maker import make_maker


def strategies(config: GameConfig) -> Tuple[object, object]:
    maker = make_maker(config.maker, config.colouring, config.params)
    breaker = make_breaker(config.breaker, config.colouring, config.seed, config.params)
    return maker, breaker


def play(config: GameConfig) -> GameTrace:
    return run_game(config, *strategies(config))
