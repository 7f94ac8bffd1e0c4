"""Alternating-turn game loop, bias schedules, traces and replay.

A game is truncated after ``horizon`` Maker moves. Every Maker move is followed
by a Breaker block whose size is given by the bias schedule; when Breaker opens,
one extra block precedes Maker's first move.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Sequence

from .board import (
    BoardError,
    Claim,
    ClaimLedger,
    Colouring,
    Diagonal,
    Edge,
    IllegalMoveError,
    Player,
    canonical_edge,
    colouring_from_config,
)

TRACE_FORMAT = "kaleph-trace/1"


class StrategyFault(Exception):
    """A strategy returned an illegal or malformed block."""

    def __init__(self, strategy: str, turn: int, reason: str):
        self.strategy = strategy
        self.turn = turn
        super().__init__(f"strategy {strategy!r} at turn {turn}: {reason}")


class TraceError(Exception):
    """A trace could not be parsed or replayed."""

    def __init__(self, message: str, turn: Optional[int] = None):
        self.turn = turn
        super().__init__(message if turn is None else f"turn {turn}: {message}")


class AlternationError(TraceError):
    pass


# ---------------------------------------------------------------------------
# bias schedules


class BiasSchedule:
    """Number of edges Breaker claims in his t-th block (t >= 1)."""

    def allowance(self, t: int) -> int:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())


class Unit(BiasSchedule):
    def allowance(self, t: int) -> int:
        return 1

    def spec(self) -> str:
        return "unit"


class ConstantK(BiasSchedule):
    def __init__(self, k: int):
        if k < 1:
            raise ValueError("constant bias must be positive")
        self.k = k

    def allowance(self, t: int) -> int:
        return self.k

    def spec(self) -> str:
        return f"k:{self.k}"


class CeilLog2(BiasSchedule):
    def allowance(self, t: int) -> int:
        # ceil(log2(t + 2)) without floating point
        return (t + 1).bit_length()

    def spec(self) -> str:
        return "ceillog2"


class Linear(BiasSchedule):
    def __init__(self, slope: float):
        if slope <= 0:
            raise ValueError("linear bias needs a positive slope")
        self.slope = slope

    def allowance(self, t: int) -> int:
        return max(1, math.ceil(self.slope * t))

    def spec(self) -> str:
        return f"linear:{self.slope:g}"


def bias_from_spec(text: str) -> BiasSchedule:
    name, _, arg = text.strip().lower().partition(":")
    if name == "unit" and not arg:
        return Unit()
    if name == "k" and arg:
        return ConstantK(int(arg))
    if name == "ceillog2" and not arg:
        return CeilLog2()
    if name == "linear" and arg:
        return Linear(float(arg))
    raise ValueError(f"unknown bias schedule {text!r}")


def bias_allowance(schedule: BiasSchedule, breaker_turn_index: int) -> int:
    if breaker_turn_index < 1:
        raise ValueError("Breaker block index is 1-based")
    return schedule.allowance(breaker_turn_index)


# ---------------------------------------------------------------------------
# configuration and traces


@dataclass(frozen=True)
class GameConfig:
    horizon: int
    first_player: Player = Player.MAKER
    colouring: Colouring = field(default_factory=Diagonal)
    bias: BiasSchedule = field(default_factory=Unit)
    seed: int = 0
    maker: str = "vanilla"
    breaker: str = "passive"
    # strategy parameters, e.g. {"k": 3} or {"sequence": "antidiagonal"}
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def header(self) -> Dict[str, Any]:
        return {
            "format": TRACE_FORMAT,
            "horizon": self.horizon,
            "first_player": self.first_player.value,
            "colouring": self.colouring.to_config(),
            "bias": self.bias.spec(),
            "seed": self.seed,
            "maker": self.maker,
            "breaker": self.breaker,
            "params": dict(sorted(self.params.items())),
        }

    @classmethod
    def from_header(cls, header: Dict[str, Any]) -> "GameConfig":
        return cls(
            horizon=int(header["horizon"]),
            first_player=Player(header.get("first_player", "M")),
            colouring=colouring_from_config(header.get("colouring", {"kind": "diagonal"})),
            bias=bias_from_spec(header.get("bias", "unit")),
            seed=int(header.get("seed", 0)),
            maker=header.get("maker", "vanilla"),
            breaker=header.get("breaker", "passive"),
            params=dict(header.get("params", {})),
        )


@dataclass
class GameTrace:
    config: GameConfig
    moves: List[Claim] = field(default_factory=list)
    # turn -> strategy note, recorded for Maker moves
    annotations: Dict[int, Dict[str, Any]] = field(default_factory=dict)

    def maker_moves(self) -> List[Claim]:
        return [c for c in self.moves if c.player is Player.MAKER]

    def prefix(self, maker_moves: int) -> "GameTrace":
        """The trace truncated after ``maker_moves`` Maker moves and the following Breaker block."""
        seen = 0
        cut = len(self.moves)
        for i, c in enumerate(self.moves):
            if c.player is Player.MAKER:
                if seen == maker_moves:
                    cut = i
                    break
                seen += 1
        moves = self.moves[:cut]
        cfg = self.config
        config = GameConfig(
            horizon=max(1, min(maker_moves, cfg.horizon)),
            first_player=cfg.first_player,
            colouring=cfg.colouring,
            bias=cfg.bias,
            seed=cfg.seed,
            maker=cfg.maker,
            breaker=cfg.breaker,
            params=cfg.params,
        )
        last = moves[-1].turn if moves else 0
        notes = {t: n for t, n in self.annotations.items() if t <= last}
        return GameTrace(config, moves, notes)

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> str:
        lines = ["{", f' "header": {json.dumps(self.config.header(), sort_keys=True)},', ' "moves": [']
        for i, c in enumerate(self.moves):
            entry: Dict[str, Any] = {"turn": c.turn, "player": c.player.value, "edge": [c.edge.lo, c.edge.hi]}
            note = self.annotations.get(c.turn)
            if note is not None:
                entry["note"] = note
            sep = "," if i + 1 < len(self.moves) else ""
            lines.append("  " + json.dumps(entry, sort_keys=True, separators=(",", ":")) + sep)
        lines.append(" ]")
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GameTrace":
        """Parse a trace without checking legality (see :func:`replay`)."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TraceError(f"malformed JSON: {exc}") from None
        if not isinstance(data, dict) or "header" not in data or "moves" not in data:
            raise TraceError("trace must be an object with 'header' and 'moves'")
        try:
            config = GameConfig.from_header(data["header"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(f"bad header: {exc}") from None
        moves: List[Claim] = []
        notes: Dict[int, Dict[str, Any]] = {}
        for raw in data["moves"]:
            try:
                turn = int(raw["turn"])
                player = Player(raw["player"])
                u, v = raw["edge"]
                edge = canonical_edge(int(u), int(v))
            except (KeyError, TypeError, ValueError) as exc:
                raise TraceError(f"bad move entry {raw!r}: {exc}") from None
            moves.append(Claim(edge, player, turn))
            if "note" in raw:
                notes[turn] = raw["note"]
        return cls(config, moves, notes)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "GameTrace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# ---------------------------------------------------------------------------
# strategies and the game loop


class Strategy(Protocol):
    """A player. ``next_moves`` must return distinct unclaimed edges."""

    name: str
    last_note: Optional[Dict[str, Any]]

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        ...


def block_schedule(config: GameConfig):
    """Yield (player, allowance, block_index) for the blocks of a full game."""
    block = 0
    if config.first_player is Player.BREAKER:
        block += 1
        yield Player.BREAKER, config.bias.allowance(block), block
    for _ in range(config.horizon):
        yield Player.MAKER, 1, 0
        block += 1
        yield Player.BREAKER, config.bias.allowance(block), block


def _take_block(strategy: Strategy, ledger: ClaimLedger, allowance: int, player: Player) -> List[Edge]:
    turn = ledger.last_turn + 1
    try:
        raw = strategy.next_moves(ledger, allowance)
    except BoardError as exc:
        raise StrategyFault(strategy.name, turn, str(exc)) from exc
    if len(raw) != allowance:
        raise StrategyFault(strategy.name, turn, f"returned {len(raw)} edges, allowance is {allowance}")
    edges: List[Edge] = []
    for e in raw:
        try:
            e = canonical_edge(*e)
        except (BoardError, TypeError, ValueError) as exc:
            raise StrategyFault(strategy.name, turn, f"invalid edge {e!r}: {exc}") from None
        prior = ledger.claim_of(e)
        if prior is not None:
            raise StrategyFault(
                strategy.name, turn, f"edge {e} already claimed by {prior.player.label} at turn {prior.turn}"
            )
        if e in edges:
            raise StrategyFault(strategy.name, turn, f"edge {e} returned twice in one block")
        edges.append(e)
    return edges


def run_game(config: GameConfig, maker: Strategy, breaker: Strategy) -> GameTrace:
    ledger = ClaimLedger()
    trace = GameTrace(config)
    for player, allowance, _ in block_schedule(config):
        strategy = maker if player is Player.MAKER else breaker
        for e in _take_block(strategy, ledger, allowance, player):
            ledger.claim(e, player)
            trace.moves.append(ledger.claims[-1])
        if player is Player.MAKER and maker.last_note is not None:
            trace.annotations[ledger.last_turn] = dict(maker.last_note)
    return trace


def replay(trace: GameTrace, check_alternation: bool = True) -> ClaimLedger:
    """Rebuild the final ledger, failing exactly where live play would have failed.

    A trace may stop part-way through the last block (interactive sessions that
    were quit early); every earlier block must be complete.
    """
    ledger = ClaimLedger()
    expected = block_schedule(trace.config) if check_alternation else None
    remaining = 0
    player = None
    for c in trace.moves:
        if expected is not None:
            if remaining == 0:
                try:
                    player, remaining, _ = next(expected)
                except StopIteration:
                    raise AlternationError("moves beyond the configured horizon", c.turn) from None
            if c.player is not player:
                raise AlternationError(
                    f"{c.player.label} moved during a {player.label} block", c.turn
                )
            remaining -= 1
        try:
            ledger.claim(c.edge, c.player, c.turn)
        except IllegalMoveError:
            raise
        except BoardError as exc:
            raise TraceError(str(exc), c.turn) from None
    return ledger
