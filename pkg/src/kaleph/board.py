"""The infinite complete board on vertex set N, vertex colourings and the claim ledger.

Nothing here allocates vertices: any natural number is a vertex and any pair of
distinct naturals is an edge. The ledger records claims in order and answers the
neighbourhood/degree queries the strategies need.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Set


class BoardError(Exception):
    """Base class for board-level errors."""


class InvalidEdgeError(BoardError, ValueError):
    pass


class IllegalMoveError(BoardError):
    """An already-claimed edge was claimed again."""

    def __init__(self, edge: "Edge", prior: "Claim", turn: int):
        self.edge = edge
        self.prior = prior
        self.turn = turn
        super().__init__(
            f"edge ({edge.lo},{edge.hi}) claimed by {prior.player.label} at turn {prior.turn}"
        )


class ProtocolError(BoardError):
    """Turn numbering is not contiguous."""


class Player(Enum):
    MAKER = "M"
    BREAKER = "B"

    @property
    def label(self) -> str:
        return "Maker" if self is Player.MAKER else "Breaker"

    @property
    def other(self) -> "Player":
        return Player.BREAKER if self is Player.MAKER else Player.MAKER


class Edge(NamedTuple):
    lo: int
    hi: int

    def __str__(self) -> str:
        return f"{{{self.lo},{self.hi}}}"

    def other(self, v: int) -> int:
        if v == self.lo:
            return self.hi
        if v == self.hi:
            return self.lo
        raise ValueError(f"{v} is not an endpoint of {self}")


def canonical_edge(u: int, v: int) -> Edge:
    if u == v:
        raise InvalidEdgeError(f"self-loop at vertex {u}")
    if u < 0 or v < 0:
        raise InvalidEdgeError(f"negative vertex in ({u},{v})")
    return Edge(u, v) if u < v else Edge(v, u)


# Edges are enumerated by (hi, lo): {0,1},{0,2},{1,2},{0,3},...


def edge_enumeration(n: int) -> Edge:
    """Return the n-th edge (1-based) of the fixed board enumeration."""
    if n < 1:
        raise ValueError("edge enumeration is 1-based")
    m = n - 1
    hi = (1 + math.isqrt(8 * m + 1)) // 2
    lo = m - hi * (hi - 1) // 2
    return Edge(lo, hi)


def edge_index(edge: Edge) -> int:
    lo, hi = edge
    return hi * (hi - 1) // 2 + lo + 1


def iter_edges(min_vertex: int = 0) -> Iterator[Edge]:
    """All edges with both endpoints >= min_vertex, in enumeration order."""
    for hi in itertools.count(min_vertex + 1):
        for lo in range(min_vertex, hi):
            yield Edge(lo, hi)


# ---------------------------------------------------------------------------
# colourings


def _triangular_root(n: int) -> int:
    """Largest s with s(s+1)/2 <= n."""
    return (math.isqrt(8 * n + 1) - 1) // 2


class Colouring:
    """Total map from vertices to colour ids; every colour class is infinite."""

    #: number of colours, or None for infinitely many
    n_colours: Optional[int] = None

    def colour_of(self, v: int) -> int:
        raise NotImplementedError

    def class_members(self, colour: int) -> Iterator[int]:
        """Members of the colour class in increasing order (infinite iterator)."""
        raise NotImplementedError

    def has_colour(self, colour: int) -> bool:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Colouring) and self.to_config() == other.to_config()

    def __hash__(self):
        return hash(repr(self.to_config()))


class ModK(Colouring):
    def __init__(self, k: int):
        if k < 1:
            raise ValueError("ModK needs k >= 1")
        self.k = k
        self.n_colours = k

    def colour_of(self, v: int) -> int:
        return v % self.k

    def class_members(self, colour: int) -> Iterator[int]:
        if not self.has_colour(colour):
            raise ValueError(f"colour {colour} not in image of {self!r}")
        return itertools.count(colour, self.k)

    def has_colour(self, colour: int) -> bool:
        return 0 <= colour < self.k

    def to_config(self) -> dict:
        return {"kind": "modk", "k": self.k}

    def __repr__(self):
        return f"ModK({self.k})"


class Diagonal(Colouring):
    """Vertex n = s(s+1)/2 + i with 0 <= i <= s gets colour i."""

    n_colours = None

    def colour_of(self, v: int) -> int:
        s = _triangular_root(v)
        return v - s * (s + 1) // 2

    def class_members(self, colour: int) -> Iterator[int]:
        if colour < 0:
            raise ValueError("colours are non-negative")
        return (s * (s + 1) // 2 + colour for s in itertools.count(colour))

    def has_colour(self, colour: int) -> bool:
        return colour >= 0

    def to_config(self) -> dict:
        return {"kind": "diagonal"}

    def __repr__(self):
        return "Diagonal()"


class Table(Colouring):
    """Finitely many explicit overrides on top of a fallback colouring."""

    def __init__(self, overrides: Mapping[int, int], fallback: Colouring):
        self.fallback = fallback
        self.overrides = {int(v): int(c) for v, c in overrides.items()}
        for v, c in self.overrides.items():
            if v < 0:
                raise ValueError(f"negative vertex {v} in overrides")
            # a colour outside the fallback image would get a finite class
            if not fallback.has_colour(c):
                raise ValueError(f"override colour {c} is not in the image of {fallback!r}")
        self.n_colours = fallback.n_colours

    def colour_of(self, v: int) -> int:
        c = self.overrides.get(v)
        return self.fallback.colour_of(v) if c is None else c

    def class_members(self, colour: int) -> Iterator[int]:
        extra = sorted(v for v, c in self.overrides.items() if c == colour)
        base = (v for v in self.fallback.class_members(colour) if v not in self.overrides)
        return heapq.merge(extra, base)

    def has_colour(self, colour: int) -> bool:
        return self.fallback.has_colour(colour)

    def to_config(self) -> dict:
        return {
            "kind": "table",
            "overrides": {str(v): c for v, c in sorted(self.overrides.items())},
            "fallback": self.fallback.to_config(),
        }

    def __repr__(self):
        return f"Table({self.overrides!r}, {self.fallback!r})"


def colour_of(colouring: Colouring, v: int) -> int:
    return colouring.colour_of(v)


def colouring_from_config(cfg) -> Colouring:
    """Build a colouring from its JSON config or a CLI string (``modk:3``, ``diagonal``)."""
    if isinstance(cfg, str):
        name, _, arg = cfg.partition(":")
        name = name.strip().lower()
        if name == "diagonal" and not arg:
            return Diagonal()
        if name == "modk" and arg:
            return ModK(int(arg))
        raise ValueError(f"unknown colouring {cfg!r}")
    kind = cfg.get("kind")
    if kind == "modk":
        return ModK(int(cfg["k"]))
    if kind == "diagonal":
        return Diagonal()
    if kind == "table":
        return Table(cfg.get("overrides", {}), colouring_from_config(cfg["fallback"]))
    raise ValueError(f"unknown colouring kind {kind!r}")


# ---------------------------------------------------------------------------
# claims


@dataclass(frozen=True)
class Claim:
    edge: Edge
    player: Player
    turn: int


_NO_NEIGHBOURS: frozenset = frozenset()


@dataclass
class ClaimLedger:
    """Append-only record of who claimed which edge on which turn."""

    claims: List[Claim] = field(default_factory=list)

    def __post_init__(self):
        pending, self.claims = self.claims, []
        self._index: Dict[Edge, Claim] = {}
        self._adj: Dict[Player, Dict[int, Set[int]]] = {Player.MAKER: {}, Player.BREAKER: {}}
        self._touched: Set[int] = set()
        self._cursors: Dict[int, Iterator[Edge]] = {}
        self._cursor_head: Dict[int, Edge] = {}
        for c in pending:
            self.claim(c.edge, c.player, c.turn)

    @property
    def index(self) -> Mapping[Edge, Claim]:
        return self._index

    @property
    def last_turn(self) -> int:
        return self.claims[-1].turn if self.claims else 0

    def __len__(self) -> int:
        return len(self.claims)

    def claim(self, edge: Edge, player: Player, turn: Optional[int] = None) -> "ClaimLedger":
        """Record a claim; ``turn`` defaults to the next turn number."""
        edge = canonical_edge(*edge)
        expected = self.last_turn + 1
        if turn is None:
            turn = expected
        prior = self._index.get(edge)
        if prior is not None:
            raise IllegalMoveError(edge, prior, turn)
        if turn != expected:
            raise ProtocolError(f"turn {turn} after turn {self.last_turn}; expected {expected}")
        c = Claim(edge, player, turn)
        self.claims.append(c)
        self._index[edge] = c
        adj = self._adj[player]
        adj.setdefault(edge.lo, set()).add(edge.hi)
        adj.setdefault(edge.hi, set()).add(edge.lo)
        self._touched.add(edge.lo)
        self._touched.add(edge.hi)
        return self

    # -- queries ----------------------------------------------------------

    def claim_of(self, edge: Edge) -> Optional[Claim]:
        return self._index.get(canonical_edge(*edge))

    def owner(self, edge: Edge) -> Optional[Player]:
        c = self._index.get(canonical_edge(*edge))
        return None if c is None else c.player

    def is_claimed(self, edge: Edge) -> bool:
        return canonical_edge(*edge) in self._index

    def neighbours(self, player: Player, v: int) -> Set[int]:
        """N_player(v). The returned set is live; do not mutate it."""
        return self._adj[player].get(v, _NO_NEIGHBOURS)

    def degree(self, player: Player, v: int) -> int:
        return len(self._adj[player].get(v, _NO_NEIGHBOURS))

    def vertices(self, player: Player) -> Set[int]:
        return set(self._adj[player])

    def edges(self, player: Player) -> List[Edge]:
        return [c.edge for c in self.claims if c.player is player]

    def is_fresh(self, v: int) -> bool:
        return v not in self._touched

    @property
    def touched(self) -> Set[int]:
        return self._touched

    def smallest_unclaimed(self, min_vertex: int = 0) -> Edge:
        """Smallest unclaimed edge (enumeration order) with both endpoints >= min_vertex."""
        head = self._cursor_head.get(min_vertex)
        if head is None:
            it = self._cursors[min_vertex] = iter_edges(min_vertex)
            head = next(it)
        it = self._cursors[min_vertex]
        while head in self._index:
            head = next(it)
        self._cursor_head[min_vertex] = head
        return head

    def copy(self) -> "ClaimLedger":
        return ClaimLedger(list(self.claims))

    def __eq__(self, other):
        return isinstance(other, ClaimLedger) and self.claims == other.claims
