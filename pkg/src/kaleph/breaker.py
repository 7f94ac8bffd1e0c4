"""Breaker strategies: the colour pairing strategy, the unbounded-bias strategy
and a few adversaries used to stress Maker.

Every Breaker strategy fills its block up to the allowance with *filler* edges
(smallest unclaimed edges in enumeration order) when it has nothing better to do.
"""

from __future__ import annotations

import itertools
import random
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .board import (
    ClaimLedger,
    Colouring,
    Edge,
    Player,
    canonical_edge,
    edge_enumeration,
    edge_index,
)
from .maker import MakerState

M = Player.MAKER
B = Player.BREAKER


class UnsupportedColouringError(ValueError):
    pass


class PairingFault(RuntimeError):
    """The partner of a Maker edge was already Maker's: the pairing was not followed."""


def _iter_edges_from(start: Edge, min_vertex: int = 0) -> Iterator[Edge]:
    lo, hi = start
    while True:
        for u in range(lo, hi):
            yield Edge(u, hi)
        hi += 1
        lo = min_vertex


def filler_edges(ledger: ClaimLedger, count: int, taken: Sequence[Edge] = (), min_vertex: int = 0) -> List[Edge]:
    """The ``count`` smallest edges that are neither claimed nor in ``taken``."""
    if count <= 0:
        return []
    skip = set(taken)
    out: List[Edge] = []
    for e in _iter_edges_from(ledger.smallest_unclaimed(min_vertex), min_vertex):
        if e in skip or ledger.is_claimed(e):
            continue
        out.append(e)
        if len(out) == count:
            return out
    raise AssertionError("unreachable: the board is infinite")


def _last_maker_edge(ledger: ClaimLedger, after_turn: int = 0) -> Optional[Edge]:
    for c in reversed(ledger.claims):
        if c.turn <= after_turn:
            return None
        if c.player is M:
            return c.edge
    return None


# ---------------------------------------------------------------------------
# pairing strategy


class PairingTable:
    """Lazily built colour pairing.

    ``colours[m-1]`` is c_m: the smallest colour differing from c_1..c_{m-1}
    and from the colours of every endpoint of e_1..e_m. For e_m = {x, y} and
    each vertex v of colour c_m, the edges {v,x} and {v,y} form a pair.
    """

    def __init__(self, colouring: Colouring):
        if colouring.n_colours is not None:
            raise UnsupportedColouringError(
                f"the pairing strategy needs infinitely many colours, got {colouring!r}"
            )
        self.colouring = colouring
        self.colours: List[int] = []
        self._forbidden: Set[int] = set()
        self._m_of: Dict[int, int] = {}
        self._members: Dict[int, List[int]] = {}
        self._member_iters: Dict[int, Iterator[int]] = {}

    def edge(self, m: int) -> Edge:
        return edge_enumeration(m)

    def _extend(self) -> None:
        m = len(self.colours) + 1
        lo, hi = edge_enumeration(m)
        self._forbidden.add(self.colouring.colour_of(lo))
        self._forbidden.add(self.colouring.colour_of(hi))
        # c_m increases strictly, so the search can start above c_{m-1}
        c = self.colours[-1] + 1 if self.colours else 0
        while c in self._forbidden:
            c += 1
        self.colours.append(c)
        self._forbidden.add(c)
        self._m_of[c] = m

    def colour(self, m: int) -> int:
        while len(self.colours) < m:
            self._extend()
        return self.colours[m - 1]

    def m_of_colour(self, colour: int) -> Optional[int]:
        """The m with c_m = colour, or None if no edge reserves this colour."""
        while not self.colours or self.colours[-1] < colour:
            self._extend()
        return self._m_of.get(colour)

    def class_member(self, m: int, j: int) -> int:
        """The j-th (0-based) vertex of colour c_m."""
        members = self._members.setdefault(m, [])
        if m not in self._member_iters:
            self._member_iters[m] = self.colouring.class_members(self.colour(m))
        it = self._member_iters[m]
        while len(members) <= j:
            members.append(next(it))
        return members[j]

    def pair(self, m: int, v: int) -> Tuple[Edge, Edge]:
        x, y = self.edge(m)
        return canonical_edge(v, x), canonical_edge(v, y)

    def pair_of(self, edge: Edge) -> Optional[Tuple[Edge, int]]:
        """Partner of ``edge`` and the index m of the edge it protects, if paired."""
        a, b = canonical_edge(*edge)
        found = None
        for x, v in ((a, b), (b, a)):
            m = self.m_of_colour(self.colouring.colour_of(v))
            if m is None:
                continue
            e = self.edge(m)
            if x in e:
                hit = (canonical_edge(v, e.other(x)), m)
                assert found is None, f"edge {edge} lies in two pairs"
                found = hit
        return found

    def iter_pairs(self) -> Iterator[Tuple[int, Edge, Edge]]:
        """All pairs, enumerated anti-diagonally over (m, j)."""
        for s in itertools.count():
            for m in range(1, s + 2):
                j = s + 1 - m
                v = self.class_member(m, j)
                yield (m, *self.pair(m, v))


def build_pairing_colours(colouring: Colouring, m: int) -> List[int]:
    table = PairingTable(colouring)
    table.colour(m)
    return list(table.colours[:m])


def pairing_response(table: PairingTable, maker_edge: Edge, ledger: ClaimLedger) -> Edge:
    hit = table.pair_of(maker_edge)
    if hit is not None:
        partner, m = hit
        owner = ledger.owner(partner)
        if owner is None:
            return partner
        if owner is M:
            raise PairingFault(
                f"Maker owns both {canonical_edge(*maker_edge)} and its partner {partner} (pair of e_{m})"
            )
    return filler_edges(ledger, 1)[0]


# ---------------------------------------------------------------------------
# unbounded bias


def unbounded_bias_moves(ledger: ClaimLedger, allowance: int, maker_edge: Optional[Edge] = None) -> List[Edge]:
    """For i = 1..allowance, claim the smallest free edge spanned by {x, y} and e_i."""
    if maker_edge is None:
        maker_edge = _last_maker_edge(ledger)
    out: List[Edge] = []
    if maker_edge is not None:
        x, y = maker_edge
        for i in range(1, allowance + 1):
            xi, yi = edge_enumeration(i)
            vs = sorted({x, y, xi, yi})
            free = [
                Edge(a, b)
                for a, b in itertools.combinations(vs, 2)
                if not ledger.is_claimed(Edge(a, b)) and Edge(a, b) not in out
            ]
            if free:
                out.append(min(free, key=edge_index))
    return out + filler_edges(ledger, allowance - len(out), out)


# ---------------------------------------------------------------------------
# engine adapters


class _BreakerStrategy:
    name = "breaker"

    def __init__(self):
        self.last_note: Optional[Dict[str, Any]] = None


class PairingBreaker(_BreakerStrategy):
    name = "pairing"

    def __init__(self, colouring: Colouring):
        super().__init__()
        self.table = PairingTable(colouring)
        self._answered = 0

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        out: List[Edge] = []
        e = _last_maker_edge(ledger, self._answered)
        self._answered = ledger.last_turn
        if e is not None:
            out.append(pairing_response(self.table, e, ledger))
        return out + filler_edges(ledger, allowance - len(out), out)


class UnboundedBiasBreaker(_BreakerStrategy):
    name = "unbounded-bias"

    def __init__(self):
        super().__init__()
        self._answered = 0

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        e = _last_maker_edge(ledger, self._answered)
        self._answered = ledger.last_turn
        if e is None:
            return filler_edges(ledger, allowance)
        return unbounded_bias_moves(ledger, allowance, e)


class PassiveBreaker(_BreakerStrategy):
    """Claims the smallest free edges among vertices >= offset, far from Maker."""

    name = "passive"

    def __init__(self, offset: int = 1000):
        super().__init__()
        self.offset = offset

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        return filler_edges(ledger, allowance, min_vertex=self.offset)


class RandomBreaker(_BreakerStrategy):
    """Uniform over free edges on the vertices 0..max_touched+1."""

    name = "random"
    attempts = 64

    def __init__(self, seed: int = 0):
        super().__init__()
        self.rng = random.Random(seed)
        self._top = 0
        self._seen = 0

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        for c in ledger.claims[self._seen:]:
            self._top = max(self._top, c.edge.hi)
        self._seen = len(ledger.claims)
        width = self._top + 2
        out: List[Edge] = []
        while len(out) < allowance:
            for _ in range(self.attempts):
                u, v = self.rng.sample(range(width), 2)
                e = canonical_edge(u, v)
                if e not in out and not ledger.is_claimed(e):
                    out.append(e)
                    break
            else:
                out.extend(filler_edges(ledger, 1, out))
        return out


class GreedyBlocker(_BreakerStrategy):
    """Cuts Maker's newest vertex off from the greedy clique on her vertices."""

    name = "greedy-blocker"

    def __init__(self):
        super().__init__()
        self.state = MakerState()

    def clique(self, ledger: ClaimLedger) -> List[int]:
        chosen: List[int] = []
        for v in self.state.vertices:
            nb = ledger.neighbours(M, v)
            if all(u in nb for u in chosen):
                chosen.append(v)
        return chosen

    def next_moves(self, ledger: ClaimLedger, allowance: int) -> List[Edge]:
        self.state.sync(ledger)
        out: List[Edge] = []
        if self.state.vertices:
            newest = self.state.last
            for u in self.clique(ledger):
                if len(out) == allowance:
                    break
                if u == newest:
                    continue
                e = canonical_edge(u, newest)
                if not ledger.is_claimed(e):
                    out.append(e)
        return out + filler_edges(ledger, allowance - len(out), out)


BREAKERS = ("pairing", "unbounded-bias", "passive", "random", "greedy-blocker")


def make_breaker(name: str, colouring: Colouring, seed: int = 0,
                 params: Optional[Dict[str, Any]] = None) -> _BreakerStrategy:
    params = params or {}
    if name == "pairing":
        return PairingBreaker(colouring)
    if name == "unbounded-bias":
        return UnboundedBiasBreaker()
    if name == "passive":
        return PassiveBreaker(int(params.get("offset", 1000)))
    if name == "random":
        return RandomBreaker(seed)
    if name == "greedy-blocker":
        return GreedyBlocker()
    raise ValueError(f"unknown Breaker strategy {name!r}; known: {', '.join(BREAKERS)}")
