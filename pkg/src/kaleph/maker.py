"""Maker's strategies: vanilla, finitely many colours, infinitely many colours.

All three share :class:`MakerState`, which tracks the order in which Maker
introduced her vertices (``v_1, v_2, ...``) and, per vertex, the order in which
Maker connected it to other vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Set

from .board import ClaimLedger, Colouring, Diagonal, Edge, Player, _triangular_root, canonical_edge

M = Player.MAKER
B = Player.BREAKER


# ---------------------------------------------------------------------------
# colour sequences


class ColourSequence:
    """A rule n -> colour (n >= 1) in which every colour occurs infinitely often."""

    name = "sequence"

    def __call__(self, n: int) -> int:
        raise NotImplementedError

    def __iter__(self) -> Iterator[int]:
        return (self(n) for n in itertools.count(1))


class AntiDiagonal(ColourSequence):
    """0; 0,1; 0,1,2; 0,1,2,3; ..."""

    name = "antidiagonal"

    def __call__(self, n: int) -> int:
        if n < 1:
            raise ValueError("colour sequences are 1-based")
        m = n - 1
        s = _triangular_root(m)
        return m - s * (s + 1) // 2


SEQUENCES = {"antidiagonal": AntiDiagonal}


def sequence_from_name(name: str) -> ColourSequence:
    try:
        return SEQUENCES[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown colour sequence {name!r}; known: {sorted(SEQUENCES)}") from None


def rank_map(indices: Iterable[int]) -> Dict[int, int]:
    """Order-preserving bijection from 1..|W| onto the given introduction indices."""
    return {pos: i for pos, i in enumerate(sorted(set(indices)), start=1)}


# ---------------------------------------------------------------------------
# shared state


@dataclass
class MakerState:
    vertices: List[int] = field(default_factory=list)
    index: Dict[int, int] = field(default_factory=dict)
    conn_order: Dict[int, List[int]] = field(default_factory=dict)
    _synced: int = 0
    _fresh: Dict[Optional[int], Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def v(self, i: int) -> int:
        """The i-th introduced vertex (1-based)."""
        return self.vertices[i - 1]

    def introduce(self, *vs: int) -> None:
        for x in vs:
            if x not in self.index:
                self.vertices.append(x)
                self.index[x] = len(self.vertices)
                self.conn_order[x] = []

    def observe(self, edge: Edge) -> None:
        a, b = edge
        self.introduce(*[x for x in (a, b) if x not in self.index])
        self.conn_order[a].append(b)
        self.conn_order[b].append(a)

    def sync(self, ledger: ClaimLedger) -> None:
        claims = ledger.claims
        for c in claims[self._synced:]:
            if c.player is M:
                self.observe(c.edge)
        self._synced = len(claims)

    def fresh_vertex(self, ledger: ClaimLedger, colouring: Optional[Colouring] = None,
                     colour: Optional[int] = None, exclude: Set[int] = frozenset()) -> int:
        """Smallest vertex touched by nobody, optionally restricted to a colour class."""
        key = None if colouring is None else colour
        slot = self._fresh.get(key)
        if slot is None:
            it = itertools.count() if colouring is None else colouring.class_members(colour)
            slot = self._fresh[key] = [it, next(it)]
        it, head = slot
        while not ledger.is_fresh(head) or head in self.index:
            head = next(it)
        slot[1] = head
        if head in exclude:
            # only the first move excludes, and then only the vertex just picked
            return next(x for x in it if ledger.is_fresh(x) and x not in exclude and x not in self.index)
        return head

    def common_neighbourhood(self, ledger: ClaimLedger, vs: Iterable[int]) -> Set[int]:
        """Maker vertices adjacent in G_M to every vertex of ``vs``."""
        sets = sorted((ledger.neighbours(M, a) for a in vs), key=len)
        if not sets:
            return set(self.vertices)
        return sets[0].intersection(*sets[1:])


@dataclass
class MakerChoice:
    edge: Edge
    note: Dict[str, Any]


def _first_move(state: MakerState, ledger: ClaimLedger, colouring=None, c1=None, c2=None) -> MakerChoice:
    v1 = state.fresh_vertex(ledger, colouring, c1)
    v2 = state.fresh_vertex(ledger, colouring, c2, exclude={v1})
    state.introduce(v1, v2)
    return MakerChoice(canonical_edge(v1, v2), {"rule": "first", "intro": [v1, v2]})


def _fresh_move(state: MakerState, ledger: ClaimLedger, colouring=None, colour=None, **note) -> MakerChoice:
    w = state.fresh_vertex(ledger, colouring, colour)
    note.setdefault("rule", "fresh")
    note["vertex"] = w
    return MakerChoice(canonical_edge(state.v(1), w), note)


# ---------------------------------------------------------------------------
# strategies


def vanilla_next(state: MakerState, ledger: ClaimLedger) -> MakerChoice:
    """Connect the newest vertex to the oldest vertex whose neighbourhood covers its own."""
    state.sync(ledger)
    if not state.vertices:
        return _first_move(state, ledger)
    vn = state.last
    n = state.n
    idx = state.index
    nb = ledger.neighbours(M, vn)
    common = state.common_neighbourhood(ledger, nb)
    best = None
    for u in common:
        i = idx[u]
        if i < n and (best is None or i < best) and not ledger.is_claimed((u, vn)):
            best = i
    if best is None:
        return _fresh_move(state, ledger, n=n)
    return MakerChoice(canonical_edge(state.v(best), vn), {"rule": "connect", "n": n, "candidate": best})


def _balanced_pick(state: MakerState, ledger: ClaimLedger, vn: int, F: Sequence[int], K: Set[int]):
    """Order F by (|N_M(v) & K|, index) and return the first member not blocked by Breaker."""
    idx = state.index
    keyed = sorted(F, key=lambda v: (len(ledger.neighbours(M, v) & K), idx[v]))
    for rank, v in enumerate(keyed):
        if ledger.owner((v, vn)) is None:
            return v, rank
    return None, None


def finite_colours_next(state: MakerState, ledger: ClaimLedger, colouring: Colouring, k: int) -> MakerChoice:
    """Maker's move when the board carries k colours; the j-th vertex gets colour j mod k."""
    if colouring.n_colours is None or colouring.n_colours != k:
        raise ValueError(f"finite-colours strategy needs a {k}-colouring, got {colouring!r}")
    state.sync(ledger)
    if not state.vertices:
        return _first_move(state, ledger, colouring, 1 % k, 2 % k)
    vn = state.last
    n = state.n
    idx = state.index
    d = ledger.degree(M, vn)
    target = (d + 1) % k
    h = colouring.colour_of(vn)
    nb = ledger.neighbours(M, vn)
    floor = max(idx[a] for a in nb)
    common = state.common_neighbourhood(ledger, nb)
    need = k * d + 1
    F = sorted(
        (u for u in common if floor < idx[u] < n and colouring.colour_of(u) == target),
        key=idx.__getitem__,
    )[:need]
    note = {"n": n, "target": target, "F": len(F)}
    if len(F) < need:
        return _fresh_move(state, ledger, colouring, (n + 1) % k, **note)
    top = idx[F[-1]]
    K = {u for u in common if idx[u] > top and colouring.colour_of(u) == h}
    note["K"] = len(K)
    v, rank = _balanced_pick(state, ledger, vn, F, K)
    if v is None:
        return _fresh_move(state, ledger, colouring, (n + 1) % k, rule="fallback", **note)
    note.update(rule="connect", rank=rank)
    return MakerChoice(canonical_edge(v, vn), note)


def infinite_colours_next(state: MakerState, ledger: ClaimLedger, colouring: Colouring,
                          sequence: ColourSequence) -> MakerChoice:
    """Maker's move on a board with infinitely many colours, visiting colours along ``sequence``."""
    if colouring.n_colours is not None:
        raise ValueError(f"infinite-colours strategy needs infinitely many colours, got {colouring!r}")
    state.sync(ledger)
    if not state.vertices:
        return _first_move(state, ledger, colouring, sequence(1), sequence(2))
    vn = state.last
    n = state.n
    idx = state.index
    conn = state.conn_order[vn]
    d = len(conn)
    cn = colouring.colour_of(vn)
    nb = ledger.neighbours(M, vn)
    floor = max(idx[a] for a in nb)
    common = state.common_neighbourhood(ledger, nb)

    # vertices connected first to exactly the same vertices in the same order
    U = sorted((u for u in common if idx[u] > floor and state.conn_order[u][:d] == conn), key=idx.__getitem__)
    u_same = sum(1 for u in U if colouring.colour_of(u) == cn)
    target = colouring.colour_of(U[u_same - 1])

    need = (len({colouring.colour_of(a) for a in nb}) + 2) * d + 1
    F = sorted(
        (u for u in common if floor < idx[u] < n and colouring.colour_of(u) == target),
        key=idx.__getitem__,
    )[:need]
    note = {"n": n, "target": target, "U": len(U), "U_same": u_same, "F": len(F)}
    if len(F) < need:
        return _fresh_move(state, ledger, colouring, sequence(n + 1), **note)
    top = idx[F[-1]]
    K = {u for u in common if idx[u] > top and colouring.colour_of(u) == cn}
    note["K"] = len(K)
    v, rank = _balanced_pick(state, ledger, vn, F, K)
    if v is None:
        return _fresh_move(state, ledger, colouring, sequence(n + 1), rule="fallback", **note)
    note.update(rule="connect", rank=rank)
    return MakerChoice(canonical_edge(v, vn), note)


# ---------------------------------------------------------------------------
# engine adapters


class _MakerStrategy:
    name = "maker"

    def __init__(self, colouring: Colouring):
        self.colouring = colouring
        self.state = MakerState()
        self.last_note: Optional[Dict[str, Any]] = None

    def _choose(self, ledger: ClaimLedger) -> MakerChoice:
        raise NotImplementedError

    def next_moves(self, ledger: ClaimLedger, allowance: int = 1) -> List[Edge]:
        choice = self._choose(ledger)
        self.last_note = choice.note
        return [choice.edge]


class VanillaMaker(_MakerStrategy):
    name = "vanilla"

    def _choose(self, ledger):
        return vanilla_next(self.state, ledger)


class FiniteColoursMaker(_MakerStrategy):
    name = "finite-colours"

    def __init__(self, colouring: Colouring, k: Optional[int] = None):
        super().__init__(colouring)
        self.k = colouring.n_colours if k is None else k
        if self.k is None or colouring.n_colours != self.k:
            raise ValueError(f"finite-colours strategy needs a k-colouring, got {colouring!r}")

    def _choose(self, ledger):
        return finite_colours_next(self.state, ledger, self.colouring, self.k)


class InfiniteColoursMaker(_MakerStrategy):
    name = "infinite-colours"

    def __init__(self, colouring: Colouring, sequence: Optional[ColourSequence] = None):
        super().__init__(colouring)
        if colouring.n_colours is not None:
            raise ValueError(f"infinite-colours strategy needs infinitely many colours, got {colouring!r}")
        self.sequence = sequence or AntiDiagonal()

    def _choose(self, ledger):
        return infinite_colours_next(self.state, ledger, self.colouring, self.sequence)


MAKERS = ("vanilla", "finite-colours", "infinite-colours")


def make_maker(name: str, colouring: Colouring, params: Optional[Dict[str, Any]] = None) -> _MakerStrategy:
    params = params or {}
    if name == "vanilla":
        return VanillaMaker(colouring)
    if name == "finite-colours":
        return FiniteColoursMaker(colouring, params.get("k"))
    if name == "infinite-colours":
        return InfiniteColoursMaker(colouring, sequence_from_name(params.get("sequence", "antidiagonal")))
    raise ValueError(f"unknown Maker strategy {name!r}; known: {', '.join(MAKERS)}")
