import itertools

import pytest

from kaleph import GameConfig, play, replay
from kaleph.board import ClaimLedger, Diagonal, Edge, ModK, Player, edge_enumeration
from kaleph.breaker import (
    GreedyBlocker,
    PairingFault,
    PairingTable,
    PassiveBreaker,
    RandomBreaker,
    UnsupportedColouringError,
    build_pairing_colours,
    filler_edges,
    make_breaker,
    pairing_response,
    unbounded_bias_moves,
)

M, B = Player.MAKER, Player.BREAKER


def greedy_colours_oracle(colouring, m):
    """Direct reading of the greedy rule, without the monotonicity shortcut."""
    out = []
    for i in range(1, m + 1):
        banned = set(out)
        for j in range(1, i + 1):
            banned.update(colouring.colour_of(x) for x in edge_enumeration(j))
        out.append(next(c for c in itertools.count() if c not in banned))
    return out


def test_first_colours():
    assert build_pairing_colours(Diagonal(), 3) == [1, 2, 3]


def test_colours_match_oracle():
    col = Diagonal()
    colours = build_pairing_colours(col, 200)
    assert colours == greedy_colours_oracle(col, 200)
    for m, c in enumerate(colours, start=1):
        assert c not in colours[: m - 1]
        for j in range(1, m + 1):
            assert c not in {col.colour_of(x) for x in edge_enumeration(j)}


def test_finite_colouring_unsupported():
    with pytest.raises(UnsupportedColouringError):
        PairingTable(ModK(4))
    with pytest.raises(UnsupportedColouringError):
        make_breaker("pairing", ModK(4))


def test_pairing_response_examples():
    table = PairingTable(Diagonal())
    ledger = ClaimLedger().claim((0, 4), M)
    assert pairing_response(table, Edge(0, 4), ledger) == (1, 4)
    ledger = ClaimLedger().claim((3, 6), M)
    assert table.pair_of(Edge(3, 6)) is None
    assert pairing_response(table, Edge(3, 6), ledger) == (0, 1)


def test_pairing_response_when_partner_taken():
    table = PairingTable(Diagonal())
    ledger = ClaimLedger().claim((1, 4), B).claim((0, 4), M)
    # partner already Breaker's: any filler will do
    assert pairing_response(table, Edge(0, 4), ledger) == (0, 1)
    ledger = ClaimLedger().claim((1, 4), M).claim((0, 4), M)
    with pytest.raises(PairingFault):
        pairing_response(table, Edge(0, 4), ledger)


def test_pairs_are_disjoint():
    table = PairingTable(Diagonal())
    seen = {}
    for (m, a, b), _ in zip(table.iter_pairs(), range(10_000)):
        assert a != b
        for e in (a, b):
            assert e not in seen, f"{e} in pairs for e_{seen[e]} and e_{m}"
            seen[e] = m
        assert table.pair_of(a) == (b, m)
        assert table.pair_of(b) == (a, m)


def test_unbounded_bias_examples():
    ledger = ClaimLedger().claim((5, 6), M)
    assert unbounded_bias_moves(ledger, 1, Edge(5, 6)) == [(0, 1)]
    assert unbounded_bias_moves(ledger, 2, Edge(5, 6)) == [(0, 1), (0, 2)]


def test_unbounded_bias_falls_back_to_filler():
    ledger = ClaimLedger().claim((0, 1), M)
    # the only spanned edge is Maker's, so the move is pure filler
    assert unbounded_bias_moves(ledger, 1, Edge(0, 1)) == [(0, 2)]


def test_filler_edges_skip_taken():
    ledger = ClaimLedger().claim((0, 1), M)
    assert filler_edges(ledger, 3) == [(0, 2), (1, 2), (0, 3)]
    assert filler_edges(ledger, 2, taken=[(0, 2)]) == [(1, 2), (0, 3)]
    assert filler_edges(ledger, 0) == []


def test_passive_stays_away():
    ledger = ClaimLedger().claim((0, 1), M)
    moves = PassiveBreaker(offset=100).next_moves(ledger, 3)
    assert moves == [(100, 101), (100, 102), (101, 102)]


def test_random_breaker_seeded():
    ledger = ClaimLedger().claim((0, 1), M).claim((3, 4), B)
    a = RandomBreaker(seed=5).next_moves(ledger, 4)
    assert a == RandomBreaker(seed=5).next_moves(ledger, 4)
    assert len(set(a)) == 4
    assert all(e.hi <= 5 and not ledger.is_claimed(e) for e in a)


def test_random_breaker_window_exhausted():
    # vertices 0..2 have only two free edges left; the rest is filler
    ledger = ClaimLedger().claim((0, 1), M)
    a = RandomBreaker(seed=1).next_moves(ledger, 3)
    assert set(a[:2]) == {(0, 2), (1, 2)}
    assert a[2] == (0, 3)


def test_greedy_blocker_cuts_newest_vertex():
    ledger = ClaimLedger().claim((0, 1), M).claim((5, 6), B).claim((0, 2), M)
    assert GreedyBlocker().next_moves(ledger, 1) == [(1, 2)]


@pytest.mark.parametrize("maker", ["vanilla", "infinite-colours"])
def test_pairing_breaker_games_are_legal(maker):
    trace = play(GameConfig(horizon=300, maker=maker, breaker="pairing"))
    ledger = replay(trace)
    table = PairingTable(Diagonal())
    for e in ledger.edges(M):
        hit = table.pair_of(e)
        if hit is not None:
            assert ledger.owner(hit[0]) is B
