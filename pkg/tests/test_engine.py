import pytest

from kaleph import GameConfig, GameTrace, play, replay, run_game
from kaleph.board import Claim, Diagonal, Edge, IllegalMoveError, ModK, Player
from kaleph.engine import (
    AlternationError,
    CeilLog2,
    ConstantK,
    Linear,
    StrategyFault,
    TraceError,
    Unit,
    bias_allowance,
    bias_from_spec,
    block_schedule,
)
from kaleph.game import strategies

M, B = Player.MAKER, Player.BREAKER
HAND = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 4)]


def test_horizon_one():
    trace = play(GameConfig(horizon=1))
    assert [c.player for c in trace.moves] == [M, B]
    assert trace.moves[0].edge == (0, 1)
    assert min(trace.moves[1].edge) >= 1000


def test_hand_game(hand_game):
    assert [c.edge for c in hand_game.maker_moves()] == HAND
    assert [c.turn for c in hand_game.moves] == list(range(1, 15))


@pytest.mark.parametrize("horizon", [0, -3])
def test_bad_horizon(horizon):
    with pytest.raises(ValueError):
        GameConfig(horizon=horizon)


def test_bias_examples():
    assert bias_allowance(Unit(), 17) == 1
    assert bias_allowance(ConstantK(3), 5) == 3
    assert bias_allowance(CeilLog2(), 1) == 2
    with pytest.raises(ValueError):
        bias_allowance(Unit(), 0)


def test_ceillog2_matches_float_formula():
    import math

    for t in range(1, 5000):
        assert CeilLog2().allowance(t) == math.ceil(math.log2(t + 2))


def test_bias_specs_roundtrip():
    for b in (Unit(), ConstantK(4), CeilLog2(), Linear(0.5)):
        assert bias_from_spec(b.spec()) == b
    with pytest.raises(ValueError):
        bias_from_spec("fast")
    assert Linear(0.5).allowance(3) == 2


def test_block_schedule_breaker_first():
    cfg = GameConfig(horizon=2, first_player=B, bias=ConstantK(2))
    assert list(block_schedule(cfg)) == [(B, 2, 1), (M, 1, 0), (B, 2, 2), (M, 1, 0), (B, 2, 3)]


def test_biased_game_block_sizes():
    trace = play(GameConfig(horizon=5, bias=CeilLog2(), breaker="unbounded-bias"))
    players = "".join(c.player.value for c in trace.moves)
    assert players == "M" + "BB" + "M" + "BB" + "M" + "BBB" + "M" + "BBB" + "M" + "BBB"
    replay(trace)


def test_json_roundtrip(hand_game):
    text = hand_game.to_json()
    again = GameTrace.from_json(text)
    assert again.to_json() == text
    assert again.config == hand_game.config
    assert replay(again) == replay(hand_game)


def test_same_config_same_bytes():
    cfg = GameConfig(horizon=60, colouring=ModK(2), maker="finite-colours", breaker="random", seed=7, params={"k": 2})
    assert play(cfg).to_json() == play(cfg).to_json()


def test_replay_duplicate_edge(hand_game):
    moves = list(hand_game.moves)
    moves[3] = Claim(moves[0].edge, moves[3].player, moves[3].turn)
    with pytest.raises(IllegalMoveError) as info:
        replay(GameTrace(hand_game.config, moves))
    assert info.value.turn == 4


def test_replay_two_maker_moves_in_a_row(hand_game):
    moves = list(hand_game.moves)
    moves[1] = Claim(Edge(7, 8), M, 2)
    with pytest.raises(AlternationError):
        replay(GameTrace(hand_game.config, moves))


def test_replay_too_many_moves(hand_game):
    moves = list(hand_game.moves) + [Claim(Edge(50, 51), M, 15)]
    with pytest.raises(AlternationError):
        replay(GameTrace(hand_game.config, moves))


def test_replay_accepts_partial_last_block():
    trace = play(GameConfig(horizon=3, bias=ConstantK(3)))
    partial = GameTrace(trace.config, trace.moves[:-2])
    assert len(replay(partial)) == len(trace.moves) - 2


@pytest.mark.parametrize("text", ["not json", "[]", '{"header": {}, "moves": []}',
                                  '{"header": {"horizon": 1}, "moves": [{"turn": 1}]}'])
def test_malformed_traces(text):
    with pytest.raises(TraceError):
        GameTrace.from_json(text)


class _Echo:
    name = "echo"
    last_note = None

    def __init__(self, edges):
        self.edges = edges

    def next_moves(self, ledger, allowance):
        return self.edges


def test_strategy_fault_on_claimed_edge():
    cfg = GameConfig(horizon=2)
    maker, _ = strategies(cfg)
    with pytest.raises(StrategyFault) as info:
        run_game(cfg, maker, _Echo([(0, 1)]))
    assert info.value.strategy == "echo" and info.value.turn == 2


def test_strategy_fault_on_wrong_block_size():
    cfg = GameConfig(horizon=1, bias=ConstantK(2))
    maker, _ = strategies(cfg)
    with pytest.raises(StrategyFault):
        run_game(cfg, maker, _Echo([(5, 6)]))
    with pytest.raises(StrategyFault):
        run_game(cfg, maker, _Echo([(5, 6), (6, 5)]))


def test_prefix(hand_game):
    p = hand_game.prefix(3)
    assert [c.edge for c in p.maker_moves()] == HAND[:3]
    assert len(p.moves) == 6
    replay(p)
