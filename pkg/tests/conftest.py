import pytest

from kaleph import GameConfig, play


@pytest.fixture(scope="session")
def hand_game():
    """Vanilla Maker against the passive adversary for seven Maker moves."""
    return play(GameConfig(horizon=7, maker="vanilla", breaker="passive"))
