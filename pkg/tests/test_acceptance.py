"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line."""

import dataclasses
import time

import pytest

from kaleph import GameConfig, GameTrace, play, replay
from kaleph.board import Diagonal, ModK, Player, Table, edge_enumeration
from kaleph.breaker import PairingTable, build_pairing_colours
from kaleph.certificate import (
    CliqueChain,
    brute_force_max_clique,
    certify,
    extract_chain,
    max_clique_containing,
    pairing_guarantee_check,
    verify_chain,
)
from kaleph.engine import CeilLog2

HORIZONS = (50, 200, 1000, 2000)
MAKERS = {
    "vanilla": (Diagonal(), {}),
    "finite-colours": (ModK(3), {"k": 3}),
    "infinite-colours": (Diagonal(), {}),
}
ADVERSARIES = [("passive", 0), ("random", 1), ("random", 2), ("random", 3), ("greedy-blocker", 0), ("pairing", 0)]

# chain lengths at HORIZONS, recorded once and frozen
FROZEN = {
    ("vanilla", "passive", 0): [10, 20, 45, 63],
    ("vanilla", "random", 1): [10, 18, 41, 58],
    ("vanilla", "random", 2): [9, 19, 38, 55],
    ("vanilla", "random", 3): [9, 18, 39, 58],
    ("vanilla", "greedy-blocker", 0): [9, 16, 40, 54],
    ("vanilla", "pairing", 0): [9, 18, 41, 58],
    ("finite-colours", "passive", 0): [3, 4, 4, 4],
    ("finite-colours", "random", 1): [3, 4, 4, 4],
    ("finite-colours", "random", 2): [3, 4, 4, 4],
    ("finite-colours", "random", 3): [3, 4, 4, 4],
    ("finite-colours", "greedy-blocker", 0): [3, 4, 4, 5],
    ("infinite-colours", "passive", 0): [2, 2, 2, 2],
    ("infinite-colours", "random", 1): [2, 2, 2, 2],
    ("infinite-colours", "random", 2): [2, 2, 2, 2],
    ("infinite-colours", "random", 3): [2, 2, 2, 2],
    ("infinite-colours", "greedy-blocker", 0): [2, 2, 2, 2],
    ("infinite-colours", "pairing", 0): [2, 2, 2, 2],
}

# largest Maker clique through e_1..e_5 under CeilLog2 bias
PLATEAU = [2, 0, 0, 3, 0]


def _config(maker, breaker, seed, horizon=HORIZONS[-1]):
    colouring, params = MAKERS[maker]
    return GameConfig(horizon=horizon, colouring=colouring, seed=seed, maker=maker, breaker=breaker, params=params)


def _cells():
    for maker, (colouring, _) in MAKERS.items():
        for breaker, seed in ADVERSARIES:
            if breaker == "pairing" and colouring.n_colours is not None:
                continue  # pairing needs infinitely many colours
            yield maker, breaker, seed


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def matrix():
    start = time.perf_counter()
    traces = {cell: play(_config(*cell)) for cell in _cells()}
    return traces, time.perf_counter() - start


def test_1_hand_trace(capsys):
    start = time.perf_counter()
    trace = play(GameConfig(horizon=7, maker="vanilla", breaker="passive"))
    edges = [tuple(c.edge) for c in trace.maker_moves()]
    size, clique = brute_force_max_clique(replay(trace))
    elapsed = time.perf_counter() - start
    expected = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 4)]
    ok = edges == expected and size == 4 and clique == {0, 1, 2, 3} and elapsed < 1
    report(capsys, 1, ok, f"maker edges {edges}, max clique {size}, {elapsed:.3f}s")


def test_2_chain_growth(capsys, matrix):
    traces, play_time = matrix
    start = time.perf_counter()
    bad = []
    for cell, trace in traces.items():
        lengths = [len(extract_chain(trace.prefix(h))) for h in HORIZONS]
        monotone = all(a <= b for a, b in zip(lengths, lengths[1:]))
        if not monotone or lengths[0] < 2 or lengths != FROZEN[cell]:
            bad.append(f"{cell}: {lengths}")
    elapsed = play_time + time.perf_counter() - start
    ok = not bad and set(traces) == set(FROZEN) and elapsed < 120
    report(capsys, 2, ok, f"{len(traces)} cells x {len(HORIZONS)} horizons in {elapsed:.1f}s {bad}")


def test_3_certificate_soundness(capsys, matrix):
    traces, _ = matrix
    bad = []
    for cell, trace in traces.items():
        for h in HORIZONS:
            prefix = trace.prefix(h)
            _, rep = certify(prefix)
            if not rep.passed:
                bad.append(f"{cell}@{h}: {rep.failures()}")
    # mutations: delete a clique edge, permute levels, recolour a vertex
    mutants = 0
    for cell, trace in traces.items():
        chain = extract_chain(trace)
        u, v = chain.clique[:2]
        cut = GameTrace(trace.config, [c for c in trace.moves if c.edge != (min(u, v), max(u, v))], trace.annotations)
        swapped = CliqueChain(chain.variant, [chain.levels[1], chain.levels[0], *chain.levels[2:]])
        cases = [(chain, cut), (swapped, trace)]
        if cell[0] == "finite-colours":
            w = chain.clique[1]
            recoloured = dataclasses.replace(trace.config, colouring=Table({w: (w + 1) % 3}, ModK(3)))
            cases.append((chain, GameTrace(recoloured, trace.moves, trace.annotations)))
        for c, t in cases:
            mutants += 1
            if verify_chain(c, t).passed:
                bad.append(f"{cell}: mutant {mutants} passed")
    report(capsys, 3, not bad, f"{len(traces) * len(HORIZONS)} chains verified, {mutants} mutants rejected {bad}")


def test_4_pairing(capsys):
    start = time.perf_counter()
    table = PairingTable(Diagonal())
    seen, clash = set(), 0
    for (m, a, b), _ in zip(table.iter_pairs(), range(10_000)):
        clash += a in seen or b in seen or a == b
        seen.update((a, b))
    col = Diagonal()
    colours = build_pairing_colours(col, 50)
    star = all(
        c not in colours[: m - 1] and all(c != col.colour_of(x) for j in range(1, m + 1) for x in edge_enumeration(j))
        for m, c in enumerate(colours, start=1)
    )
    guarantee = []
    for maker in ("vanilla", "infinite-colours"):
        trace = play(_config(maker, "pairing", 0))  # a fault would raise here
        guarantee.append(pairing_guarantee_check(trace).passed)
    elapsed = time.perf_counter() - start
    ok = clash == 0 and colours[:3] == [1, 2, 3] and star and all(guarantee) and elapsed < 60
    report(capsys, 4, ok, f"clashes {clash}, c_1..c_3 {colours[:3]}, greedy rule {star}, "
                          f"guarantee {guarantee}, {elapsed:.1f}s")


def test_5_finite_colour_law(capsys):
    bad = []
    for k in (1, 2, 3, 5):
        for breaker, seed in [("passive", 0), ("random", 1), ("greedy-blocker", 0)]:
            trace = play(GameConfig(horizon=1000, colouring=ModK(k), maker="finite-colours", breaker=breaker,
                                    seed=seed, params={"k": k}))
            _, rep = certify(trace, "finite", {"k": k})
            pattern = all(lvl["checks"].get("colour-pattern", False) for lvl in rep.per_level)
            if not (rep.checks.get("vertex-colour-law") and pattern and rep.passed):
                bad.append(f"k={k} {breaker}")
    report(capsys, 5, not bad, f"k in (1, 2, 3, 5) x 3 adversaries {bad}")


def test_6_unbounded_bias_plateau(capsys):
    start = time.perf_counter()
    trace = play(GameConfig(horizon=500, bias=CeilLog2(), maker="vanilla", breaker="unbounded-bias"))
    rows = []
    for h in (300, 400, 500):
        ledger = replay(trace.prefix(h))
        rows.append([max_clique_containing(ledger, edge_enumeration(n), vertex_cap=32) for n in range(1, 6)])
    elapsed = time.perf_counter() - start
    ok = rows[0] == rows[1] == rows[2] == PLATEAU and elapsed < 120
    report(capsys, 6, ok, f"cliques through e_1..e_5 at 300/400/500: {rows}, {elapsed:.1f}s")


def test_7_determinism(capsys, matrix):
    traces, _ = matrix
    bad = [cell for cell, trace in traces.items() if play(trace.config).to_json() != trace.to_json()]
    report(capsys, 7, not bad, f"{len(traces)} cells replayed byte-identically {bad}")


def test_8_no_fallbacks(capsys, matrix):
    traces, _ = matrix
    count = sum(
        1 for trace in traces.values() for note in trace.annotations.values() if note.get("rule") == "fallback"
    )
    ok = count == 0 and all(t.config.first_player is Player.MAKER for t in traces.values())
    report(capsys, 8, ok, f"{count} fallback moves across the matrix")
