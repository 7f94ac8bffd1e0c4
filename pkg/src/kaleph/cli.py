"""Command-line front end.

Exit codes: 0 ok, 1 bad flags or failed certificate, 2 strategy fault,
3 malformed or illegal trace.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO

from .board import ClaimLedger, IllegalMoveError, InvalidEdgeError, Player, canonical_edge, colouring_from_config
from .breaker import BREAKERS, UnsupportedColouringError, make_breaker
from .certificate import VARIANTS, certify, claimed_ledger, extract_chain, growth_csv, growth_curve, pairing_guarantee_check
from .engine import GameConfig, GameTrace, StrategyFault, TraceError, bias_from_spec, block_schedule, replay
from .game import play
from .maker import MAKERS, make_maker

EXIT_OK, EXIT_FLAGS, EXIT_FAULT, EXIT_TRACE = 0, 1, 2, 3
TRACE_DIR_ENV = "KALEPH_TRACE_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_game_flags(p: argparse.ArgumentParser, breaker: bool = True) -> None:
    p.add_argument("--maker", default="vanilla", choices=MAKERS)
    if breaker:
        p.add_argument("--breaker", default="passive", choices=BREAKERS)
    p.add_argument("--horizon", type=int, default=100, help="number of Maker moves")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--first", choices=("maker", "breaker"), default="maker")
    p.add_argument("--bias", default="unit", help="unit | k:<n> | ceillog2 | linear:<slope>")
    p.add_argument("--colouring", default=None, help="modk:<k> | diagonal")
    p.add_argument("--k", type=int, default=None, help="number of colours for finite-colours")
    p.add_argument("--sequence", default=None, help="colour sequence for infinite-colours")
    p.add_argument("--offset", type=int, default=None, help="vertex offset for the passive Breaker")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kaleph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("play", help="run a game and write its trace")
    _add_game_flags(p)
    p.add_argument("--seeds", default=None, help="comma-separated seeds for a batch of games")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("replay", help="replay and validate a trace")
    p.add_argument("trace")

    p = sub.add_parser("certify", help="extract and verify the clique chain of a trace")
    p.add_argument("trace")
    p.add_argument("--variant", choices=VARIANTS, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("metrics", help="chain length growth curve as CSV")
    p.add_argument("trace")
    p.add_argument("--horizons", default=None, help="comma-separated Maker-move counts")
    p.add_argument("--variant", choices=VARIANTS, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("interactive", help="play Breaker by hand against a Maker strategy")
    _add_game_flags(p, breaker=False)
    return parser


def config_from_args(args, seed: Optional[int] = None, breaker: Optional[str] = None) -> GameConfig:
    params: Dict[str, object] = {}
    if args.k is not None:
        params["k"] = args.k
    if args.sequence is not None:
        params["sequence"] = args.sequence
    if getattr(args, "offset", None) is not None:
        params["offset"] = args.offset
    if args.colouring is not None:
        colouring = colouring_from_config(args.colouring)
    elif args.maker == "finite-colours":
        if args.k is None:
            raise UsageError("finite-colours needs --k or --colouring modk:<k>")
        colouring = colouring_from_config(f"modk:{args.k}")
    else:
        colouring = colouring_from_config("diagonal")
    config = GameConfig(
        horizon=args.horizon,
        first_player=Player.MAKER if args.first == "maker" else Player.BREAKER,
        colouring=colouring,
        bias=bias_from_spec(args.bias),
        seed=args.seed if seed is None else seed,
        maker=args.maker,
        breaker=breaker or args.breaker,
        params=params,
    )
    # construct the players once so bad combinations fail before any game state exists
    make_maker(config.maker, config.colouring, config.params)
    if config.breaker != "human":
        make_breaker(config.breaker, config.colouring, config.seed, config.params)
    return config


def _default_out(config: GameConfig) -> Path:
    base = Path(os.environ.get(TRACE_DIR_ENV, "."))
    return base / f"{config.maker}-{config.breaker}-h{config.horizon}-s{config.seed}.json"


def _play_one(config: GameConfig, out: Optional[str]) -> str:
    trace = play(config)
    path = Path(out) if out else _default_out(config)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace.save(path)
    chain = extract_chain(trace)
    return (
        f"horizon={config.horizon} maker_edges={len(trace.maker_moves())} "
        f"chain_length={len(chain)} trace={path}"
    )


def cmd_play(args, out: TextIO) -> int:
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        configs = [config_from_args(args, seed=s) for s in seeds]
        outs = []
        for cfg in configs:
            if args.out:
                stem = Path(args.out)
                outs.append(str(stem.with_name(f"{stem.stem}-s{cfg.seed}{stem.suffix or '.json'}")))
            else:
                outs.append(None)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                lines = list(pool.map(_play_one, configs, outs))
        else:
            lines = [_play_one(c, o) for c, o in zip(configs, outs)]
    else:
        lines = [_play_one(config_from_args(args), args.out)]
    for line in lines:
        print(line, file=out)
    return EXIT_OK


def _load(path: str) -> GameTrace:
    try:
        return GameTrace.load(path)
    except OSError as exc:
        raise TraceError(f"cannot read {path}: {exc}") from None


def cmd_replay(args, out: TextIO) -> int:
    trace = _load(args.trace)
    ledger = replay(trace)
    with open(args.trace, encoding="utf-8") as fh:
        identical = fh.read() == trace.to_json()
    print(
        f"ok: {len(ledger)} claims, {len(trace.maker_moves())} Maker moves, "
        f"reserialisation {'identical' if identical else 'differs'}",
        file=out,
    )
    return EXIT_OK


def cmd_certify(args, out: TextIO) -> int:
    trace = _load(args.trace)
    try:
        ledger = claimed_ledger(trace)
    except IllegalMoveError as exc:
        raise TraceError(str(exc), exc.turn) from None
    params = {"k": args.k} if args.k else None
    chain, report = certify(trace, args.variant, params)
    payload = report.to_dict()
    if trace.config.colouring.n_colours is None:
        pairing = pairing_guarantee_check(trace, ledger=ledger)
        payload["pairing_guarantee"] = {"passed": pairing.passed, "checks": pairing.checks}
        if trace.config.breaker == "pairing" and not pairing.passed:
            report.checks["pairing-guarantee"] = False
            payload["passed"] = False
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(f"variant={report.variant} chain_length={len(chain)} passed={report.passed}", file=out)
    for failure in report.failures():
        print(f"FAIL {failure}", file=out)
    return EXIT_OK if report.passed else EXIT_FLAGS


def cmd_metrics(args, out: TextIO) -> int:
    trace = _load(args.trace)
    replay(trace)
    total = len(trace.maker_moves())
    if args.horizons:
        horizons = [int(h) for h in args.horizons.split(",") if h.strip()]
    else:
        horizons = sorted({max(1, total * i // 10) for i in range(1, 11)})
    rows = growth_curve(trace, horizons, args.variant)
    text = growth_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# interactive play


def _board_summary(trace: GameTrace) -> str:
    chain = extract_chain(trace) if trace.maker_moves() else None
    maker_edges = len(trace.maker_moves())
    clique = list(chain.clique) if chain else []
    return f"Maker edges: {maker_edges}; current chain length {len(clique)}: {clique}"


def run_interactive(config: GameConfig, stdin: TextIO, out: TextIO, summary_every: int = 5) -> GameTrace:
    """Human plays Breaker. Returns the (possibly partial) trace."""
    maker = make_maker(config.maker, config.colouring, config.params)
    ledger = ClaimLedger()
    trace = GameTrace(config)
    moves_done = 0
    for player, allowance, block in block_schedule(config):
        if player is Player.MAKER:
            (edge,) = maker.next_moves(ledger, 1)
            ledger.claim(edge, Player.MAKER)
            trace.moves.append(ledger.claims[-1])
            trace.annotations[ledger.last_turn] = dict(maker.last_note or {})
            moves_done += 1
            print(f"Maker claims {edge} (turn {ledger.last_turn})", file=out)
            if moves_done % summary_every == 0:
                print(_board_summary(trace), file=out)
            continue
        taken = 0
        while taken < allowance:
            print(f"Breaker block {block}, edge {taken + 1}/{allowance} > ", end="", file=out)
            out.flush()
            line = stdin.readline()
            if not line or line.strip().lower() in ("q", "quit", "exit"):
                print("session ended", file=out)
                return trace
            try:
                u, v = (int(x) for x in line.replace(",", " ").split())
                edge = canonical_edge(u, v)
                ledger.claim(edge, Player.BREAKER)
            except IllegalMoveError as exc:
                print(str(exc), file=out)
                continue
            except (ValueError, InvalidEdgeError) as exc:
                print(f"enter two distinct vertices 'u v' ({exc})", file=out)
                continue
            trace.moves.append(ledger.claims[-1])
            taken += 1
    return trace


def cmd_interactive(args, out: TextIO, stdin: Optional[TextIO] = None) -> int:
    config = config_from_args(args, breaker="human")
    trace = run_interactive(config, stdin or sys.stdin, out)
    path = Path(args.out) if args.out else _default_out(config)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace.save(path)
    if trace.maker_moves():
        chain, report = certify(trace)
        print(f"chain: {[list(l.clique) for l in chain.levels]}", file=out)
        print(f"certificate passed={report.passed}", file=out)
        if config.colouring.n_colours is None:
            pairing = pairing_guarantee_check(trace)
            print(f"pairing guarantee passed={pairing.passed}", file=out)
    print(f"trace written to {path}", file=out)
    return EXIT_OK


COMMANDS = {
    "play": cmd_play,
    "replay": cmd_replay,
    "certify": cmd_certify,
    "metrics": cmd_metrics,
    "interactive": cmd_interactive,
}


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None) -> int:
    out = out or sys.stdout
    err = sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FLAGS
    except StrategyFault as exc:
        print(f"strategy fault: {exc}", file=err)
        return EXIT_FAULT
    except (TraceError, IllegalMoveError) as exc:
        print(f"bad trace: {exc}", file=err)
        return EXIT_TRACE
    except (ValueError, UnsupportedColouringError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
