"""Clique-chain certificates on finite game prefixes.

The extractors rebuild the nested cliques K^1 < K^2 < ... together with their
witness sets from a finished trace. At a finite horizon "chosen by infinitely
many witnesses" is replaced by "chosen by the most witnesses, ties to the
smallest index". :func:`verify_chain` re-checks a chain against the raw trace
through a separate code path, and :func:`brute_force_max_clique` is the
exhaustive oracle used by the tests.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .board import ClaimLedger, Edge, Player, canonical_edge, edge_index
from .engine import GameTrace
from .maker import AntiDiagonal, ColourSequence, MakerState, make_maker, sequence_from_name

M = Player.MAKER

VARIANT_OF_MAKER = {"vanilla": "vanilla", "finite-colours": "finite", "infinite-colours": "infinite"}
VARIANTS = ("vanilla", "finite", "infinite")


class OracleCapError(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    clique: Tuple[int, ...]
    witnesses: Tuple[int, ...]
    pool: Optional[FrozenSet[int]] = None  # colour pool C_n; None means all colours


@dataclass
class CliqueChain:
    variant: str
    levels: List[Level] = field(default_factory=list)
    stop_reason: str = ""
    flags: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def clique(self) -> Tuple[int, ...]:
        return self.levels[-1].clique if self.levels else ()


# ---------------------------------------------------------------------------
# rebuilding Maker's history from a trace


def _first_pair(trace: GameTrace, variant: str, k: Optional[int], seq: Optional[ColourSequence]) -> Tuple[int, int]:
    first = trace.maker_moves()[0]
    note = trace.annotations.get(first.turn) or {}
    if "intro" in note:
        a, b = note["intro"]
        return int(a), int(b)
    lo, hi = first.edge
    c = trace.config.colouring.colour_of
    if variant == "finite" and k and c(hi) % k == 1 % k and c(lo) % k != 1 % k:
        return hi, lo
    if variant == "infinite" and seq is not None and c(hi) == seq(1) and c(lo) != seq(1):
        return hi, lo
    return lo, hi


@dataclass
class _History:
    state: MakerState
    adj: Dict[int, Set[int]]

    @property
    def idx(self):
        return self.state.index

    def conn(self, w: int) -> List[int]:
        return self.state.conn_order[w]

    def joined_to(self, clique: Sequence[int]) -> Set[int]:
        sets = sorted((self.adj.get(v, set()) for v in clique), key=len)
        return sets[0].intersection(*sets[1:]) if sets else set(self.adj)


def _history(trace: GameTrace, variant: str, k=None, seq=None) -> _History:
    state = MakerState()
    adj: Dict[int, Set[int]] = {}
    moves = trace.maker_moves()
    if moves:
        state.introduce(*_first_pair(trace, variant, k, seq))
    for c in moves:
        state.observe(c.edge)
        adj.setdefault(c.edge.lo, set()).add(c.edge.hi)
        adj.setdefault(c.edge.hi, set()).add(c.edge.lo)
    return _History(state, adj)


def _supporters(h: _History, witnesses: Iterable[int], n: int, F: Set[int]) -> Dict[int, List[int]]:
    """Map each F-member to the witnesses whose (n+1)-st connection it was."""
    support: Dict[int, List[int]] = {u: [] for u in F}
    for w in witnesses:
        conn = h.conn(w)
        if len(conn) > n and conn[n] in support:
            support[conn[n]].append(w)
    return support


# ---------------------------------------------------------------------------
# extractors


def _extract_rotating(trace: GameTrace, variant: str, k: int, bias_k: int) -> CliqueChain:
    chain = CliqueChain(variant)
    colour = trace.config.colouring.colour_of
    h = _history(trace, variant, k=k)
    if not h.state.vertices:
        chain.stop_reason = "empty trace"
        return chain
    idx = h.idx
    v1 = h.state.v(1)
    K = [v1]
    W = [w for w in h.state.vertices if w != v1]
    chain.levels.append(Level((v1,), tuple(W)))
    while W:
        n = len(K)
        step_colour = (n + 1) % k
        joined = [u for u in h.joined_to(K) if k == 1 or colour(u) % k == step_colour]
        joined.sort(key=idx.__getitem__)
        F = joined[: bias_k * k * n + 1]
        if not F:
            chain.stop_reason = "horizon-limited: no vertex joined to the clique"
            break
        support = _supporters(h, W, n, set(F))
        if k > 1:
            # every colour class that can still move on must be represented among the supporters
            live = {colour(w) % k for w in W if len(h.conn(w)) > n}
            eligible = [u for u in F if live <= {colour(w) % k for w in support[u]}]
            if not eligible:
                chain.flags.append(f"coverage-binding at level {n + 1}")
                eligible = F
        else:
            eligible = F
        u_star = max(eligible, key=lambda u: (len(support[u]), -idx[u]))
        K = K + [u_star]
        W = support[u_star]
        chain.levels.append(Level(tuple(K), tuple(W)))
    else:
        chain.stop_reason = "horizon-limited: witnesses exhausted"
    return chain


def extract_chain_vanilla(trace: GameTrace, bias_k: int = 1) -> CliqueChain:
    """Nested cliques for the vanilla strategy; F has bias_k*n+1 members at step n."""
    return _extract_rotating(trace, "vanilla", 1, bias_k)


def extract_chain_finite(trace: GameTrace, k: int, bias_k: int = 1) -> CliqueChain:
    """Nested cliques whose j-th vertex has colour j mod k."""
    if k < 1:
        raise ValueError("k must be positive")
    return _extract_rotating(trace, "finite", k, bias_k)


def extract_chain_infinite(trace: GameTrace, S: Optional[ColourSequence] = None,
                           C_hat: Optional[ColourSequence] = None, search_limit: int = 10**6) -> CliqueChain:
    """Nested cliques with shrinking colour pools, adding colours along C_hat."""
    S = S or AntiDiagonal()
    C_hat = C_hat or AntiDiagonal()
    if C_hat(1) != S(1):
        raise ValueError("the colour schedule must start with the first colour of S")
    chain = CliqueChain("infinite")
    colour = trace.config.colouring.colour_of
    h = _history(trace, "infinite", seq=S)
    if not h.state.vertices:
        chain.stop_reason = "empty trace"
        return chain
    idx = h.idx
    v1 = h.state.v(1)
    K = [v1]
    W = [w for w in h.state.vertices if w != v1]
    C = frozenset(colour(w) for w in W)
    chain.levels.append(Level((v1,), tuple(W), C))
    m = 1
    while W:
        n = len(K)
        p = next((j for j in range(m + 1, m + 1 + search_limit) if C_hat(j) in C), None)
        if p is None:
            chain.stop_reason = "no scheduled colour left in the pool"
            break
        cp = C_hat(p)
        k_colours = {colour(v) for v in K}
        size = (len(k_colours) + 2) * n + 1
        joined = sorted((u for u in h.joined_to(K) if colour(u) == cp), key=idx.__getitem__)
        if len(joined) < size:
            chain.stop_reason = f"horizon-limited: {len(joined)} of {size} candidates of colour {cp}"
            break
        F = joined[:size]
        W_p = [w for w in W if len(h.conn(w)) > n and colour(h.conn(w)[n]) == cp]
        support = _supporters(h, W_p, n, set(F))
        required = k_colours | {cp}
        eligible = [u for u in F if required <= {colour(w) for w in support[u]}]
        if not eligible:
            chain.stop_reason = "horizon-limited: no candidate supported in every required colour"
            chain.flags.append(f"surrogate-binding at level {n + 1}")
            break
        u_star = max(
            eligible,
            key=lambda u: (len({colour(w) for w in support[u]}), len(support[u]), -idx[u]),
        )
        C_next = frozenset(colour(w) for w in support[u_star])
        left = sorted(C - C_next)
        if left:
            chain.flags.append(f"level {n + 1}: colours left the pool: {left}")
        K = K + [u_star]
        W = support[u_star]
        C = C_next
        m = p
        chain.levels.append(Level(tuple(K), tuple(W), C))
    else:
        chain.stop_reason = "horizon-limited: witnesses exhausted"
    return chain


def extract_chain(trace: GameTrace, variant: Optional[str] = None, params: Optional[Dict[str, Any]] = None) -> CliqueChain:
    params = {**trace.config.params, **(params or {})}
    variant = variant or VARIANT_OF_MAKER.get(trace.config.maker, "vanilla")
    bias_k = int(params.get("bias_k", getattr(trace.config.bias, "k", 1)))
    if variant == "vanilla":
        return extract_chain_vanilla(trace, bias_k)
    if variant == "finite":
        k = params.get("k") or trace.config.colouring.n_colours
        if k is None:
            raise ValueError("the finite variant needs k")
        return extract_chain_finite(trace, int(k), bias_k)
    if variant == "infinite":
        seq = sequence_from_name(params.get("sequence", "antidiagonal"))
        return extract_chain_infinite(trace, seq, sequence_from_name(params.get("schedule", "antidiagonal")))
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    variant: str
    per_level: List[Dict[str, Any]] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def first_failing_level(self) -> Optional[int]:
        for i, lvl in enumerate(self.per_level, start=1):
            if not all(lvl["checks"].values()):
                return i
        return None

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and self.first_failing_level is None

    def failures(self) -> List[str]:
        out = [name for name, ok in self.checks.items() if not ok]
        for i, lvl in enumerate(self.per_level, start=1):
            out += [f"level {i}: {name}" for name, ok in lvl["checks"].items() if not ok]
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "passed": self.passed,
            "levels": len(self.per_level),
            "first_failing_level": self.first_failing_level,
            "checks": self.checks,
            "per_level": self.per_level,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _raw_maker_view(trace: GameTrace):
    """Maker edge set, connection orders and introduction order, read straight off the moves."""
    edges: Set[Tuple[int, int]] = set()
    conn: Dict[int, List[int]] = {}
    order: List[int] = []
    first = True
    for c in trace.moves:
        if c.player is not M:
            continue
        a, b = c.edge
        if first:
            note = trace.annotations.get(c.turn) or {}
            intro = note.get("intro")
            if intro and sorted(intro) == [a, b]:
                a, b = intro
            first = False
        edges.add((min(a, b), max(a, b)))
        for x in (a, b):
            if x not in conn:
                conn[x] = []
                order.append(x)
        conn[a].append(b)
        conn[b].append(a)
    return edges, conn, order


def verify_chain(chain: CliqueChain, trace: GameTrace, variant: Optional[str] = None,
                 params: Optional[Dict[str, Any]] = None) -> VerificationReport:
    """Check every chain invariant directly against the trace's Maker moves."""
    variant = variant or chain.variant
    params = {**trace.config.params, **(params or {})}
    colour = trace.config.colouring.colour_of
    edges, conn, order = _raw_maker_view(trace)
    report = VerificationReport(variant)
    k = None
    if variant == "finite":
        k = int(params.get("k") or trace.config.colouring.n_colours or 0)
        if k < 1:
            report.checks["colouring-has-k-colours"] = False
            k = None
    seq = sequence_from_name(params.get("sequence", "antidiagonal")) if variant == "infinite" else None

    def owned(u, v):
        return (min(u, v), max(u, v)) in edges

    prev: Optional[Level] = None
    for n, lvl in enumerate(chain.levels, start=1):
        K = list(lvl.clique)
        Kset = set(K)
        checks: Dict[str, bool] = {}
        checks["size"] = len(K) == n and len(Kset) == n
        checks["nested"] = prev is None or (list(prev.clique) == K[:-1] and set(prev.clique) < Kset)
        checks["maker-clique"] = all(owned(u, v) for u, v in itertools.combinations(K, 2))
        checks["witnesses-joined-first"] = all(
            w not in Kset and len(conn.get(w, ())) >= n and set(conn[w][:n]) == Kset for w in lvl.witnesses
        )
        if variant == "finite" and k:
            checks["colour-pattern"] = all(colour(v) % k == j % k for j, v in enumerate(K, start=1))
        if variant == "infinite":
            pool = lvl.pool
            checks["pool-recorded"] = pool is not None
            if pool is not None:
                checks["clique-colours-in-pool"] = {colour(v) for v in K} <= pool
                wcols = {colour(w) for w in lvl.witnesses}
                checks["pool-witnessed"] = pool <= wcols
                checks["pool-nested"] = prev is None or prev.pool is None or pool <= prev.pool
        report.per_level.append({
            "level": n,
            "clique": K,
            "colours": [colour(v) for v in K],
            "witness_count": len(lvl.witnesses),
            "pool": sorted(lvl.pool) if lvl.pool is not None else None,
            "checks": checks,
        })
        prev = lvl

    # strategy-level laws over every Maker vertex
    if order:
        v1 = order[0]
        report.checks["fresh-vertices-join-v1-first"] = all(conn[v][0] == v1 for v in order[1:])
    if variant == "finite" and k:
        report.checks["vertex-colour-law"] = all(colour(v) % k == j % k for j, v in enumerate(order, start=1))
    if variant == "infinite" and seq is not None:
        report.checks["vertex-colour-law"] = all(colour(v) == seq(j) for j, v in enumerate(order, start=1))
    if chain.stop_reason:
        report.notes.append(chain.stop_reason)
    report.notes.extend(chain.flags)
    return report


def strategy_conformance(trace: GameTrace) -> Optional[int]:
    """Replay the named Maker strategy against the trace; return the first deviating turn, if any."""
    cfg = trace.config
    maker = make_maker(cfg.maker, cfg.colouring, cfg.params)
    ledger = ClaimLedger()
    for c in trace.moves:
        if c.player is M:
            try:
                (expected,) = maker.next_moves(ledger, 1)
            except Exception:
                return c.turn
            if expected != c.edge:
                return c.turn
        try:
            ledger.claim(c.edge, c.player)
        except Exception:
            return c.turn
    return None


def certify(trace: GameTrace, variant: Optional[str] = None, params: Optional[Dict[str, Any]] = None,
            check_strategy: bool = True) -> Tuple[CliqueChain, VerificationReport]:
    chain = extract_chain(trace, variant, params)
    report = verify_chain(chain, trace, variant or chain.variant, params)
    if check_strategy:
        bad = strategy_conformance(trace)
        report.checks["strategy-conformance"] = bad is None
        if bad is not None:
            report.notes.append(f"Maker deviates from {trace.config.maker!r} at turn {bad}")
    return chain, report


# ---------------------------------------------------------------------------
# oracle


def brute_force_max_clique(ledger: ClaimLedger, player: Player = M, vertex_cap: int = 32,
                           vertices: Optional[Iterable[int]] = None) -> Tuple[int, FrozenSet[int]]:
    """Exact maximum clique of G_player (optionally restricted to ``vertices``)."""
    if not 0 <= vertex_cap <= 32:
        raise OracleCapError("the oracle is limited to 32 vertices")
    pool = sorted(ledger.vertices(player) if vertices is None else set(vertices) & ledger.vertices(player))
    if len(pool) > vertex_cap:
        raise OracleCapError(f"{len(pool)} vertices exceed the cap of {vertex_cap}")
    pos = {v: i for i, v in enumerate(pool)}
    masks = [0] * len(pool)
    for v in pool:
        for u in ledger.neighbours(player, v):
            if u in pos:
                masks[pos[v]] |= 1 << pos[u]
    best = [0, 0]

    def grow(chosen: int, size: int, cand: int) -> None:
        if size > best[0]:
            best[0], best[1] = size, chosen
        while cand:
            if size + bin(cand).count("1") <= best[0]:
                return
            low = cand & -cand
            i = low.bit_length() - 1
            grow(chosen | low, size + 1, cand & masks[i])
            cand &= ~low

    grow(0, 0, (1 << len(pool)) - 1)
    witness = frozenset(pool[i] for i in range(len(pool)) if best[1] >> i & 1)
    return best[0], witness


def max_clique_containing(ledger: ClaimLedger, edge: Edge, vertex_cap: int = 32) -> int:
    """Size of the largest Maker clique containing ``edge`` (0 if Maker does not own it)."""
    x, y = canonical_edge(*edge)
    if ledger.owner(edge) is not M:
        return 0
    common = ledger.neighbours(M, x) & ledger.neighbours(M, y)
    size, _ = brute_force_max_clique(ledger, M, vertex_cap, common)
    return size + 2


def claimed_ledger(trace: GameTrace) -> ClaimLedger:
    """Ledger of the trace's claims, renumbering turns and ignoring alternation.

    Certificates only care who owns which edge and in what order; a duplicated
    edge still raises :class:`IllegalMoveError`.
    """
    ledger = ClaimLedger()
    for c in trace.moves:
        ledger.claim(c.edge, c.player)
    return ledger


# ---------------------------------------------------------------------------
# pairing guarantee


def pairing_guarantee_check(trace: GameTrace, table=None, ledger: Optional[ClaimLedger] = None) -> VerificationReport:
    """No Maker-owned e_m = {x,y} may have a Maker-joined common neighbour of colour c_m."""
    from .breaker import PairingTable

    table = table or PairingTable(trace.config.colouring)
    ledger = ledger or claimed_ledger(trace)
    colour = trace.config.colouring.colour_of
    report = VerificationReport("pairing")
    violations: List[str] = []
    for e in ledger.edges(M):
        m = edge_index(e)
        cm = table.colour(m)
        for v in ledger.neighbours(M, e.lo) & ledger.neighbours(M, e.hi):
            if colour(v) == cm:
                violations.append(f"e_{m}={e} with {v} of colour {cm}")
    report.checks["colour-class-blocked"] = not violations
    touched: Dict[Edge, int] = {}
    clash: List[str] = []
    both: List[str] = []
    for c in ledger.claims:
        hit = table.pair_of(c.edge)
        if hit is None:
            continue
        partner, m = hit
        back = table.pair_of(partner)
        if back != (c.edge, m):
            clash.append(f"{c.edge}<->{partner}")
        for member in (c.edge, partner):
            if touched.setdefault(member, m) != m:
                clash.append(f"{member} in pairs for e_{touched[member]} and e_{m}")
        if ledger.owner(c.edge) is M and ledger.owner(partner) is M:
            both.append(f"{c.edge} and {partner}")
    report.checks["pairs-disjoint"] = not clash
    report.checks["no-pair-fully-maker"] = not both
    report.notes.extend(violations[:20] + clash[:20] + both[:20])
    report.notes.append(f"{len(ledger.edges(M))} Maker edges checked")
    return report


# ---------------------------------------------------------------------------
# growth curves


def growth_curve(trace: GameTrace, horizons: Sequence[int], variant: Optional[str] = None,
                 params: Optional[Dict[str, Any]] = None) -> List[Tuple[int, int]]:
    return [(t, len(extract_chain(trace.prefix(t), variant, params))) for t in horizons]


def growth_csv(rows: Sequence[Tuple[int, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["horizon", "chain_length"])
    w.writerows(rows)
    return buf.getvalue()
