"""Improving response dynamics: move enumeration, scheduling, execution.

The engine keeps per-node neighbor type counts and updates them
incrementally, so a move costs O(degree) and an improvement test is a
handful of integer multiplications (exact; no Fraction objects on the
hot path).  Contentment and improvement are decided by cross-multiplied
integer comparisons:

* agent discontent  <=>  s * tau.den <  d * tau.num
* move improving    <=>  discontent now  and  s' * d > s * d'

where ``s/d`` is the positive neighborhood ratio (isolated agents are
normalized to ``0/1``, matching their fixed cost of tau).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .graph import Graph
from .model import (EMPTY, Aggregation, GameConfig, Mode, Placement,
                    TypeAssignment, validate_placement)

__all__ = [
    "MoveKind",
    "Move",
    "Verdict",
    "Schedule",
    "RunTrace",
    "InvalidMoveError",
    "ScriptViolationError",
    "improving_swaps",
    "improving_jumps",
    "improving_moves",
    "apply_move",
    "is_stable",
    "detect_cycle_state",
    "run_ird",
    "replay_trace",
]


class MoveKind(Enum):
    SWAP = "swap"
    JUMP = "jump"


class Verdict(Enum):
    CONVERGED = "CONVERGED"
    CYCLE_DETECTED = "CYCLE_DETECTED"
    STEP_CAP_REACHED = "STEP_CAP_REACHED"


class Schedule(Enum):
    #: each round, shuffle the discontent set; an activated agent scans
    #: candidate locations in random order and takes the first improvement
    RANDOM_FIRST_IMPROVEMENT = "random"
    #: always execute the lexicographically smallest improving move
    CANONICAL_FIRST = "canonical"
    #: execute a supplied move list, verifying each move is improving
    SCRIPTED = "scripted"


class InvalidMoveError(ValueError):
    pass


class ScriptViolationError(ValueError):
    """A scripted move was not an improving move in its state."""


@dataclass(frozen=True)
class Move:
    """One executed (or proposed) move.

    Swaps carry both agents, jumps carry the mover and the target node.
    Cost fields are filled in by the engine at execution time; every
    involved agent strictly decreases her cost.
    """

    kind: MoveKind
    agent_a: int
    agent_b: int | None = None
    target: int | None = None
    cost_before_a: Fraction | None = None
    cost_after_a: Fraction | None = None
    cost_before_b: Fraction | None = None
    cost_after_b: Fraction | None = None

    @staticmethod
    def swap(a: int, b: int) -> "Move":
        return Move(MoveKind.SWAP, a, agent_b=b)

    @staticmethod
    def jump(a: int, target: int) -> "Move":
        return Move(MoveKind.JUMP, a, target=target)

    def involved_agents(self) -> tuple[int, ...]:
        return (self.agent_a,) if self.agent_b is None else (self.agent_a, self.agent_b)


@dataclass
class RunTrace:
    """Record of one IRD run; replaying ``moves`` from ``initial`` gives ``final``."""

    initial: Placement
    moves: list[Move]
    verdict: Verdict
    steps: int
    rounds: int
    seed: int | None
    final: Placement
    first_repeat_index: int | None = None
    repeated_from: int | None = None


def detect_cycle_state(t: TypeAssignment, p: Placement) -> bytes | tuple:
    """Canonical state key: the node -> type-id pattern.

    Agents of equal type are interchangeable, so two placements are
    equivalent game states exactly when their keys are equal.
    """
    type_of = t.type_of
    if t.k < 255:
        return bytes(0 if a == EMPTY else type_of[a] + 1 for a in p.occupant_of)
    return tuple(-1 if a == EMPTY else type_of[a] for a in p.occupant_of)


def apply_move(p: Placement, move: Move) -> Placement:
    """Pure application of a move; returns a new placement."""
    node_of = list(p.node_of)
    if move.kind is MoveKind.SWAP:
        a, b = move.agent_a, move.agent_b
        if b is None or not (0 <= a < p.num_agents) or not (0 <= b < p.num_agents):
            raise InvalidMoveError(f"bad swap agents ({move.agent_a}, {move.agent_b})")
        node_of[a], node_of[b] = node_of[b], node_of[a]
    else:
        a, e = move.agent_a, move.target
        if e is None or not (0 <= a < p.num_agents):
            raise InvalidMoveError(f"bad jump ({move.agent_a} -> {move.target})")
        if not (0 <= e < p.num_nodes):
            raise InvalidMoveError(f"jump target {e} out of range")
        if p.occupant_of[e] != EMPTY:
            raise InvalidMoveError(f"jump target {e} is occupied")
        node_of[a] = e
    return Placement(p.num_nodes, node_of)


class _Engine:
    """Mutable game state with incremental neighbor type counts."""

    def __init__(self, g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig):
        validate_placement(g, t, p, cfg)
        if not g.is_connected:
            raise InvalidMoveError("improving response dynamics require a connected graph")
        self.g = g
        self.t = t
        self.cfg = cfg
        self.k = t.k
        self.tnum = cfg.tau.numerator
        self.tden = cfg.tau.denominator
        # one-vs-one coincides with one-vs-all for k=2; use the fast path
        self.one_vs_all = cfg.aggregation is Aggregation.ONE_VS_ALL or t.k == 2
        self.type_of = list(t.type_of)
        self.node_of = list(p.node_of)
        self.occ = list(p.occupant_of)
        n = g.n
        self.cnt = [[0] * self.k for _ in range(n)]
        self.occn = [0] * n
        adj = g.adj
        for node, agent in enumerate(self.occ):
            if agent != EMPTY:
                ty = self.type_of[agent]
                for w in adj[node]:
                    self.cnt[w][ty] += 1
                    self.occn[w] += 1
        self.empties = {v for v, a in enumerate(self.occ) if a == EMPTY}
        self.discontent = {a for a in range(t.num_agents) if self._discontent(a)}

    # -- ratio views -------------------------------------------------------

    def _ratio_at(self, node: int, ty: int) -> tuple[int, int]:
        """(s, d) with pnr = s/d for an agent of type ``ty`` standing at ``node``."""
        cnt = self.cnt[node]
        s = cnt[ty]
        if self.one_vs_all:
            d = self.occn[node]
        else:
            neg = 0
            for ty2 in range(self.k):
                if ty2 != ty and cnt[ty2] > neg:
                    neg = cnt[ty2]
            d = s + neg
        return (s, d) if d else (0, 1)

    def _ratio_swap_target(self, u: int, ta: int, v: int, tb: int) -> tuple[int, int]:
        """View of the type-``ta`` agent (now at ``u``) at node ``v`` after
        swapping with the type-``tb`` agent at ``v``."""
        cnt = self.cnt[v]
        # if u neighbors v, the occupant of u changes type ta -> tb
        touch = tb != ta and u in self.g.adj_sets[v]
        s = cnt[ta] - 1 if touch else cnt[ta]
        if self.one_vs_all:
            d = self.occn[v]
        else:
            neg = 0
            for ty2 in range(self.k):
                if ty2 == ta:
                    continue
                c = cnt[ty2]
                if touch and ty2 == tb:
                    c += 1
                if c > neg:
                    neg = c
            d = s + neg
        return (s, d) if d else (0, 1)

    def _ratio_jump_target(self, u: int, ta: int, e: int) -> tuple[int, int]:
        """View of the type-``ta`` agent (now at ``u``) at empty node ``e``
        after jumping there (``u`` becomes empty)."""
        cnt = self.cnt[e]
        touch = u in self.g.adj_sets[e]
        s = cnt[ta] - 1 if touch else cnt[ta]
        if self.one_vs_all:
            d = self.occn[e] - 1 if touch else self.occn[e]
        else:
            neg = 0
            for ty2 in range(self.k):
                if ty2 != ta and cnt[ty2] > neg:
                    neg = cnt[ty2]
            d = s + neg
        return (s, d) if d else (0, 1)

    # -- predicates ---------------------------------------------------------

    def _discontent(self, a: int) -> bool:
        s, d = self._ratio_at(self.node_of[a], self.type_of[a])
        return s * self.tden < d * self.tnum

    def _improves(self, s0: int, d0: int, s1: int, d1: int) -> bool:
        """Strict cost decrease: discontent now and a strictly larger ratio."""
        return s0 * self.tden < d0 * self.tnum and s1 * d0 > s0 * d1

    def swap_eval(self, a: int, b: int) -> tuple:
        """Before/after ratio views of both agents for the swap (a, b)."""
        ta, tb = self.type_of[a], self.type_of[b]
        u, v = self.node_of[a], self.node_of[b]
        sa0, da0 = self._ratio_at(u, ta)
        sb0, db0 = self._ratio_at(v, tb)
        sa1, da1 = self._ratio_swap_target(u, ta, v, tb)
        sb1, db1 = self._ratio_swap_target(v, tb, u, ta)
        return (sa0, da0, sa1, da1), (sb0, db0, sb1, db1)

    def jump_eval(self, a: int, e: int) -> tuple:
        """Before/after ratio view of agent ``a`` for the jump to empty ``e``."""
        ta = self.type_of[a]
        u = self.node_of[a]
        s0, d0 = self._ratio_at(u, ta)
        s1, d1 = self._ratio_jump_target(u, ta, e)
        return (s0, d0, s1, d1)

    def swap_gain(self, a: int, b: int) -> tuple | None:
        """Ratio data if swapping ``a`` and ``b`` strictly improves both, else None."""
        ta, tb = self.type_of[a], self.type_of[b]
        if ta == tb:
            return None
        u, v = self.node_of[a], self.node_of[b]
        sa0, da0 = self._ratio_at(u, ta)
        if sa0 * self.tden >= da0 * self.tnum:
            return None
        sb0, db0 = self._ratio_at(v, tb)
        if sb0 * self.tden >= db0 * self.tnum:
            return None
        sa1, da1 = self._ratio_swap_target(u, ta, v, tb)
        if sa1 * da0 <= sa0 * da1:
            return None
        sb1, db1 = self._ratio_swap_target(v, tb, u, ta)
        if sb1 * db0 <= sb0 * db1:
            return None
        return (sa0, da0, sa1, da1), (sb0, db0, sb1, db1)

    def jump_gain(self, a: int, e: int) -> tuple | None:
        """Ratio data if agent ``a`` jumping to empty ``e`` strictly improves her."""
        ta = self.type_of[a]
        u = self.node_of[a]
        s0, d0 = self._ratio_at(u, ta)
        if s0 * self.tden >= d0 * self.tnum:
            return None
        s1, d1 = self._ratio_jump_target(u, ta, e)
        if s1 * d0 <= s0 * d1:
            return None
        return (s0, d0, s1, d1)

    def _cost(self, s: int, d: int) -> Fraction:
        c = self.cfg.tau - Fraction(s, d)
        return c if c > 0 else Fraction(0)

    # -- execution ----------------------------------------------------------

    def _refresh(self, agents) -> None:
        disc = self.discontent
        for a in agents:
            if self._discontent(a):
                disc.add(a)
            else:
                disc.discard(a)

    def execute_swap(self, a: int, b: int, gains) -> Move:
        (sa0, da0, sa1, da1), (sb0, db0, sb1, db1) = gains
        u, v = self.node_of[a], self.node_of[b]
        ta, tb = self.type_of[a], self.type_of[b]
        for w in self.g.adj[u]:
            c = self.cnt[w]
            c[ta] -= 1
            c[tb] += 1
        for w in self.g.adj[v]:
            c = self.cnt[w]
            c[tb] -= 1
            c[ta] += 1
        self.node_of[a], self.node_of[b] = v, u
        self.occ[u], self.occ[v] = b, a
        affected = {a, b}
        occ = self.occ
        for w in self.g.adj[u]:
            if occ[w] != EMPTY:
                affected.add(occ[w])
        for w in self.g.adj[v]:
            if occ[w] != EMPTY:
                affected.add(occ[w])
        self._refresh(affected)
        return Move(MoveKind.SWAP, a, agent_b=b,
                    cost_before_a=self._cost(sa0, da0), cost_after_a=self._cost(sa1, da1),
                    cost_before_b=self._cost(sb0, db0), cost_after_b=self._cost(sb1, db1))

    def execute_jump(self, a: int, e: int, gain) -> Move:
        s0, d0, s1, d1 = gain
        u = self.node_of[a]
        ta = self.type_of[a]
        for w in self.g.adj[u]:
            self.cnt[w][ta] -= 1
            self.occn[w] -= 1
        for w in self.g.adj[e]:
            self.cnt[w][ta] += 1
            self.occn[w] += 1
        self.node_of[a] = e
        self.occ[u] = EMPTY
        self.occ[e] = a
        self.empties.discard(e)
        self.empties.add(u)
        affected = {a}
        occ = self.occ
        for w in self.g.adj[u]:
            if occ[w] != EMPTY:
                affected.add(occ[w])
        for w in self.g.adj[e]:
            if occ[w] != EMPTY:
                affected.add(occ[w])
        self._refresh(affected)
        return Move(MoveKind.JUMP, a, target=e,
                    cost_before_a=self._cost(s0, d0), cost_after_a=self._cost(s1, d1))

    def execute(self, move: Move) -> Move:
        """Execute a bare move after verifying it is improving."""
        if move.kind is MoveKind.SWAP:
            a, b = move.agent_a, move.agent_b
            gains = self.swap_gain(a, b)
            if gains is None:
                raise ScriptViolationError(f"swap ({a}, {b}) is not improving here")
            return self.execute_swap(a, b, gains)
        a, e = move.agent_a, move.target
        if e in self.empties:
            gain = self.jump_gain(a, e)
        else:
            raise ScriptViolationError(f"jump target {e} is not empty")
        if gain is None:
            raise ScriptViolationError(f"jump ({a} -> {e}) is not improving here")
        return self.execute_jump(a, e, gain)

    # -- enumeration --------------------------------------------------------

    def iter_improving(self):
        """Yield (a, b_or_target, gain) for all improving moves, canonical order."""
        disc = sorted(self.discontent)
        if self.cfg.mode is Mode.SWAP:
            for i, a in enumerate(disc):
                for b in disc[i + 1:]:
                    gains = self.swap_gain(a, b)
                    if gains is not None:
                        yield a, b, gains
        else:
            empties = sorted(self.empties)
            for a in disc:
                for e in empties:
                    gain = self.jump_gain(a, e)
                    if gain is not None:
                        yield a, e, gain

    def state_key(self):
        type_of = self.type_of
        if self.k < 255:
            return bytes(0 if a == EMPTY else type_of[a] + 1 for a in self.occ)
        return tuple(-1 if a == EMPTY else type_of[a] for a in self.occ)

    def placement(self) -> Placement:
        return Placement(self.g.n, self.node_of)


def improving_swaps(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> list[Move]:
    """All improving swaps, ordered lexicographically by agent-id pair.

    Only pairs of discontent agents of different types are candidates:
    a content agent never consents (her cost cannot strictly decrease),
    and a same-type swap leaves the type pattern unchanged.
    """
    if cfg.mode is not Mode.SWAP:
        raise InvalidMoveError("improving_swaps requires swap mode")
    eng = _Engine(g, t, p, cfg)
    out = []
    for a, b, gains in eng.iter_improving():
        (sa0, da0, sa1, da1), (sb0, db0, sb1, db1) = gains
        out.append(Move(MoveKind.SWAP, a, agent_b=b,
                        cost_before_a=eng._cost(sa0, da0), cost_after_a=eng._cost(sa1, da1),
                        cost_before_b=eng._cost(sb0, db0), cost_after_b=eng._cost(sb1, db1)))
    return out


def improving_jumps(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> list[Move]:
    """All improving (agent, empty node) jumps in canonical order."""
    if cfg.mode is not Mode.JUMP:
        raise InvalidMoveError("improving_jumps requires jump mode")
    eng = _Engine(g, t, p, cfg)
    out = []
    for a, e, gain in eng.iter_improving():
        s0, d0, s1, d1 = gain
        out.append(Move(MoveKind.JUMP, a, target=e,
                        cost_before_a=eng._cost(s0, d0), cost_after_a=eng._cost(s1, d1)))
    return out


def improving_moves(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> list[Move]:
    if cfg.mode is Mode.SWAP:
        return improving_swaps(g, t, p, cfg)
    return improving_jumps(g, t, p, cfg)


def is_stable(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> bool:
    """True iff no improving move exists (swap- resp. jump-stable)."""
    eng = _Engine(g, t, p, cfg)
    return next(eng.iter_improving(), None) is None


def run_ird(g: Graph, t: TypeAssignment, p0: Placement, cfg: GameConfig, *,
            seed: int | None = 0, max_steps: int | None = None,
            schedule: Schedule = Schedule.RANDOM_FIRST_IMPROVEMENT,
            script: list[Move] | None = None) -> RunTrace:
    """Execute improving response dynamics until stable, cycling, or capped.

    Schedules
    ---------
    RANDOM_FIRST_IMPROVEMENT
        Each round collects the discontent set and shuffles it; every
        activated (still discontent) agent scans candidate locations in
        random order and takes the first strict improvement.  In swap
        mode the scan runs over shuffled discontent agents of other
        types (a content partner can never consent, so skipping content
        agents changes nothing but the RNG stream); in jump mode over
        shuffled empty nodes.  Deterministic for a fixed seed.
    CANONICAL_FIRST
        Repeatedly executes the lexicographically smallest improving
        move; seed-independent.
    SCRIPTED
        Executes ``script`` in order, raising :class:`ScriptViolationError`
        if a scripted move is not improving in its state.  The full
        script is executed even if a state repeat is seen on the way.

    A state repeat (by node -> type pattern) yields CYCLE_DETECTED.  The
    step cap defaults to ``10 * |E|``, comfortably above the proven
    O(|E|) convergence bounds.
    """
    eng = _Engine(g, t, p0, cfg)
    if max_steps is None:
        max_steps = 10 * g.m
    rng = random.Random(seed)
    initial = p0.copy()
    moves: list[Move] = []
    seen = {eng.state_key(): 0}
    steps = 0
    rounds = 0
    first_repeat = None
    repeated_from = None
    verdict: Verdict | None = None

    def note_state() -> bool:
        nonlocal first_repeat, repeated_from
        key = eng.state_key()
        if key in seen:
            if first_repeat is None:
                first_repeat = steps
                repeated_from = seen[key]
            return True
        seen[key] = steps
        return False

    if schedule is Schedule.SCRIPTED:
        if script is None:
            raise ValueError("SCRIPTED schedule needs a script")
        for mv in script:
            if steps >= max_steps:
                verdict = Verdict.STEP_CAP_REACHED
                break
            moves.append(eng.execute(mv))
            steps += 1
            note_state()
        if verdict is None:
            if first_repeat is not None:
                verdict = Verdict.CYCLE_DETECTED
            elif next(eng.iter_improving(), None) is None:
                verdict = Verdict.CONVERGED
            else:
                verdict = Verdict.STEP_CAP_REACHED
        rounds = steps

    elif schedule is Schedule.CANONICAL_FIRST:
        while True:
            if steps >= max_steps:
                verdict = Verdict.STEP_CAP_REACHED
                break
            nxt = next(eng.iter_improving(), None)
            if nxt is None:
                verdict = Verdict.CONVERGED
                break
            a, other, gain = nxt
            if cfg.mode is Mode.SWAP:
                moves.append(eng.execute_swap(a, other, gain))
            else:
                moves.append(eng.execute_jump(a, other, gain))
            steps += 1
            if note_state():
                verdict = Verdict.CYCLE_DETECTED
                break
        rounds = steps

    elif schedule is Schedule.RANDOM_FIRST_IMPROVEMENT:
        swap_mode = cfg.mode is Mode.SWAP
        type_of = eng.type_of
        while verdict is None:
            order = sorted(eng.discontent)
            if not order:
                verdict = Verdict.CONVERGED
                break
            rng.shuffle(order)
            rounds += 1
            moved = False
            for a in order:
                if a not in eng.discontent:
                    continue
                if steps >= max_steps:
                    verdict = Verdict.STEP_CAP_REACHED
                    break
                if swap_mode:
                    ta = type_of[a]
                    partners = [b for b in eng.discontent if type_of[b] != ta]
                    partners.sort()
                    rng.shuffle(partners)
                    for b in partners:
                        gains = eng.swap_gain(a, b)
                        if gains is not None:
                            moves.append(eng.execute_swap(a, b, gains))
                            steps += 1
                            moved = True
                            break
                    else:
                        continue
                else:
                    targets = sorted(eng.empties)
                    rng.shuffle(targets)
                    for e in targets:
                        gain = eng.jump_gain(a, e)
                        if gain is not None:
                            moves.append(eng.execute_jump(a, e, gain))
                            steps += 1
                            moved = True
                            break
                    else:
                        continue
                if note_state():
                    verdict = Verdict.CYCLE_DETECTED
                    break
            if verdict is None and not moved:
                # A full silent round means no activated agent had any
                # improving move against an unchanged placement: stable.
                verdict = Verdict.CONVERGED
    else:
        raise ValueError(f"unknown schedule {schedule!r}")

    return RunTrace(initial=initial, moves=moves, verdict=verdict, steps=steps,
                    rounds=rounds, seed=seed, final=eng.placement(),
                    first_repeat_index=first_repeat, repeated_from=repeated_from)


def replay_trace(g: Graph, t: TypeAssignment, cfg: GameConfig, trace: RunTrace,
                 *, verify: bool = False) -> Placement:
    """Re-apply a trace's moves from its initial placement.

    With ``verify=True`` every move is re-checked to be strictly
    improving for each involved agent (raises ScriptViolationError).
    """
    if verify:
        rerun = run_ird(g, t, trace.initial, cfg, schedule=Schedule.SCRIPTED,
                        script=trace.moves, max_steps=len(trace.moves))
        return rerun.final
    p = trace.initial
    for mv in trace.moves:
        p = apply_move(p, mv)
    return p
