"""Parametric improving-response-cycle instances and their machine verification.

Each builder produces a :class:`ScriptedInstance`: a graph, a type
assignment, an initial placement, and four scripted moves that return
the game to its initial node -> type pattern.  Alongside every scripted
move the instance records the movers' exact expected costs, so the
verifier can recompute them and fail loudly on any mismatch.

The gadget wirings below are determined by the neighborhood
compositions the cost expressions force (e.g. "sees x+1 same-type
agents out of 2x occupied neighbors"); clique agents get enough
same-type company to stay content wherever a construction's uniqueness
claim depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import Move, MoveKind, _Engine
from .graph import Graph
from .model import (Aggregation, GameConfig, Mode, Placement, TypeAssignment)

__all__ = [
    "ConstructionError",
    "ExpectedCost",
    "ScriptedStep",
    "ScriptedInstance",
    "OptNotStableInstance",
    "build_ssg_k2_irc",
    "build_1k_ssg_irc",
    "build_11_ssg_irc",
    "build_11_ssg_regular_irc",
    "build_jsg_regular_irc",
    "build_jsg_arbitrary_irc",
    "build_opt_not_stable",
    "BUILDERS",
    "StepCheck",
    "CycleVerification",
    "verify_scripted_cycle",
]


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class ExpectedCost:
    """Expected exact cost of one mover; ``None`` means not pinned."""

    agent: int
    before: Fraction | None
    after: Fraction | None


@dataclass(frozen=True)
class ScriptedStep:
    move: Move
    expected: tuple[ExpectedCost, ...]


@dataclass
class ScriptedInstance:
    name: str
    graph: Graph
    types: TypeAssignment
    initial: Placement
    cfg: GameConfig
    steps: list[ScriptedStep]
    uniqueness_claimed: bool
    x: int | None = None
    delta: int | None = None
    named_agents: dict[str, int] = field(default_factory=dict)

    def script(self) -> list[Move]:
        return [s.move for s in self.steps]


def _frac(v) -> Fraction:
    return Fraction(v)


def _ceil_frac(fr: Fraction) -> int:
    return -((-fr.numerator) // fr.denominator)


def _min_int_greater(fr: Fraction) -> int:
    """Smallest integer strictly greater than ``fr``."""
    return fr.numerator // fr.denominator + 1


def _clique_edges(nodes) -> list[tuple[int, int]]:
    nodes = list(nodes)
    return [(nodes[i], nodes[j]) for i in range(len(nodes)) for j in range(i + 1, len(nodes))]


def _star_edges(center: int, leaves) -> list[tuple[int, int]]:
    return [(center, v) for v in leaves]


def _identity_placement(occupied_nodes, num_nodes: int) -> Placement:
    """Agents 0..len-1 on the given nodes, in node order."""
    return Placement(num_nodes, list(occupied_nodes))


# ---------------------------------------------------------------------------
# Swap game, two types, tau in (1/2, 1)
# ---------------------------------------------------------------------------

def build_ssg_k2_irc(tau, x: int | None = None) -> ScriptedInstance:
    """Two-type swap-game IRC for intolerant agents (tau in (1/2, 1)).

    Four swaps, each the unique improving move in its state; afterwards
    the node -> type pattern equals the initial one.  The default group
    parameter is ``x = max(4, ceil(1/(tau-1/2)), ceil(1/(2-2*tau)))``;
    the floor of 4 keeps every scripted improvement strict at the
    boundary point tau = 5/6 where both ceilings collapse to 3.
    """
    tau = _frac(tau)
    if not (Fraction(1, 2) < tau < 1):
        raise ConstructionError(f"tau must lie in (1/2, 1), got {tau}")
    if x is None:
        x = max(4, _ceil_frac(1 / (tau - Fraction(1, 2))),
                _ceil_frac(1 / (2 - 2 * tau)))
    if x < 4 or x * (2 * tau - 1) <= 1 or 2 * x * (1 - tau) < 1:
        raise ConstructionError(f"x={x} too small for tau={tau}")

    # Orange side: one clique of 4x+1 (keeps every member content); each
    # member is attached to exactly one named node.  Blue side likewise
    # with 4x-2 members.
    orange = list(range(0, 4 * x + 1))
    blue = list(range(4 * x + 1, 8 * x - 1))
    n_a, n_b, n_c, n_d = 8 * x - 1, 8 * x, 8 * x + 1, 8 * x + 2
    n = 8 * x + 3
    o_a, o_b, o_c, o_d = orange[:1], orange[1:x], orange[x:3 * x], orange[3 * x:]
    b_a, b_b, b_c, b_d = blue[:1], blue[1:x + 1], blue[x + 1:3 * x - 1], blue[3 * x - 1:]
    edges = _clique_edges(orange) + _clique_edges(blue)
    edges += _star_edges(n_a, o_a + b_a + [n_c])
    edges += _star_edges(n_b, o_b + b_b + [n_c])
    edges += _star_edges(n_c, o_c + b_c)
    edges += _star_edges(n_d, o_d + b_d)
    g = Graph(n, edges)

    # type 0 = orange (c, d and the orange clique), type 1 = blue (a, b, blue clique)
    type_of = [0] * (4 * x + 1) + [1] * (4 * x - 2) + [1, 1, 0, 0]
    types = TypeAssignment(2, type_of)
    p0 = _identity_placement(range(n), n)
    a, b, c, d = n_a, n_b, n_c, n_d  # agent ids equal node ids initially

    t = tau
    f = Fraction
    zero = f(0)
    steps = [
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(a, t - f(1, 3), t - f(x - 1, 2 * x)),
            ExpectedCost(d, t - f(x + 1, 2 * x), max(zero, t - f(2, 3))))),
        ScriptedStep(Move.swap(a, c), (
            ExpectedCost(a, t - f(x - 1, 2 * x), t - f(2 * x - 1, 4 * x)),
            ExpectedCost(c, t - f(2 * x + 1, 4 * x), t - f(x + 1, 2 * x)))),
        ScriptedStep(Move.swap(b, d), (
            ExpectedCost(b, t - f(x + 1, 2 * x), max(zero, t - f(2, 3))),
            ExpectedCost(d, t - f(1, 3), t - f(x - 1, 2 * x)))),
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(a, t - f(2 * x - 1, 4 * x), t - f(1, 2)),
            ExpectedCost(d, t - f(x - 1, 2 * x), t - f(1, 2)))),
    ]
    cfg = GameConfig(tau, Mode.SWAP, Aggregation.ONE_VS_ALL)
    return ScriptedInstance("ssg-k2", g, types, p0, cfg, steps, uniqueness_claimed=True,
                            x=x, named_agents={"a": a, "b": b, "c": c, "d": d})


# ---------------------------------------------------------------------------
# Swap game, one-vs-all, three types, tau in (0, 1/2]
# ---------------------------------------------------------------------------

def build_1k_ssg_irc(tau, x: int | None = None) -> ScriptedInstance:
    """Three-type one-vs-all swap-game IRC for tolerant agents (tau in (0, 1/2]).

    Group parameter: minimal integer ``x > 3/(4*tau) - 1``, exactly the
    bound that makes the first mover's partner discontent.
    """
    tau = _frac(tau)
    if not (0 < tau <= Fraction(1, 2)):
        raise ConstructionError(f"tau must lie in (0, 1/2], got {tau}")
    if x is None:
        x = max(1, _min_int_greater(3 / (4 * tau) - 1))
    if 4 * (x + 1) * tau <= 3:
        raise ConstructionError(f"x={x} too small for tau={tau}")

    so, sb, sg = 8, 5, 16 * x + 1
    orange = list(range(so))
    blue = list(range(so, so + sb))
    gray = list(range(so + sb, so + sb + sg))
    base = so + sb + sg
    n_a, n_b, n_c, n_d = base, base + 1, base + 2, base + 3
    n = base + 4

    o_d, o_b, o_c = orange[:3], orange[3:4], orange[4:]
    b_d, b_b, b_c = blue[:1], blue[1:3], blue[3:]
    g_a, g_d, g_b, g_c = gray[:1], gray[1:4 * x + 1], gray[4 * x + 1:8 * x + 1], gray[8 * x + 1:]
    edges = _clique_edges(orange) + _clique_edges(blue) + _clique_edges(gray)
    edges += _star_edges(n_a, g_a + [n_c])
    edges += _star_edges(n_b, o_b + b_b + g_b + [n_c])
    edges += _star_edges(n_c, o_c + b_c + g_c)
    edges += _star_edges(n_d, o_d + b_d + g_d)
    g = Graph(n, edges)

    type_of = [0] * so + [1] * sb + [2] * sg + [1, 1, 0, 0]
    types = TypeAssignment(3, type_of)
    p0 = _identity_placement(range(n), n)
    a, b, c, d = n_a, n_b, n_c, n_d

    t = tau
    f = Fraction
    x1 = x + 1
    steps = [
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(a, t, t - f(1, 4 * x1)),
            ExpectedCost(d, None, f(0)))),
        ScriptedStep(Move.swap(a, c), (
            ExpectedCost(a, t - f(1, 4 * x1), t - f(3, 8 * x1)),
            ExpectedCost(c, t - f(5, 8 * x1), t - f(3, 4 * x1)))),
        ScriptedStep(Move.swap(b, d), (
            ExpectedCost(d, t, t - f(1, 4 * x1)),
            ExpectedCost(b, None, f(0)))),
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(d, t - f(1, 4 * x1), t - f(1, 2 * x1)),
            ExpectedCost(a, t - f(3, 8 * x1), t - f(1, 2 * x1)))),
    ]
    cfg = GameConfig(tau, Mode.SWAP, Aggregation.ONE_VS_ALL)
    return ScriptedInstance("ssg-1k", g, types, p0, cfg, steps, uniqueness_claimed=True,
                            x=x, named_agents={"a": a, "b": b, "c": c, "d": d})


# ---------------------------------------------------------------------------
# Swap game, one-vs-one, three types
# ---------------------------------------------------------------------------

def _one_vs_one_base(tau: Fraction, x: int, *, merged_gray: bool):
    """Shared gadget of the one-vs-one swap IRCs.

    Gray attachment groups (3x to the d-node, 4x to the c-node, 6x to
    the b-node) form one merged clique on arbitrary graphs and three
    separate cliques in the regular variant, where the merged version
    would exceed the target degree.
    """
    so, sb = max(x + 1, 4), max(x + 1, 8)
    orange = list(range(so))
    blue = list(range(so, so + sb))
    gray = list(range(so + sb, so + sb + 13 * x))
    base = so + sb + 13 * x
    n_a, n_b, n_c, n_d = base, base + 1, base + 2, base + 3
    n = base + 4

    o_d, o_c, o_b = orange[:2], orange[2:3], orange[3:4]
    b_d, b_c, b_b = blue[:1], blue[1:3], blue[3:8]
    g_d, g_c, g_b = gray[:3 * x], gray[3 * x:7 * x], gray[7 * x:]
    edges = _clique_edges(orange) + _clique_edges(blue)
    if merged_gray:
        edges += _clique_edges(gray)
    else:
        edges += _clique_edges(g_d) + _clique_edges(g_c) + _clique_edges(g_b)
    edges += _star_edges(n_a, [n_c])
    edges += _star_edges(n_b, o_b + b_b + g_b)
    edges += _star_edges(n_c, o_c + b_c + g_c)
    edges += _star_edges(n_d, o_d + b_d + g_d)
    type_of = [0] * so + [1] * sb + [2] * (13 * x) + [1, 1, 0, 0]
    return n, edges, type_of, (n_a, n_b, n_c, n_d)


def _one_vs_one_steps(tau: Fraction, x: int, agents, *, regular: bool):
    a, b, c, d = agents
    t = tau
    f = Fraction
    zero = f(0)
    # On the padded regular variant the a-node keeps singleton-type
    # fillers next to it, so "content" relaxes to cost max(0, tau - 1/2).
    landed = max(zero, t - f(1, 2)) if regular else zero
    return [
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(a, t, t - f(1, 3 * x + 1)),
            ExpectedCost(d, None, landed))),
        ScriptedStep(Move.swap(a, c), (
            ExpectedCost(a, t - f(1, 3 * x + 1), t - f(2, 4 * x + 2)),
            ExpectedCost(c, t - f(2, 4 * x + 2), t - f(2, 3 * x + 2)))),
        ScriptedStep(Move.swap(b, d), (
            ExpectedCost(d, t, t - f(1, 6 * x + 1)),
            ExpectedCost(b, None, landed))),
        ScriptedStep(Move.swap(a, d), (
            ExpectedCost(d, t - f(1, 6 * x + 1), t - f(1, 4 * x + 1)),
            ExpectedCost(a, t - f(3, 4 * x + 3), t - f(5, 6 * x + 5)))),
    ]


def build_11_ssg_irc(tau, x: int | None = None) -> ScriptedInstance:
    """Three-type one-vs-one swap-game IRC, any tau in (0, 1).

    Group parameter: minimal integer ``x > max(5(1-tau)/(6*tau),
    tau/(1-tau))``; the first bound makes the b-agent discontent, the
    second keeps all clique agents content.
    """
    tau = _frac(tau)
    if not (0 < tau < 1):
        raise ConstructionError(f"tau must lie in (0, 1), got {tau}")
    if x is None:
        x = max(1, _min_int_greater(max(5 * (1 - tau) / (6 * tau), tau / (1 - tau))))
    if (6 * x + 5) * tau <= 5 or x * (1 - tau) <= tau:
        raise ConstructionError(f"x={x} too small for tau={tau}")

    n, edges, type_of, named = _one_vs_one_base(tau, x, merged_gray=True)
    g = Graph(n, edges)
    types = TypeAssignment(3, type_of)
    p0 = _identity_placement(range(n), n)
    a, b, c, d = named
    steps = _one_vs_one_steps(tau, x, named, regular=False)
    cfg = GameConfig(tau, Mode.SWAP, Aggregation.ONE_VS_ONE)
    return ScriptedInstance("ssg-11", g, types, p0, cfg, steps, uniqueness_claimed=True,
                            x=x, named_agents={"a": a, "b": b, "c": c, "d": d})


def _havel_hakimi_edges(degrees: list[int]) -> list[tuple[int, int]]:
    """Deterministic simple-graph realization of a degree sequence."""
    if sum(degrees) % 2 != 0:
        raise ConstructionError("degree sequence has odd sum")
    remaining = [[deg, i] for i, deg in enumerate(degrees)]
    edges = []
    while True:
        remaining.sort(key=lambda di: (-di[0], di[1]))
        top = remaining[0]
        d, u = top
        if d == 0:
            return edges
        if d > len(remaining) - 1:
            raise ConstructionError("degree sequence not graphical")
        top[0] = 0
        for other in remaining[1:d + 1]:
            if other[0] == 0:
                raise ConstructionError("degree sequence not graphical")
            other[0] -= 1
            edges.append((min(u, other[1]), max(u, other[1])))


def _pad_to_regular(n_base: int, edges: list[tuple[int, int]], delta: int):
    """Add filler nodes and edges so every node has degree exactly ``delta``.

    Fillers attach round-robin to degree-deficient base nodes and then to
    each other (Havel-Hakimi on the residual degrees).  Returns
    (total_nodes, all_edges, filler_count).
    """
    deg = [0] * n_base
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    if any(d > delta for d in deg):
        raise ConstructionError("a base node already exceeds the target degree")
    deficits = [delta - d for d in deg]
    total_deficit = sum(deficits)
    if total_deficit == 0:
        return n_base, edges, 0
    fillers = max(-(-total_deficit // delta), max(deficits), 1)
    while delta - (total_deficit // fillers) > fillers - 1:
        fillers += 1
    external = [0] * fillers
    fill_edges = []
    ptr = 0
    for v in range(n_base):
        for _ in range(deficits[v]):
            fill_edges.append((v, n_base + ptr % fillers))
            external[ptr % fillers] += 1
            ptr += 1
    internal = [delta - e for e in external]
    hh = _havel_hakimi_edges(internal)
    fill_edges += [(n_base + i, n_base + j) for i, j in hh]
    return n_base + fillers, edges + fill_edges, fillers


def build_11_ssg_regular_irc(tau, x: int | None = None) -> ScriptedInstance:
    """One-vs-one swap-game IRC on a regular graph of degree ``6*(x+1)``.

    The gadget of :func:`build_11_ssg_irc` with the gray attachment
    cliques kept separate, padded to regularity by filler nodes whose
    agents each carry a singleton type.  A singleton-type agent sees a
    positive neighborhood ratio of zero everywhere, so no swap can ever
    strictly improve her and the fillers are dynamically inert.  Only
    IRC existence is claimed, not uniqueness: at high tau some clique
    agents may themselves be discontent.
    """
    tau = _frac(tau)
    if not (0 < tau < 1):
        raise ConstructionError(f"tau must lie in (0, 1), got {tau}")
    if x is None:
        x = 1
        while (6 * x + 5) * tau <= 5 or (x + 1) * tau < 1:
            x += 1
    if (6 * x + 5) * tau <= 5:
        raise ConstructionError(f"x={x} too small for tau={tau}")
    if (x + 1) * tau < 1:
        raise ConstructionError(
            f"x={x}, tau={tau} violates tau >= 6/delta with delta=6(x+1)")
    delta = 6 * (x + 1)

    n_base, edges, type_of, named = _one_vs_one_base(tau, x, merged_gray=False)
    n, edges, fillers = _pad_to_regular(n_base, edges, delta)
    type_of = list(type_of) + [3 + i for i in range(fillers)]
    g = Graph(n, edges)
    types = TypeAssignment(3 + fillers, type_of)
    p0 = _identity_placement(range(n), n)
    a, b, c, d = named
    steps = _one_vs_one_steps(tau, x, named, regular=True)
    cfg = GameConfig(tau, Mode.SWAP, Aggregation.ONE_VS_ONE)
    return ScriptedInstance("ssg-11-regular", g, types, p0, cfg, steps,
                            uniqueness_claimed=False, x=x, delta=delta,
                            named_agents={"a": a, "b": b, "c": c, "d": d})


# ---------------------------------------------------------------------------
# Jump game, regular graphs, tau > 2/delta
# ---------------------------------------------------------------------------

def build_jsg_regular_irc(delta: int, tau) -> ScriptedInstance:
    """Jump-game IRC on a ``delta``-regular graph for ``tau > 2/delta``.

    Seven cliques of ``delta - 2`` nodes arranged in a matching cycle,
    plus seven single nodes; two cliques host blue agents, four single
    nodes host the orange agents a, b, c, d, everything else is empty.
    Four jumps restore the initial pattern exactly: a becomes content
    next to c, the thereby isolated b settles next to d and a blue
    clique, then c and a repeat the figure mirrored.
    """
    tau = _frac(tau)
    if delta < 3:
        raise ConstructionError(f"delta must be at least 3, got {delta}")
    if not (Fraction(2, delta) < tau < 1):
        raise ConstructionError(f"tau must lie in (2/{delta}, 1), got {tau}")
    csz = delta - 2
    cliques = [list(range(i * csz, (i + 1) * csz)) for i in range(7)]
    (b_left, b_right, w_left, w_right, w_d, w_sb, w_se) = cliques
    base = 7 * csz
    alpha, beta, gamma, dnode, e1, sbeta, se = range(base, base + 7)
    n = base + 7

    edges = []
    for cl in cliques:
        edges += _clique_edges(cl)
    for i in range(7):
        a_cl, b_cl = cliques[i], cliques[(i + 1) % 7]
        edges += [(min(u, v), max(u, v)) for u, v in zip(a_cl, b_cl)]
    attach = [(alpha, b_left), (beta, w_left), (gamma, b_right), (e1, w_right),
              (dnode, w_d), (sbeta, w_sb), (se, w_se)]
    for single, cl in attach:
        edges += _star_edges(single, cl)
    ring = [alpha, beta, sbeta, se, e1, gamma, dnode]
    edges += [(min(u, v), max(u, v))
              for u, v in zip(ring, ring[1:] + ring[:1])]
    g = Graph(n, edges)

    occupied = b_left + b_right + [alpha, beta, gamma, dnode]
    type_by_node = {v: 1 for v in b_left + b_right}
    type_by_node.update({alpha: 0, beta: 0, gamma: 0, dnode: 0})
    occupied = sorted(occupied)
    types = TypeAssignment(2, [type_by_node[v] for v in occupied])
    p0 = _identity_placement(occupied, n)
    agent_at = {v: i for i, v in enumerate(occupied)}
    a, b, c, d = agent_at[alpha], agent_at[beta], agent_at[gamma], agent_at[dnode]

    t = tau
    f = Fraction
    steps = [
        ScriptedStep(Move.jump(a, e1), (ExpectedCost(a, t - f(2, delta), f(0)),)),
        ScriptedStep(Move.jump(b, alpha), (ExpectedCost(b, t, t - f(1, delta - 1)),)),
        ScriptedStep(Move.jump(c, beta), (ExpectedCost(c, t - f(2, delta), f(0)),)),
        ScriptedStep(Move.jump(a, gamma), (ExpectedCost(a, t, t - f(1, delta - 1)),)),
    ]
    cfg = GameConfig(tau, Mode.JUMP, Aggregation.ONE_VS_ALL)
    return ScriptedInstance("jsg-regular", g, types, p0, cfg, steps,
                            uniqueness_claimed=False, delta=delta,
                            named_agents={"a": a, "b": b, "c": c, "d": d})


# ---------------------------------------------------------------------------
# Jump game, arbitrary graphs, any tau
# ---------------------------------------------------------------------------

def build_jsg_arbitrary_irc(tau, x: int | None = None) -> ScriptedInstance:
    """Jump-game IRC with a unique improving jump per state, any tau in (0, 1).

    A clique of ``2x+1`` blue agents, four orange agents and a single
    empty node; each state offers exactly one improving jump because the
    lone vacancy is an improvement for exactly one discontent agent.
    """
    tau = _frac(tau)
    if not (0 < tau < 1):
        raise ConstructionError(f"tau must lie in (0, 1), got {tau}")
    if x is None:
        x = max(3, _min_int_greater(max(2 / tau, 1 / (1 - tau))))
    if x * tau <= 2 or x * (1 - tau) <= 1:
        raise ConstructionError(f"x={x} too small for tau={tau}")

    blues = list(range(2 * x + 1))
    fnode = blues[0]
    u_set = blues[1:x + 1]
    v_set = blues[x + 1:]
    n_a, n_b, n_c, n_d, eps = 2 * x + 1, 2 * x + 2, 2 * x + 3, 2 * x + 4, 2 * x + 5
    n = 2 * x + 6

    edges = _clique_edges(blues)
    edges += _star_edges(n_a, [fnode, eps])
    edges += _star_edges(n_b, [n_c, n_d] + v_set)
    edges += [(fnode, n_c)]
    edges += [(n_d, eps)]
    edges += _star_edges(eps, u_set)
    g = Graph(n, edges)

    occupied = blues + [n_a, n_b, n_c, n_d]
    types = TypeAssignment(2, [1] * (2 * x + 1) + [0, 0, 0, 0])
    p0 = _identity_placement(occupied, n)
    a, b, c, d = 2 * x + 1, 2 * x + 2, 2 * x + 3, 2 * x + 4

    t = tau
    f = Fraction
    zero = f(0)
    steps = [
        ScriptedStep(Move.jump(a, eps), (ExpectedCost(a, t, t - f(1, x + 1)),)),
        ScriptedStep(Move.jump(b, n_a), (
            ExpectedCost(b, t - f(2, x + 2), max(zero, t - f(1, 2))),)),
        ScriptedStep(Move.jump(c, n_b), (ExpectedCost(c, t, t - f(1, x + 1)),)),
        ScriptedStep(Move.jump(a, n_c), (
            ExpectedCost(a, t - f(2, x + 2), max(zero, t - f(1, 2))),)),
    ]
    cfg = GameConfig(tau, Mode.JUMP, Aggregation.ONE_VS_ALL)
    return ScriptedInstance("jsg-arbitrary", g, types, p0, cfg, steps,
                            uniqueness_claimed=True, x=x,
                            named_agents={"a": a, "b": b, "c": c, "d": d})


# ---------------------------------------------------------------------------
# Optimal-but-not-stable instance
# ---------------------------------------------------------------------------

@dataclass
class OptNotStableInstance:
    """Two-clique instance whose unique-cost optimum admits an improving swap."""

    graph: Graph
    types: TypeAssignment
    p_star: Placement
    p_after: Placement
    swap_agents: tuple[int, int]
    cfg: GameConfig
    optimal_cost: int = 7
    after_cost: int = 8


def build_opt_not_stable(tau=Fraction(91, 100)) -> OptNotStableInstance:
    """Swap-game instance (two 10-cliques plus two bridge nodes) where the
    optimal placement costs 7, is not stable, and the improving swap of
    the two bridge agents yields a placement of cost 8.  Valid for any
    tau in (9/10, 1): with cliques of ten, an agent with any
    differently-typed neighbor has a ratio of at most 9/10.
    """
    tau = _frac(tau)
    if not (Fraction(9, 10) < tau < 1):
        raise ConstructionError(f"tau must lie in (9/10, 1), got {tau}")
    u_cl = list(range(10))
    v_cl = list(range(10, 20))
    n_a, n_b = 20, 21
    edges = _clique_edges(u_cl) + _clique_edges(v_cl)
    edges += _star_edges(n_a, [v_cl[0], v_cl[1], n_b])
    edges += _star_edges(n_b, u_cl[:3] + v_cl[2:8])
    g = Graph(22, edges)
    types = TypeAssignment(2, [0] * 10 + [1] * 10 + [0, 1])
    p_star = _identity_placement(range(22), 22)
    node_of = list(range(22))
    node_of[20], node_of[21] = node_of[21], node_of[20]
    p_after = Placement(22, node_of)
    cfg = GameConfig(tau, Mode.SWAP, Aggregation.ONE_VS_ALL)
    return OptNotStableInstance(g, types, p_star, p_after, (20, 21), cfg)


BUILDERS = {
    "ssg-k2": build_ssg_k2_irc,
    "ssg-1k": build_1k_ssg_irc,
    "ssg-11": build_11_ssg_irc,
    "ssg-11-regular": build_11_ssg_regular_irc,
    "jsg-regular": build_jsg_regular_irc,
    "jsg-arbitrary": build_jsg_arbitrary_irc,
}


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class StepCheck:
    index: int
    move: Move
    improving_ok: bool
    costs_ok: bool
    cost_mismatches: list[tuple[int, str, Fraction, Fraction]]
    unique_ok: bool | None
    improving_count: int | None


@dataclass
class CycleVerification:
    name: str
    tau: Fraction
    steps: list[StepCheck]
    closure_ok: bool
    uniqueness_claimed: bool

    @property
    def ok(self) -> bool:
        return self.closure_ok and all(
            s.improving_ok and s.costs_ok and (s.unique_ok is not False)
            for s in self.steps)

    def to_text(self) -> str:
        lines = [f"construction {self.name} (tau={self.tau}): "
                 f"{'PASS' if self.ok else 'FAIL'}"]
        for s in self.steps:
            parts = [f"  step {s.index}: improving={'ok' if s.improving_ok else 'FAIL'}",
                     f"costs={'ok' if s.costs_ok else 'FAIL'}"]
            if s.unique_ok is not None:
                parts.append(f"unique={'ok' if s.unique_ok else 'FAIL'}"
                             f" ({s.improving_count} improving)")
            for agent, which, exp, act in s.cost_mismatches:
                parts.append(f"[agent {agent} {which}: expected {exp}, got {act}]")
            lines.append(" ".join(parts))
        lines.append(f"  cycle closes: {'ok' if self.closure_ok else 'FAIL'}")
        return "\n".join(lines)

    def to_csv_rows(self) -> list[dict]:
        rows = []
        for s in self.steps:
            rows.append({
                "construction": self.name,
                "tau": str(self.tau),
                "step": s.index,
                "improving_ok": s.improving_ok,
                "costs_ok": s.costs_ok,
                "unique_ok": "" if s.unique_ok is None else s.unique_ok,
                "improving_count": "" if s.improving_count is None else s.improving_count,
            })
        rows.append({"construction": self.name, "tau": str(self.tau), "step": "closure",
                     "improving_ok": "", "costs_ok": "", "unique_ok": self.closure_ok,
                     "improving_count": ""})
        return rows


def verify_scripted_cycle(inst: ScriptedInstance) -> CycleVerification:
    """Machine-check a scripted cycle claim by claim.

    Per step: (i) the scripted move strictly improves every involved
    agent, (ii) where uniqueness is claimed, it is the only improving
    move in its state, (iii) recorded expected costs equal recomputed
    exact costs.  Finally the closing state's node -> type pattern must
    equal the initial one.  The script is force-executed even past a
    failed check so one report covers every step.
    """
    eng = _Engine(inst.graph, inst.types, inst.initial, inst.cfg)
    initial_key = eng.state_key()
    checks = []
    for idx, step in enumerate(inst.steps, start=1):
        mv = step.move
        mismatches: list[tuple[int, str, Fraction, Fraction]] = []
        for exp in step.expected:
            if exp.before is not None:
                s, d = eng._ratio_at(eng.node_of[exp.agent], eng.type_of[exp.agent])
                actual = eng._cost(s, d)
                if actual != exp.before:
                    mismatches.append((exp.agent, "before", exp.before, actual))

        unique_ok = None
        count = None
        if inst.uniqueness_claimed:
            found = [(a, o) for a, o, _ in eng.iter_improving()]
            count = len(found)
            if mv.kind is MoveKind.SWAP:
                key = tuple(sorted((mv.agent_a, mv.agent_b)))
            else:
                key = (mv.agent_a, mv.target)
            unique_ok = found == [key]

        if mv.kind is MoveKind.SWAP:
            pa, pb = eng.swap_eval(mv.agent_a, mv.agent_b)
            improving = eng._improves(*pa) and eng._improves(*pb)
            eng.execute_swap(mv.agent_a, mv.agent_b, (pa, pb))
        else:
            gain = eng.jump_eval(mv.agent_a, mv.target)
            improving = eng._improves(*gain)
            eng.execute_jump(mv.agent_a, mv.target, gain)

        for exp in step.expected:
            if exp.after is not None:
                s, d = eng._ratio_at(eng.node_of[exp.agent], eng.type_of[exp.agent])
                actual = eng._cost(s, d)
                if actual != exp.after:
                    mismatches.append((exp.agent, "after", exp.after, actual))

        checks.append(StepCheck(idx, mv, improving, not mismatches, mismatches,
                                unique_ok, count))

    closure_ok = eng.state_key() == initial_key
    return CycleVerification(inst.name, inst.cfg.tau, checks, closure_ok,
                             inst.uniqueness_claimed)
