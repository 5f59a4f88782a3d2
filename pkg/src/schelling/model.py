"""Static game semantics: agent types, placements, ratios and costs.

All arithmetic is exact (``fractions.Fraction`` / machine integers); no
floating-point comparison ever decides whether an agent is content.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .graph import Graph

__all__ = [
    "EMPTY",
    "Mode",
    "Aggregation",
    "GameConfig",
    "TypeAssignment",
    "Placement",
    "PlacementError",
    "positive_neighbors",
    "negative_neighbors",
    "pnr",
    "agent_cost",
    "is_content",
    "placement_cost",
    "social_cost",
    "validate_placement",
    "save_placement",
    "load_placement",
]

#: Occupant marker for an empty node.
EMPTY = -1


class Mode(Enum):
    SWAP = "swap"
    JUMP = "jump"


class Aggregation(Enum):
    #: negative neighborhood = all differently-typed occupied neighbors
    ONE_VS_ALL = "one_vs_all"
    #: negative neighborhood = largest single other-type group among neighbors
    ONE_VS_ONE = "one_vs_one"


class PlacementError(ValueError):
    """Invalid placement or placement/mode mismatch."""


@dataclass(frozen=True)
class GameConfig:
    """Game variant: intolerance threshold, move mode, and aggregation."""

    tau: Fraction
    mode: Mode = Mode.SWAP
    aggregation: Aggregation = Aggregation.ONE_VS_ALL

    def __post_init__(self):
        tau = Fraction(self.tau)
        object.__setattr__(self, "tau", tau)
        if not (0 < tau < 1):
            raise ValueError(f"tau must lie strictly in (0, 1), got {tau}")


class TypeAssignment:
    """Partition of agents ``0..num_agents-1`` into ``k`` non-empty types."""

    __slots__ = ("k", "type_of", "counts")

    def __init__(self, k: int, type_of):
        type_of = tuple(type_of)
        if k < 2:
            raise ValueError("need at least two agent types")
        counts = [0] * k
        for ty in type_of:
            if not (0 <= ty < k):
                raise ValueError(f"type id {ty} out of range for k={k}")
            counts[ty] += 1
        if any(c == 0 for c in counts):
            raise ValueError("every type must be non-empty")
        self.k = k
        self.type_of = type_of
        self.counts = tuple(counts)

    @property
    def num_agents(self) -> int:
        return len(self.type_of)

    @classmethod
    def from_counts(cls, counts) -> "TypeAssignment":
        """Agents labeled in blocks: ``counts[0]`` agents of type 0, then type 1, ..."""
        type_of = [ty for ty, c in enumerate(counts) for _ in range(c)]
        return cls(len(tuple(counts)), type_of)

    @classmethod
    def balanced(cls, num_agents: int, k: int) -> "TypeAssignment":
        """Equal proportions; the remainder goes to the lowest type ids."""
        base, rem = divmod(num_agents, k)
        return cls.from_counts([base + (1 if i < rem else 0) for i in range(k)])

    def __eq__(self, other):
        return (isinstance(other, TypeAssignment)
                and self.k == other.k and self.type_of == other.type_of)

    def __repr__(self):
        return f"TypeAssignment(k={self.k}, counts={self.counts})"


class Placement:
    """Injective map agent -> node, with the inverse node -> occupant.

    Swap games require every node occupied; jump games require at least
    one vacancy.  That coupling is validated by
    :func:`validate_placement`, not by this container.
    """

    __slots__ = ("num_nodes", "node_of", "occupant_of")

    def __init__(self, num_nodes: int, node_of):
        node_of = list(node_of)
        occupant_of = [EMPTY] * num_nodes
        for agent, node in enumerate(node_of):
            if not (0 <= node < num_nodes):
                raise PlacementError(f"agent {agent} placed on invalid node {node}")
            if occupant_of[node] != EMPTY:
                raise PlacementError(
                    f"agents {occupant_of[node]} and {agent} share node {node}")
            occupant_of[node] = agent
        self.num_nodes = num_nodes
        self.node_of = node_of
        self.occupant_of = occupant_of

    @property
    def num_agents(self) -> int:
        return len(self.node_of)

    @property
    def vacancies(self) -> int:
        return self.num_nodes - len(self.node_of)

    def copy(self) -> "Placement":
        return Placement(self.num_nodes, self.node_of)

    def __eq__(self, other):
        return (isinstance(other, Placement) and self.num_nodes == other.num_nodes
                and self.node_of == other.node_of)

    def __repr__(self):
        return f"Placement(agents={self.num_agents}, nodes={self.num_nodes})"


def validate_placement(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> None:
    """Check the placement fits the graph, the types, and the move mode."""
    if p.num_nodes != g.n:
        raise PlacementError(f"placement is over {p.num_nodes} nodes, graph has {g.n}")
    if p.num_agents != t.num_agents:
        raise PlacementError(
            f"placement covers {p.num_agents} agents, type assignment {t.num_agents}")
    if cfg.mode is Mode.SWAP and p.vacancies != 0:
        raise PlacementError("swap mode requires every node occupied")
    if cfg.mode is Mode.JUMP and p.vacancies == 0:
        raise PlacementError("jump mode requires at least one empty node")


def _neighbor_type_counts(g: Graph, t: TypeAssignment, p: Placement, node: int) -> list[int]:
    counts = [0] * t.k
    occ = p.occupant_of
    for v in g.adj[node]:
        b = occ[v]
        if b != EMPTY:
            counts[t.type_of[b]] += 1
    return counts


def positive_neighbors(g: Graph, t: TypeAssignment, p: Placement, a: int) -> int:
    """Number of same-type agents on nodes adjacent to agent ``a``'s node."""
    return _neighbor_type_counts(g, t, p, p.node_of[a])[t.type_of[a]]


def negative_neighbors(g: Graph, t: TypeAssignment, p: Placement, a: int,
                       aggregation: Aggregation = Aggregation.ONE_VS_ALL) -> int:
    """Size of agent ``a``'s negative neighborhood under the given aggregation."""
    counts = _neighbor_type_counts(g, t, p, p.node_of[a])
    ta = t.type_of[a]
    if aggregation is Aggregation.ONE_VS_ALL:
        return sum(counts) - counts[ta]
    return max((c for ty, c in enumerate(counts) if ty != ta), default=0)


def pnr(g: Graph, t: TypeAssignment, p: Placement, a: int,
        aggregation: Aggregation = Aggregation.ONE_VS_ALL) -> Fraction | None:
    """Positive neighborhood ratio, or ``None`` when agent ``a`` is isolated.

    ``None`` plays the role of UNDEFINED: an isolated agent has no ratio,
    and her cost is fixed at tau by :func:`agent_cost`.
    """
    counts = _neighbor_type_counts(g, t, p, p.node_of[a])
    ta = t.type_of[a]
    pos = counts[ta]
    if aggregation is Aggregation.ONE_VS_ALL:
        neg = sum(counts) - pos
    else:
        neg = max((c for ty, c in enumerate(counts) if ty != ta), default=0)
    if pos + neg == 0:
        return None
    return Fraction(pos, pos + neg)


def agent_cost(g: Graph, t: TypeAssignment, p: Placement, a: int, cfg: GameConfig) -> Fraction:
    """Exact cost of agent ``a``: ``max(0, tau - pnr)``, or ``tau`` if isolated."""
    ratio = pnr(g, t, p, a, cfg.aggregation)
    if ratio is None:
        return cfg.tau
    return max(Fraction(0), cfg.tau - ratio)


def is_content(g: Graph, t: TypeAssignment, p: Placement, a: int, cfg: GameConfig) -> bool:
    return agent_cost(g, t, p, a, cfg) == 0


def placement_cost(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> int:
    """Number of discontent agents."""
    return sum(1 for a in range(t.num_agents) if agent_cost(g, t, p, a, cfg) > 0)


def social_cost(g: Graph, t: TypeAssignment, p: Placement, cfg: GameConfig) -> Fraction:
    """Sum of all agents' costs."""
    return sum((agent_cost(g, t, p, a, cfg) for a in range(t.num_agents)), Fraction(0))


def save_placement(t: TypeAssignment, p: Placement) -> str:
    """Serialize types and placement: ``"agents k"`` then ``"agent type node"`` lines."""
    lines = [f"{t.num_agents} {t.k}"]
    for a in range(t.num_agents):
        node = p.node_of[a] if a < p.num_agents else None
        lines.append(f"{a} {t.type_of[a]} {node if node is not None else '-'}")
    return "\n".join(lines) + "\n"


def load_placement(text: str, num_nodes: int) -> tuple[TypeAssignment, Placement]:
    """Parse the placement/type file.  Partial placements ('-' nodes) are rejected
    here because every game state requires all agents placed."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PlacementError("empty placement text")
    head = lines[0].split()
    if len(head) != 2:
        raise PlacementError(f"bad header {lines[0]!r}; expected 'agents k'")
    num_agents, k = int(head[0]), int(head[1])
    if len(lines) - 1 != num_agents:
        raise PlacementError(f"header declares {num_agents} agents, found {len(lines) - 1}")
    type_of = [0] * num_agents
    node_of = [0] * num_agents
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise PlacementError(f"bad agent line {ln!r}")
        a, ty = int(parts[0]), int(parts[1])
        if not (0 <= a < num_agents):
            raise PlacementError(f"agent id {a} out of range")
        if parts[2] == "-":
            raise PlacementError(f"agent {a} is unplaced; game states need full placements")
        type_of[a] = ty
        node_of[a] = int(parts[2])
    return TypeAssignment(k, type_of), Placement(num_nodes, node_of)
