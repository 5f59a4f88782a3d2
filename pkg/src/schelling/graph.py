"""Undirected simple graphs: construction, generators, and edge-list I/O.

Node ids are dense integers ``0..n-1``.  Graphs are immutable after
construction and safe to share across threads/processes.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence

__all__ = [
    "Graph",
    "GraphError",
    "InvalidDimensionError",
    "ParityError",
    "GenerationFailureError",
    "EdgeListError",
    "make_toroidal_moore_grid",
    "make_random_regular",
    "make_ring_union",
    "load_edge_list",
    "save_edge_list",
]


class GraphError(ValueError):
    """Base class for graph construction/validation failures."""


class InvalidDimensionError(GraphError):
    """A size parameter is below its minimum (e.g. torus side or ring < 3)."""


class ParityError(GraphError):
    """Infeasible regular-graph request (n * delta odd, or delta >= n)."""


class GenerationFailureError(GraphError):
    """Random generation exceeded its retry cap."""


class EdgeListError(GraphError):
    """Malformed edge-list text."""


class Graph:
    """Undirected, simple graph over nodes ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (u, v)
        Undirected edges.  Self-loops and duplicates are rejected.
    allow_disconnected : bool
        By default a graph must form a single connected component
        (the residential-area model assumes it).  Ring unions opt out;
        only the optimal-placement module accepts such graphs.
    """

    __slots__ = ("n", "m", "adj", "adj_sets", "is_connected")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], *,
                 allow_disconnected: bool = False):
        if n < 0:
            raise GraphError("node count must be nonnegative")
        self.n = n
        seen: set[tuple[int, int]] = set()
        lists: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            lists[u].append(v)
            lists[v].append(u)
        self.m = len(seen)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in lists)
        self.adj_sets: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in lists)
        self.is_connected = self._connected()
        if not self.is_connected and not allow_disconnected:
            raise GraphError("graph is not connected")

    def _connected(self) -> bool:
        if self.n == 0:
            return True
        seen = bytearray(self.n)
        stack = [0]
        seen[0] = 1
        count = 1
        adj = self.adj
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    stack.append(v)
        return count == self.n

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self):
        """Yield each undirected edge once as (u, v) with u < v, sorted."""
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, in node order."""
        seen = bytearray(self.n)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = 1
            stack = [start]
            while stack:
                u = stack.pop()
                for v in self.adj[u]:
                    if not seen[v]:
                        seen[v] = 1
                        comp.append(v)
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def make_toroidal_moore_grid(rows: int, cols: int) -> Graph:
    """Toroidal grid with the Moore (8-neighbor, king-move) neighborhood.

    Node id of cell (r, c) is ``r * cols + c``.  Both sides must be at
    least 3, otherwise wraparound would create parallel edges.  Every
    node has degree exactly 8, so the edge count is ``rows * cols * 4``.
    """
    if rows < 3 or cols < 3:
        raise InvalidDimensionError("toroidal Moore grid needs rows >= 3 and cols >= 3")
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    v = ((r + dr) % rows) * cols + ((c + dc) % cols)
                    if u < v:
                        edges.append((u, v))
    return Graph(rows * cols, edges)


def make_random_regular(n: int, delta: int, seed: int, *, max_attempts: int = 1000) -> Graph:
    """Random connected ``delta``-regular simple graph on ``n`` nodes.

    Uses the stub-pairing (configuration) model: stubs are shuffled and
    paired, skipping pairs that would create a self-loop or a parallel
    edge; leftover conflicting stubs are re-shuffled and retried.  An
    attempt that dead-ends, produces a non-simple pairing, or comes out
    disconnected is rejected and restarted.  Deterministic for a fixed
    seed.
    """
    if delta < 0 or n < 0:
        raise GraphError("n and delta must be nonnegative")
    if (n * delta) % 2 != 0:
        raise ParityError(f"n * delta must be even (got n={n}, delta={delta})")
    if delta >= n and not (delta == 0 and n <= 1):
        raise ParityError(f"delta must be smaller than n (got n={n}, delta={delta})")
    rng = random.Random(seed)

    def attempt() -> set[tuple[int, int]] | None:
        edges: set[tuple[int, int]] = set()
        stubs = [v for v in range(n) for _ in range(delta)]
        while stubs:
            rng.shuffle(stubs)
            leftovers: list[int] = []
            it = iter(stubs)
            for s1, s2 in zip(it, it):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    leftovers.append(s1)
                    leftovers.append(s2)
            if len(leftovers) == len(stubs):
                # No progress is possible only when every remaining pair
                # conflicts; give up on this attempt.
                counts = sorted(set(leftovers))
                if all((min(a, b), max(a, b)) in edges or a == b
                       for i, a in enumerate(counts) for b in counts[i:]):
                    return None
            stubs = leftovers
        return edges

    for _ in range(max_attempts):
        edges = attempt()
        if edges is None:
            continue
        g = Graph(n, edges, allow_disconnected=True)
        if g.is_connected:
            return Graph(n, edges)
    raise GenerationFailureError(
        f"could not generate a connected {delta}-regular graph on {n} nodes "
        f"in {max_attempts} attempts")


def make_ring_union(ring_sizes: Sequence[int]) -> Graph:
    """Disjoint union of cycles; 2-regular, possibly disconnected.

    Node ids are assigned ring by ring in input order.  Accepted only by
    the optimal-placement routines: the game model itself assumes a
    connected residential area.
    """
    if not ring_sizes:
        raise InvalidDimensionError("need at least one ring")
    for r in ring_sizes:
        if r < 3:
            raise InvalidDimensionError(f"ring size {r} < 3")
    edges = []
    base = 0
    for r in ring_sizes:
        for i in range(r):
            u = base + i
            v = base + (i + 1) % r
            if u < v:
                edges.append((u, v))
            else:
                edges.append((v, u))
        base += r
    return Graph(base, edges, allow_disconnected=True)


def save_edge_list(g: Graph) -> str:
    """Serialize to the edge-list text format: ``"n m"`` then ``m`` lines ``"u v"``."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def load_edge_list(text: str, *, allow_disconnected: bool = False) -> Graph:
    """Parse the edge-list text format.  Round-trips with :func:`save_edge_list`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EdgeListError("empty edge-list text")
    head = lines[0].split()
    if len(head) != 2:
        raise EdgeListError(f"bad header {lines[0]!r}; expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise EdgeListError(f"bad header {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise EdgeListError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise EdgeListError(f"bad edge line {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise EdgeListError(f"bad edge line {ln!r}") from exc
        if not (0 <= u < v < n):
            raise EdgeListError(f"edge line {ln!r} violates 0 <= u < v < n")
        edges.append((u, v))
    try:
        return Graph(n, edges, allow_disconnected=allow_disconnected)
    except GraphError as exc:
        raise EdgeListError(str(exc)) from exc
