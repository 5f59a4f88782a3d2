"""Exact optimal placements: brute force and the 2-regular subset-sum solver.

Agents of a type are interchangeable, so the brute force enumerates
node -> type patterns rather than agent permutations, shrinking the
space by the product of the type-count factorials.  The two-type
vacancy-free case is evaluated vectorized with numpy; everything else
falls back to a generic exact enumerator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .graph import Graph
from .model import (EMPTY, Aggregation, GameConfig, Mode, Placement,
                    TypeAssignment)

__all__ = [
    "TooLargeError",
    "OptimalResult",
    "brute_force_optimal",
    "subset_sum",
    "two_type_2regular_optimal",
]

#: Largest admissible pattern count for the brute-force search.
BRUTE_FORCE_CAP = 10_000_000


class TooLargeError(ValueError):
    """Brute-force search space exceeds the cap."""


@dataclass
class OptimalResult:
    """An exact optimum: the pattern, its cost, and how it was found."""

    cost: int
    pattern: tuple[int, ...]        # node -> type id, EMPTY for vacancies
    method: str                     # "BRUTE_FORCE" or "SUBSET_SUM_DP"
    certificate: dict | None = None

    def materialize(self, t: TypeAssignment) -> Placement:
        """Place the given agents onto the pattern, lowest ids first per type."""
        pools: list[list[int]] = [[] for _ in range(t.k)]
        for node, ty in enumerate(self.pattern):
            if ty != EMPTY:
                pools[ty].append(node)
        node_of = [0] * t.num_agents
        idx = [0] * t.k
        for a in range(t.num_agents):
            ty = t.type_of[a]
            node_of[a] = pools[ty][idx[ty]]
            idx[ty] += 1
        return Placement(len(self.pattern), node_of)


def _pattern_count(n: int, counts, vacancies: int) -> int:
    total = 1
    remaining = n
    for c in list(counts) + [vacancies]:
        total *= comb(remaining, c)
        remaining -= c
    return total


def _discontent_of_pattern(g: Graph, pattern, tau: Fraction,
                           aggregation: Aggregation, k: int) -> int:
    num, den = tau.numerator, tau.denominator
    cost = 0
    for v, ty in enumerate(pattern):
        if ty == EMPTY:
            continue
        counts = [0] * k
        occ = 0
        for w in g.adj[v]:
            tw = pattern[w]
            if tw != EMPTY:
                counts[tw] += 1
                occ += 1
        s = counts[ty]
        if aggregation is Aggregation.ONE_VS_ALL or k == 2:
            d = occ
        else:
            neg = max((c for ty2, c in enumerate(counts) if ty2 != ty), default=0)
            d = s + neg
        if s * den < d * num:   # covers isolated (d == 0 iff s == 0 < num)
            cost += 1
        elif d == 0:
            cost += 1           # isolated agent always pays tau > 0
    return cost


def _brute_force_two_type_full(g: Graph, counts, tau: Fraction,
                               symmetry: bool) -> tuple[int, tuple[int, ...]]:
    """Vectorized search over all vacancy-free two-type patterns."""
    n = g.n
    n0 = counts[0]
    adj = np.zeros((n, n), dtype=np.int32)
    for u, v in g.edges():
        adj[u, v] = 1
        adj[v, u] = 1
    deg = adj.sum(axis=0)
    num, den = tau.numerator, tau.denominator
    fix_first = symmetry and counts[0] == counts[1]
    if fix_first:
        combos = itertools.combinations(range(1, n), n0 - 1)
    else:
        combos = itertools.combinations(range(n), n0)

    picks = n0 - 1 if fix_first else n0
    best_cost = None
    best_key = None
    batch_size = 65536
    while True:
        batch = list(itertools.islice(combos, batch_size))
        if not batch:
            break
        flat = np.fromiter(itertools.chain.from_iterable(batch), dtype=np.int64,
                           count=len(batch) * picks)
        rows = np.zeros((len(batch), n), dtype=np.int32)
        rows[np.repeat(np.arange(len(batch)), picks), flat] = 1
        if fix_first:
            rows[:, 0] = 1
        same0 = rows @ adj                       # type-0 neighbors per node
        # discontent tests, one-vs-all == one-vs-one for two types
        s = np.where(rows == 1, same0, deg[None, :] - same0)
        disc = (s * den < deg[None, :] * num) | (deg[None, :] == 0)
        costs = disc.sum(axis=1)
        i = int(costs.argmin())
        lo = int(costs[i])
        if best_cost is None or lo < best_cost:
            # resolve ties inside the batch toward the smallest pattern
            idxs = np.flatnonzero(costs == lo)
            key = min(tuple(np.where(rows[j] == 1, 0, 1)) for j in idxs)
            best_cost, best_key = lo, key
        elif lo == best_cost:
            idxs = np.flatnonzero(costs == lo)
            key = min(tuple(np.where(rows[j] == 1, 0, 1)) for j in idxs)
            best_key = min(best_key, key)
    return best_cost, tuple(int(t) for t in best_key)


def brute_force_optimal(g: Graph, t: TypeAssignment, cfg: GameConfig,
                        symmetry: bool = False, cap: int = BRUTE_FORCE_CAP) -> OptimalResult:
    """Exact minimum placement cost over every node -> type pattern.

    In swap mode every pattern with the given type counts is examined;
    in jump mode patterns additionally carry vacancies.  With
    ``symmetry=True`` and two equal-sized types the label mirror is
    skipped (node 0 is pinned to type 0), halving the space.  Ties are
    broken toward the lexicographically smallest pattern within the
    searched space.
    """
    vacancies = g.n - t.num_agents
    if cfg.mode is Mode.SWAP and vacancies != 0:
        raise ValueError("swap mode requires as many agents as nodes")
    if cfg.mode is Mode.JUMP and vacancies == 0:
        raise ValueError("jump mode requires at least one vacancy")
    space = _pattern_count(g.n, t.counts, vacancies)
    if symmetry and t.k == 2 and t.counts[0] == t.counts[1]:
        space //= 2
    if space > cap:
        raise TooLargeError(f"{space} patterns exceed the cap of {cap}")

    if t.k == 2 and vacancies == 0:
        cost, pattern = _brute_force_two_type_full(g, t.counts, cfg.tau, symmetry)
        return OptimalResult(cost, pattern, "BRUTE_FORCE",
                             {"patterns": space, "symmetry": symmetry})

    labels = []
    for ty, c in enumerate(t.counts):
        labels += [ty] * c
    labels += [EMPTY] * vacancies
    best = None
    best_pattern = None
    seen_count = 0
    for perm in _multiset_permutations(labels):
        seen_count += 1
        cost = _discontent_of_pattern(g, perm, cfg.tau, cfg.aggregation, t.k)
        if best is None or cost < best or (cost == best and perm < best_pattern):
            best = cost
            best_pattern = tuple(perm)
    return OptimalResult(best, best_pattern, "BRUTE_FORCE", {"patterns": seen_count})


def _multiset_permutations(labels):
    """Distinct permutations of a label multiset, lexicographic order."""
    labels = sorted(labels)
    n = len(labels)
    while True:
        yield tuple(labels)
        i = n - 2
        while i >= 0 and labels[i] >= labels[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while labels[j] <= labels[i]:
            j -= 1
        labels[i], labels[j] = labels[j], labels[i]
        labels[i + 1:] = reversed(labels[i + 1:])


def subset_sum(values, target: int) -> tuple[bool, list[int] | None]:
    """Classic DP over sums ``0..target``; returns one witness index set.

    O(len(values) * target) time and space; deterministic witness
    (items considered in input order, first completion kept).
    """
    if target < 0:
        raise ValueError("target must be nonnegative")
    used = [-1] * (target + 1)   # index of the item completing this sum, -2 = base
    used[0] = -2
    for i, v in enumerate(values):
        if v <= 0:
            raise ValueError("values must be positive integers")
        for s in range(target, v - 1, -1):
            if used[s] == -1 and used[s - v] != -1 and used[s - v] != i:
                used[s] = i
    if used[target] == -1:
        return False, None
    picked = []
    s = target
    while s > 0:
        i = used[s]
        picked.append(i)
        s -= values[i]
    return True, sorted(picked)


def two_type_2regular_optimal(ring_sizes, n1: int, n2: int, tau) -> OptimalResult:
    """Optimal two-type placement on a disjoint union of rings, tau > 1/2.

    Subset-sum over the ring sizes with target ``min(n1, n2)``:

    * target hit: each ring monochromatic, cost 0;
    * target+1 or target-1 hit: exactly one ring mixed with a lone
      intruder, cost 3 (either a single minority agent inserted into a
      majority ring, or the minority filling a selected ring except one
      node);
    * otherwise: greedy consecutive fill splits exactly one ring into
      two arcs of length >= 2, cost 4.

    The target-1 branch covers instances like rings (3,3) with
    ``n1 = 4``, where a lone type-1 agent in a type-2 ring already
    achieves cost 3 even though ``n1 + 1`` is not a reachable sum.
    Node ids follow :func:`schelling.graph.make_ring_union` (ring by
    ring, in input order); the returned pattern is always consistent
    with the reported cost.
    """
    rings = list(ring_sizes)
    tau = Fraction(tau)
    if tau <= Fraction(1, 2) or tau >= 1:
        raise ValueError(f"the ring solver requires 1/2 < tau < 1, got {tau}")
    if any(r < 3 for r in rings):
        raise ValueError("ring sizes must be at least 3")
    if n1 < 1 or n2 < 1 or n1 + n2 != sum(rings):
        raise ValueError(f"need n1, n2 >= 1 with n1 + n2 = {sum(rings)}")

    # Solve for the smaller type; mirror the labels afterwards.
    target_type = 0 if n1 <= n2 else 1
    target = min(n1, n2)
    minority, majority = (0, 1) if target_type == 0 else (1, 0)

    starts = []
    acc = 0
    for r in rings:
        starts.append(acc)
        acc += r
    total = acc
    pattern = [majority] * total

    def fill_rings(indices):
        left = target
        for idx in indices:
            for off in range(rings[idx]):
                if left == 0:
                    return
                pattern[starts[idx] + off] = minority
                left -= 1

    feasible, picked = subset_sum(rings, target)
    if feasible:
        fill_rings(picked)
        return OptimalResult(0, tuple(pattern), "SUBSET_SUM_DP",
                             {"target_type": target_type, "target": target,
                              "rings": picked})

    feasible_up, picked_up = subset_sum(rings, target + 1)
    if feasible_up:
        # Minority fills the selected rings except their very last node,
        # which the majority takes: the intruder and its two ring
        # neighbors are the only discontent agents.
        fill_rings(picked_up)
        return OptimalResult(3, tuple(pattern), "SUBSET_SUM_DP",
                             {"target_type": target_type, "target": target + 1,
                              "rings": picked_up})

    if target >= 1:
        feasible_down, picked_down = subset_sum(rings, target - 1)
        if feasible_down:
            fill_rings(picked_down)
            lone_ring = next(i for i in range(len(rings)) if i not in picked_down)
            pattern[starts[lone_ring]] = minority
            return OptimalResult(3, tuple(pattern), "SUBSET_SUM_DP",
                                 {"target_type": target_type, "target": target - 1,
                                  "rings": picked_down, "lone_ring": lone_ring})

    # Greedy consecutive fill: both arcs of the split ring have length
    # >= 2, otherwise one of the +-1 targets would have been reachable.
    left = target
    for idx in range(len(rings)):
        if left == 0:
            break
        take = min(left, rings[idx])
        for off in range(take):
            pattern[starts[idx] + off] = minority
        left -= take
    return OptimalResult(4, tuple(pattern), "SUBSET_SUM_DP",
                         {"target_type": target_type, "greedy": True})
