"""
Exact optimal placements
========================

On a disjoint union of rings with two intolerant types, the cheapest
placement follows from subset sums over the ring sizes: cost 0 when one
type exactly fills some rings, cost 3 when it misses by one node in
either direction, cost 4 otherwise.  Brute force over all node -> type
patterns confirms every answer.  The same brute force also exhibits an
instance whose unique-cost optimum is not even stable.
"""

from fractions import Fraction

from schelling import (GameConfig, Mode, TypeAssignment, brute_force_optimal,
                       build_opt_not_stable, improving_swaps, is_stable,
                       make_ring_union, placement_cost,
                       two_type_2regular_optimal)

TAU = Fraction(3, 5)
cfg = GameConfig(TAU, Mode.SWAP)

for rings, n1 in [([3, 3, 4], 6), ([4, 5], 3), ([5, 5], 3), ([3, 3], 4)]:
    total = sum(rings)
    res = two_type_2regular_optimal(rings, n1, total - n1, TAU)
    g = make_ring_union(rings)
    types = TypeAssignment.from_counts([n1, total - n1])
    brute = brute_force_optimal(g, types, cfg)
    print(f"rings {rings!s:12s} split {n1}/{total - n1}: "
          f"dp cost {res.cost}, brute force {brute.cost}"
          f"{'' if res.cost == brute.cost else '  MISMATCH'}")

# --- an optimal placement that is not stable --------------------------------
inst = build_opt_not_stable()
cost_star = placement_cost(inst.graph, inst.types, inst.p_star, inst.cfg)
brute = brute_force_optimal(inst.graph, inst.types, inst.cfg, symmetry=True)
swaps = improving_swaps(inst.graph, inst.types, inst.p_star, inst.cfg)
print(f"\ntwo-clique instance (n={inst.graph.n}, tau={inst.cfg.tau}):")
print(f"  optimum by brute force: {brute.cost}; the shipped placement "
      f"costs {cost_star}")
print(f"  stable: {is_stable(inst.graph, inst.types, inst.p_star, inst.cfg)}; "
      f"improving swaps: {[(m.agent_a, m.agent_b) for m in swaps]}")
after = placement_cost(inst.graph, inst.types, inst.p_after, inst.cfg)
print(f"  after that swap the cost rises to {after}: local improvement, "
      f"global damage")
