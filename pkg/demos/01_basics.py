"""
A first Schelling swap game
===========================

Build an 8-regular toroidal grid, scatter two agent types uniformly at
random, and let improving response dynamics run until no pair of agents
wants to trade places.  Saves before/after pictures of the grid.
"""

import random
from fractions import Fraction

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from schelling import (GameConfig, Mode, Verdict, make_toroidal_moore_grid,
                       placement_cost, random_initial_placement, run_ird)

SIDE = 30
TAU = Fraction(1, 4)

g = make_toroidal_moore_grid(SIDE, SIDE)
cfg = GameConfig(TAU, Mode.SWAP)
rng = random.Random(1)
types, p0 = random_initial_placement(g, 2, Fraction(0), rng)

print(f"torus {SIDE}x{SIDE}: n={g.n}, m={g.m}, tau={TAU}")
print(f"initial discontent agents: {placement_cost(g, types, p0, cfg)}")

trace = run_ird(g, types, p0, cfg, seed=1)
assert trace.verdict is Verdict.CONVERGED
print(f"converged after {trace.steps} swaps in {trace.rounds} rounds")
print(f"final discontent agents: {placement_cost(g, types, trace.final, cfg)}")


def grid_of(placement):
    return [[types.type_of[placement.occupant_of[r * SIDE + c]]
             for c in range(SIDE)] for r in range(SIDE)]


fig, axes = plt.subplots(1, 2, figsize=(9, 4.5))
for ax, placement, title in ((axes[0], p0, "random start"),
                             (axes[1], trace.final, "swap-stable end")):
    ax.imshow(grid_of(placement), cmap="coolwarm", interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
fig.tight_layout()
fig.savefig("demo_basics.png", dpi=120)
print("wrote demo_basics.png")
