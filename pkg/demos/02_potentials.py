"""
Watching the potential functions fall
=====================================

Two quantities certify convergence: the number of bichromatic edges for
swap games on regular graphs (drops by at least 1 per swap), and the
edge-weight potential for jump games with tau <= 2/delta (drops by at
least 1 - 2c per jump).  This script monitors both along real runs.
"""

import random
from fractions import Fraction

from schelling import (EdgeWeightScheme, GameConfig, Mode, check_monotone,
                       jsg_edge_potential, make_toroidal_moore_grid,
                       random_initial_placement, run_ird, ssg_potential)

g = make_toroidal_moore_grid(20, 20)

# --- swap game -------------------------------------------------------------
cfg = GameConfig(Fraction(1, 4), Mode.SWAP)
rng = random.Random(2)
types, p0 = random_initial_placement(g, 3, Fraction(0), rng)
trace = run_ird(g, types, p0, cfg, seed=2)
report = check_monotone(g, types, trace, ssg_potential)
print(f"swap game: {trace.steps} moves, potential "
      f"{report.values[0]} -> {report.values[-1]}")
print(f"  strictly monotone: {report.monotone}, "
      f"smallest per-move drop: {report.min_decrement}")

# --- jump game -------------------------------------------------------------
cfg = GameConfig(Fraction(1, 4), Mode.JUMP)     # 1/4 = 2/8 on a Moore torus
scheme = EdgeWeightScheme(Fraction(1, 2) - Fraction(1, 32))
rng = random.Random(3)
types, p0 = random_initial_placement(g, 2, Fraction(3, 50), rng)
trace = run_ird(g, types, p0, cfg, seed=3)
report = check_monotone(
    g, types, trace, lambda gg, tt, pp: jsg_edge_potential(gg, tt, pp, scheme))
print(f"jump game: {trace.steps} moves, potential "
      f"{report.values[0]} -> {report.values[-1]}")
print(f"  strictly monotone: {report.monotone}, "
      f"smallest per-move drop: {report.min_decrement} (bound: "
      f"{1 - 2 * scheme.c})")
