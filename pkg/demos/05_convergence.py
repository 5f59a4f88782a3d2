"""
How many moves until everyone settles?
======================================

A reduced version of the convergence-speed experiment: tori and random
8-regular graphs from 10x10 to 40x40 nodes, 30 random starts each.
Mean move counts grow linearly with the edge count, and the random
graphs settle faster than the tori of equal size.  Writes the raw rows
to CSV and a plot alongside.
"""

from fractions import Fraction

from schelling import (ExperimentSpec, Mode, emit_plot, fit_moves_vs_edges,
                       run_experiment, summarize_rows, write_rows_csv)

spec = ExperimentSpec(topologies=("moore", "random-regular"),
                      sides=(10, 20, 30, 40), tau=Fraction(1, 4), k=2,
                      mode=Mode.SWAP, trials=30, base_seed=0)
rows = run_experiment(spec, workers=2)

for agg in summarize_rows(rows):
    print(f"{agg['topology']:15s} n={agg['n']:5d} m={agg['m']:6d} "
          f"mean moves {agg['mean_moves']:7.1f}  max {agg['max_moves']:4d}  "
          f"converged {agg['converged']}/{agg['trials']}")

for topo in spec.topologies:
    fit = fit_moves_vs_edges(rows, topo)
    print(f"{topo}: moves ~ {fit.slope:.4f} * m + {fit.intercept:.1f}   "
          f"(R^2 = {fit.r_squared:.3f})")

write_rows_csv(rows, "demo_convergence.csv")
emit_plot(rows, "demo_convergence.svg")
print("wrote demo_convergence.csv and demo_convergence.svg")
