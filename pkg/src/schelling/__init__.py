"""Game-theoretic Schelling segregation: simulation, potentials, verification.

Swap and jump Schelling games on arbitrary graphs with one-vs-all or
one-vs-one utilities, exact rational arithmetic throughout, improving
response dynamics with cycle detection, the two ordinal potential
monitors, machine-checked improving-response-cycle constructions, and
exact optimal-placement solvers.
"""

from .graph import (Graph, GraphError, InvalidDimensionError, ParityError,
                    GenerationFailureError, EdgeListError,
                    make_toroidal_moore_grid, make_random_regular,
                    make_ring_union, load_edge_list, save_edge_list)
from .model import (EMPTY, Mode, Aggregation, GameConfig, TypeAssignment,
                    Placement, PlacementError, positive_neighbors,
                    negative_neighbors, pnr, agent_cost, is_content,
                    placement_cost, social_cost, validate_placement,
                    save_placement, load_placement)
from .dynamics import (Move, MoveKind, Verdict, Schedule, RunTrace,
                       InvalidMoveError, ScriptViolationError,
                       improving_swaps, improving_jumps, improving_moves,
                       apply_move, is_stable, detect_cycle_state, run_ird,
                       replay_trace)
from .potential import (EdgeWeightScheme, default_weight_scheme, ssg_potential,
                        jsg_edge_potential, MonotoneReport, check_monotone)
from .counterexamples import (ConstructionError, ScriptedInstance, ScriptedStep,
                              ExpectedCost, OptNotStableInstance, BUILDERS,
                              build_ssg_k2_irc, build_1k_ssg_irc,
                              build_11_ssg_irc, build_11_ssg_regular_irc,
                              build_jsg_regular_irc, build_jsg_arbitrary_irc,
                              build_opt_not_stable, verify_scripted_cycle,
                              CycleVerification)
from .optimal import (TooLargeError, OptimalResult, brute_force_optimal,
                      subset_sum, two_type_2regular_optimal)
from .experiments import (ExperimentSpec, ExperimentRow, run_experiment,
                          fit_moves_vs_edges, summarize_rows, write_rows_csv,
                          read_rows_csv, emit_plot, random_initial_placement)

__version__ = "0.1.0"
