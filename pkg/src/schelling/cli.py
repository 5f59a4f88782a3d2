"""Command-line front end: simulate, experiment, verify, optimal, plot.

Exit codes: 0 success / all checks pass, 1 verification failure,
2 usage error, 3 resource cap exceeded.  Tau (and every other ratio
flag) is accepted only as an exact fraction ``num/den`` so the
exact-arithmetic contract holds end to end.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from fractions import Fraction

from . import counterexamples as cx
from .dynamics import (Move, MoveKind, RunTrace, Schedule, Verdict,
                       improving_swaps, is_stable, run_ird)
from .experiments import (ExperimentSpec, emit_plot, fit_moves_vs_edges,
                          random_initial_placement, read_rows_csv,
                          run_experiment, summarize_rows, write_rows_csv)
from .graph import (load_edge_list, make_random_regular, make_ring_union,
                    make_toroidal_moore_grid, save_edge_list)
from .model import (Aggregation, GameConfig, Mode, load_placement,
                    placement_cost, save_placement)
from .optimal import TooLargeError, brute_force_optimal, two_type_2regular_optimal
from .potential import (EdgeWeightScheme, check_monotone, default_weight_scheme,
                        jsg_edge_potential, ssg_potential)
from .model import TypeAssignment

TRACE_HEADER = ["step", "kind", "agent_a", "agent_b_or_target", "cost_before_a",
                "cost_after_a", "cost_before_b", "cost_after_b", "potential_value"]


def _usage(message: str) -> "SystemExit":
    print(f"error: {message}", file=sys.stderr)
    return SystemExit(2)


def parse_fraction(text: str) -> Fraction:
    parts = text.split("/")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected a fraction num/den, got {text!r}")
    try:
        return Fraction(int(parts[0]), int(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad fraction {text!r}: {exc}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {exc}")


def _sides(text: str) -> list[int]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("side range must be start:stop:step")
        start, stop, step = (int(p) for p in parts)
        return list(range(start, stop + 1, step))
    return _int_list(text)


def _mode(text: str) -> Mode:
    return Mode.SWAP if text == "swap" else Mode.JUMP


def _aggregation(text: str) -> Aggregation:
    return Aggregation.ONE_VS_ALL if text == "all" else Aggregation.ONE_VS_ONE


def write_trace_csv(path: str, trace: RunTrace, potential_values=None) -> None:
    """Trace dump: one row per move, exact costs as fractions."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for i, mv in enumerate(trace.moves):
            pot = "" if potential_values is None else str(potential_values[i + 1])
            w.writerow([i + 1, mv.kind.value, mv.agent_a,
                        mv.agent_b if mv.kind is MoveKind.SWAP else mv.target,
                        mv.cost_before_a, mv.cost_after_a,
                        mv.cost_before_b if mv.cost_before_b is not None else "",
                        mv.cost_after_b if mv.cost_after_b is not None else "",
                        pot])


def read_trace_csv(path: str, initial) -> RunTrace:
    moves = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            if rec["kind"] == MoveKind.SWAP.value:
                moves.append(Move.swap(int(rec["agent_a"]), int(rec["agent_b_or_target"])))
            else:
                moves.append(Move.jump(int(rec["agent_a"]), int(rec["agent_b_or_target"])))
    return RunTrace(initial=initial, moves=moves, verdict=Verdict.STEP_CAP_REACHED,
                    steps=len(moves), rounds=0, seed=None, final=initial)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schelling",
                                 description="Schelling segregation game simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one improving-response dynamic")
    sim.add_argument("--topology", choices=["moore", "random-regular"])
    sim.add_argument("--rows", type=int)
    sim.add_argument("--cols", type=int)
    sim.add_argument("--n", type=int)
    sim.add_argument("--delta", type=int, default=8)
    sim.add_argument("--graph", help="edge-list file")
    sim.add_argument("--initial", help="placement/type file for the initial state")
    sim.add_argument("--counterexample", choices=sorted(cx.BUILDERS))
    sim.add_argument("--x", type=int, help="construction size override")
    sim.add_argument("--tau", type=parse_fraction)
    sim.add_argument("--k", type=int, default=2)
    sim.add_argument("--mode", choices=["swap", "jump"], default="swap")
    sim.add_argument("--aggregation", choices=["all", "one"], default="all")
    sim.add_argument("--vacancy-frac", type=parse_fraction, default=Fraction(0))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--max-steps", type=int)
    sim.add_argument("--schedule", choices=["random", "canonical"], default="random")
    sim.add_argument("--with-potential", choices=["ssg", "jsg"],
                     help="append this potential to the trace CSV")
    sim.add_argument("--out-trace")
    sim.add_argument("--out-graph")
    sim.add_argument("--out-initial")

    exp = sub.add_parser("experiment", help="batch convergence experiment")
    exp.add_argument("--topologies", default="moore,random-regular")
    exp.add_argument("--sides", type=_sides, default=[10, 20, 30, 40, 50, 60])
    exp.add_argument("--tau", type=parse_fraction, required=True)
    exp.add_argument("--k", type=int, default=2)
    exp.add_argument("--mode", choices=["swap", "jump"], default="swap")
    exp.add_argument("--aggregation", choices=["all", "one"], default="all")
    exp.add_argument("--trials", type=int, default=100)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--vacancy-frac", type=parse_fraction, default=Fraction(0))
    exp.add_argument("--delta", type=int, default=8)
    exp.add_argument("--workers", type=int, default=os.cpu_count())
    exp.add_argument("--out", required=True, help="output CSV path")
    exp.add_argument("--plot", help="also write a plot to this path")

    ver = sub.add_parser("verify", help="check a construction or a trace property")
    ver.add_argument("--construction",
                     choices=sorted(cx.BUILDERS) + ["opt-not-stable"])
    ver.add_argument("--tau", type=parse_fraction)
    ver.add_argument("--x", type=int)
    ver.add_argument("--delta", type=int, default=8)
    ver.add_argument("--export-dir", help="dump graph/placement files here")
    ver.add_argument("--csv", help="write per-step machine-readable checks here")
    ver.add_argument("--potential", choices=["ssg", "jsg"])
    ver.add_argument("--graph")
    ver.add_argument("--initial")
    ver.add_argument("--trace")
    ver.add_argument("--c", type=parse_fraction, help="jump potential edge weight")

    opt = sub.add_parser("optimal", help="exact optimal placement")
    opt.add_argument("--rings", type=_int_list)
    opt.add_argument("--n1", type=int)
    opt.add_argument("--graph")
    opt.add_argument("--counts", type=_int_list)
    opt.add_argument("--tau", type=parse_fraction, required=True)
    opt.add_argument("--mode", choices=["swap", "jump"], default="swap")
    opt.add_argument("--aggregation", choices=["all", "one"], default="all")
    opt.add_argument("--symmetry", action="store_true")
    opt.add_argument("--cross-check", action="store_true",
                     help="run DP and brute force, compare")
    opt.add_argument("--out", help="write the optimal placement file here")

    plo = sub.add_parser("plot", help="plot an experiment CSV")
    plo.add_argument("--csv", required=True)
    plo.add_argument("--out", required=True)
    return ap


def _simulate_instance(args):
    if args.counterexample:
        if args.tau is None:
            raise _usage("--counterexample requires --tau")
        builder = cx.BUILDERS[args.counterexample]
        if args.counterexample == "jsg-regular":
            inst = builder(args.delta, args.tau)
        elif args.x is not None:
            inst = builder(args.tau, x=args.x)
        else:
            inst = builder(args.tau)
        return inst.graph, inst.types, inst.initial, inst.cfg
    if args.tau is None:
        raise _usage("simulate requires --tau")
    cfg = GameConfig(args.tau, _mode(args.mode), _aggregation(args.aggregation))
    if args.graph:
        g = load_edge_list(open(args.graph).read())
    elif args.topology == "moore":
        if args.rows is None or args.cols is None:
            raise _usage("moore topology requires --rows and --cols")
        g = make_toroidal_moore_grid(args.rows, args.cols)
    elif args.topology == "random-regular":
        if args.n is None:
            raise _usage("random-regular topology requires --n")
        g = make_random_regular(args.n, args.delta, args.seed)
    else:
        raise _usage("need --graph, --topology, or --counterexample")
    if args.initial:
        types, p0 = load_placement(open(args.initial).read(), g.n)
    else:
        import random as _random
        rng = _random.Random(args.seed)
        types, p0 = random_initial_placement(g, args.k, args.vacancy_frac, rng)
    return g, types, p0, cfg


def cmd_simulate(args) -> int:
    g, types, p0, cfg = _simulate_instance(args)
    schedule = (Schedule.CANONICAL_FIRST if args.schedule == "canonical"
                else Schedule.RANDOM_FIRST_IMPROVEMENT)
    trace = run_ird(g, types, p0, cfg, seed=args.seed, max_steps=args.max_steps,
                    schedule=schedule)
    final_cost = placement_cost(g, types, trace.final, cfg)
    print(f"verdict={trace.verdict.value} moves={trace.steps} rounds={trace.rounds} "
          f"final_cost={final_cost}")
    if trace.verdict is Verdict.CYCLE_DETECTED:
        print(f"state at step {trace.first_repeat_index} repeats step "
              f"{trace.repeated_from}")
    if args.out_trace:
        pot_values = None
        if args.with_potential:
            from .dynamics import apply_move
            fn = (ssg_potential if args.with_potential == "ssg"
                  else lambda gg, tt, pp: jsg_edge_potential(gg, tt, pp))
            p = trace.initial
            pot_values = [fn(g, types, p)]
            for mv in trace.moves:
                p = apply_move(p, mv)
                pot_values.append(fn(g, types, p))
        write_trace_csv(args.out_trace, trace, pot_values)
    if args.out_graph:
        with open(args.out_graph, "w") as fh:
            fh.write(save_edge_list(g))
    if args.out_initial:
        with open(args.out_initial, "w") as fh:
            fh.write(save_placement(types, trace.initial))
    return 0


def cmd_experiment(args) -> int:
    spec = ExperimentSpec(topologies=tuple(args.topologies.split(",")),
                          sides=tuple(args.sides), tau=args.tau, k=args.k,
                          mode=_mode(args.mode),
                          aggregation=_aggregation(args.aggregation),
                          trials=args.trials, base_seed=args.seed,
                          vacancy_frac=args.vacancy_frac, delta=args.delta)
    rows = run_experiment(spec, workers=args.workers)
    write_rows_csv(rows, args.out)
    for agg in summarize_rows(rows):
        print(f"{agg['topology']:15s} n={agg['n']:6d} m={agg['m']:7d} "
              f"mean_moves={agg['mean_moves']:9.2f} max_moves={agg['max_moves']:6d} "
              f"converged={agg['converged']}/{agg['trials']}")
    for topo in spec.topologies:
        try:
            fit = fit_moves_vs_edges(rows, topo)
        except ValueError:
            continue
        print(f"fit[{topo}]: moves ~ {fit.slope:.4f} * m + {fit.intercept:.2f} "
              f"(R^2 = {fit.r_squared:.4f})")
    if args.plot:
        emit_plot(rows, args.plot)
    return 0


def _verify_construction(args) -> int:
    if args.tau is None:
        raise _usage("verify --construction requires --tau")
    if args.construction == "opt-not-stable":
        inst = cx.build_opt_not_stable(args.tau) if args.tau else cx.build_opt_not_stable()
        cost_star = placement_cost(inst.graph, inst.types, inst.p_star, inst.cfg)
        cost_after = placement_cost(inst.graph, inst.types, inst.p_after, inst.cfg)
        swaps = improving_swaps(inst.graph, inst.types, inst.p_star, inst.cfg)
        pair_ok = tuple(sorted(inst.swap_agents)) in [
            tuple(sorted((m.agent_a, m.agent_b))) for m in swaps]
        stable = is_stable(inst.graph, inst.types, inst.p_star, inst.cfg)
        brute = brute_force_optimal(inst.graph, inst.types, inst.cfg, symmetry=True)
        ok = (cost_star == inst.optimal_cost and cost_after == inst.after_cost
              and pair_ok and not stable and brute.cost == inst.optimal_cost)
        print(f"opt-not-stable: cost(p*)={cost_star} cost(p)={cost_after} "
              f"brute_force_optimal={brute.cost} stable(p*)={stable} "
              f"improving_swap_present={pair_ok}")
        print("PASS" if ok else "FAIL")
        if args.export_dir:
            _export(args.export_dir, "opt-not-stable", inst.graph, inst.types,
                    inst.p_star)
        return 0 if ok else 1
    builder = cx.BUILDERS[args.construction]
    if args.construction == "jsg-regular":
        inst = builder(args.delta, args.tau)
    elif args.x is not None:
        inst = builder(args.tau, x=args.x)
    else:
        inst = builder(args.tau)
    report = cx.verify_scripted_cycle(inst)
    print(report.to_text())
    if args.csv:
        rows = report.to_csv_rows()
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    if args.export_dir:
        _export(args.export_dir, inst.name, inst.graph, inst.types, inst.initial)
    return 0 if report.ok else 1


def _export(directory: str, name: str, g, types, placement) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, f"{name}.edgelist"), "w") as fh:
        fh.write(save_edge_list(g))
    with open(os.path.join(directory, f"{name}.placement"), "w") as fh:
        fh.write(save_placement(types, placement))


def _verify_potential(args) -> int:
    if not (args.graph and args.initial and args.trace):
        raise _usage("verify --potential requires --graph, --initial and --trace")
    g = load_edge_list(open(args.graph).read())
    types, p0 = load_placement(open(args.initial).read(), g.n)
    trace = read_trace_csv(args.trace, p0)
    if args.potential == "ssg":
        fn = ssg_potential
    else:
        scheme = EdgeWeightScheme(args.c) if args.c is not None else default_weight_scheme(g)
        fn = lambda gg, tt, pp: jsg_edge_potential(gg, tt, pp, scheme)
    report = check_monotone(g, types, trace, fn)
    print(f"monotone={report.monotone} min_decrement={report.min_decrement} "
          f"violation_step={report.violation_step}")
    print("PASS" if report.monotone else "FAIL")
    return 0 if report.monotone else 1


def cmd_verify(args) -> int:
    if args.construction:
        return _verify_construction(args)
    if args.potential:
        return _verify_potential(args)
    raise _usage("verify needs --construction or --potential")


def cmd_optimal(args) -> int:
    cfg = GameConfig(args.tau, _mode(args.mode), _aggregation(args.aggregation))
    if args.rings:
        if args.n1 is None:
            raise _usage("--rings requires --n1")
        total = sum(args.rings)
        res = two_type_2regular_optimal(args.rings, args.n1, total - args.n1, args.tau)
        if args.cross_check:
            g = make_ring_union(args.rings)
            types = TypeAssignment.from_counts([args.n1, total - args.n1])
            brute = brute_force_optimal(g, types, cfg)
            agree = brute.cost == res.cost
            print(f"cross-check: dp={res.cost} brute={brute.cost} "
                  f"{'AGREE' if agree else 'DISAGREE'}")
            if not agree:
                return 1
        types = TypeAssignment.from_counts([args.n1, total - args.n1])
        print(f"{res.method} {res.cost}")
    elif args.graph:
        if not args.counts:
            raise _usage("--graph requires --counts")
        g = load_edge_list(open(args.graph).read(), allow_disconnected=True)
        types = TypeAssignment.from_counts(args.counts)
        res = brute_force_optimal(g, types, cfg, symmetry=args.symmetry)
        print(f"{res.method} {res.cost}")
    else:
        raise _usage("optimal needs --rings or --graph")
    if args.out:
        placement = res.materialize(types)
        with open(args.out, "w") as fh:
            fh.write(save_placement(types, placement))
    return 0


def cmd_plot(args) -> int:
    rows = read_rows_csv(args.csv)
    emit_plot(rows, args.out)
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "experiment":
            return cmd_experiment(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "optimal":
            return cmd_optimal(args)
        if args.command == "plot":
            return cmd_plot(args)
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        # malformed files, infeasible flag combinations, unwritable paths
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
