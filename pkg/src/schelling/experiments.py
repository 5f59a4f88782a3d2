"""Batch convergence experiments: seeded runs over grids and random graphs.

Reproduces the paper-style convergence-speed experiment at desk scale:
square toroidal Moore grids and random 8-regular graphs of matching
sizes, many random initial placements each, counting moves and rounds
until convergence.  Trials are independent and may run in parallel;
rows are sorted by (topology, n, seed) before use, so concurrency is
unobservable in the output.
"""

from __future__ import annotations

import csv
import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import Schedule, Verdict, run_ird
from .graph import Graph, make_random_regular, make_toroidal_moore_grid
from .model import Aggregation, GameConfig, Mode, Placement, TypeAssignment

__all__ = [
    "TOPOLOGIES",
    "ExperimentSpec",
    "ExperimentRow",
    "FitResult",
    "random_initial_placement",
    "run_experiment",
    "fit_moves_vs_edges",
    "summarize_rows",
    "write_rows_csv",
    "read_rows_csv",
    "emit_plot",
]

TOPOLOGIES = ("moore", "random-regular")

CSV_HEADER = ["topology", "n", "m", "tau", "k", "mode", "aggregation",
              "seed", "moves", "rounds", "verdict"]


@dataclass(frozen=True)
class ExperimentSpec:
    """One convergence experiment: a size sweep with repeated seeded trials."""

    topologies: tuple[str, ...] = TOPOLOGIES
    sides: tuple[int, ...] = (10, 20, 30, 40, 50, 60)
    tau: Fraction = Fraction(1, 4)
    k: int = 2
    mode: Mode = Mode.SWAP
    aggregation: Aggregation = Aggregation.ONE_VS_ALL
    trials: int = 100
    base_seed: int = 0
    vacancy_frac: Fraction = Fraction(0)
    delta: int = 8
    max_steps_factor: int = 10

    def __post_init__(self):
        object.__setattr__(self, "tau", Fraction(self.tau))
        object.__setattr__(self, "vacancy_frac", Fraction(self.vacancy_frac))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for topo in self.topologies:
            if topo not in TOPOLOGIES:
                raise ValueError(f"unknown topology {topo!r}")
        if self.mode is Mode.JUMP:
            if not (0 < self.vacancy_frac < 1):
                raise ValueError("jump mode needs a vacancy fraction in (0, 1)")
        elif self.vacancy_frac != 0:
            raise ValueError("swap mode requires a zero vacancy fraction")

    def config(self) -> GameConfig:
        return GameConfig(self.tau, self.mode, self.aggregation)


@dataclass(frozen=True)
class ExperimentRow:
    topology: str
    n: int
    m: int
    tau: Fraction
    k: int
    mode: str
    aggregation: str
    seed: int
    moves: int
    rounds: int
    verdict: str


def derive_seed(base: int, *parts) -> int:
    """Stable 63-bit seed from a base seed and a label path."""
    key = ":".join([str(base)] + [str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big") >> 1


def build_topology(topology: str, side: int, delta: int, seed: int) -> Graph:
    if topology == "moore":
        return make_toroidal_moore_grid(side, side)
    if topology == "random-regular":
        return make_random_regular(side * side, delta, seed)
    raise ValueError(f"unknown topology {topology!r}")


def random_initial_placement(g: Graph, k: int, vacancy_frac: Fraction,
                             rng: random.Random) -> tuple[TypeAssignment, Placement]:
    """Uniform random placement with equal type proportions.

    The vacancy count is the fraction rounded to the nearest integer;
    leftover agents after equal division go to the lowest type ids.
    """
    vacancies = round(Fraction(vacancy_frac) * g.n)
    num_agents = g.n - vacancies
    if num_agents < k:
        raise ValueError("not enough agents for the requested number of types")
    types = TypeAssignment.balanced(num_agents, k)
    nodes = list(range(g.n))
    rng.shuffle(nodes)
    return types, Placement(g.n, nodes[:num_agents])


def _run_block(spec: ExperimentSpec, topology: str, side: int,
               trials: tuple[int, ...]) -> list[ExperimentRow]:
    g = build_topology(topology, side, spec.delta,
                       derive_seed(spec.base_seed, "graph", topology, side))
    cfg = spec.config()
    rows = []
    for trial in trials:
        seed = derive_seed(spec.base_seed, "trial", topology, side, trial)
        rng = random.Random(seed)
        types, p0 = random_initial_placement(g, spec.k, spec.vacancy_frac, rng)
        trace = run_ird(g, types, p0, cfg, seed=seed,
                        max_steps=spec.max_steps_factor * g.m,
                        schedule=Schedule.RANDOM_FIRST_IMPROVEMENT)
        rows.append(ExperimentRow(topology, g.n, g.m, spec.tau, spec.k,
                                  spec.mode.value, spec.aggregation.value, seed,
                                  trace.steps, trace.rounds, trace.verdict.value))
    return rows


def run_experiment(spec: ExperimentSpec, workers: int | None = None,
                   block: int = 25) -> list[ExperimentRow]:
    """Run every (topology, side, trial) cell; deterministic given the spec.

    ``workers > 1`` distributes trial blocks over processes; the output
    order is independent of scheduling.
    """
    jobs = []
    for topology in spec.topologies:
        for side in spec.sides:
            trials = list(range(spec.trials))
            for i in range(0, len(trials), block):
                jobs.append((topology, side, tuple(trials[i:i + block])))
    rows: list[ExperimentRow] = []
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, spec, topo, side, tr)
                       for topo, side, tr in jobs]
            for fut in futures:
                rows.extend(fut.result())
    else:
        for topo, side, tr in jobs:
            rows.extend(_run_block(spec, topo, side, tr))
    rows.sort(key=lambda r: (r.topology, r.n, r.seed))
    return rows


@dataclass
class FitResult:
    """Least-squares line fit of mean moves against edge count."""

    slope: float
    intercept: float
    r_squared: float
    points: list[tuple[int, float]]     # (m, mean moves) per size


def fit_moves_vs_edges(rows: list[ExperimentRow], topology: str) -> FitResult:
    by_m: dict[int, list[int]] = {}
    for r in rows:
        if r.topology == topology:
            by_m.setdefault(r.m, []).append(r.moves)
    if len(by_m) < 2:
        raise ValueError(f"need at least two sizes for a fit, got {len(by_m)}")
    ms = np.array(sorted(by_m), dtype=float)
    means = np.array([np.mean(by_m[int(m)]) for m in ms])
    slope, intercept = np.polyfit(ms, means, 1)
    pred = slope * ms + intercept
    ss_res = float(np.sum((means - pred) ** 2))
    ss_tot = float(np.sum((means - means.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2,
                     [(int(m), float(mu)) for m, mu in zip(ms, means)])


def summarize_rows(rows: list[ExperimentRow]) -> list[dict]:
    """Per (topology, n) aggregates: trials, mean/max moves, mean rounds, verdicts."""
    groups: dict[tuple[str, int], list[ExperimentRow]] = {}
    for r in rows:
        groups.setdefault((r.topology, r.n), []).append(r)
    out = []
    for (topo, n), grp in sorted(groups.items()):
        moves = [r.moves for r in grp]
        out.append({
            "topology": topo,
            "n": n,
            "m": grp[0].m,
            "trials": len(grp),
            "mean_moves": sum(moves) / len(moves),
            "max_moves": max(moves),
            "mean_rounds": sum(r.rounds for r in grp) / len(grp),
            "converged": sum(1 for r in grp if r.verdict == Verdict.CONVERGED.value),
        })
    return out


def write_rows_csv(rows: list[ExperimentRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.topology, r.n, r.m, str(r.tau), r.k, r.mode,
                        r.aggregation, r.seed, r.moves, r.rounds, r.verdict])


def read_rows_csv(path: str) -> list[ExperimentRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(ExperimentRow(
                rec["topology"], int(rec["n"]), int(rec["m"]),
                Fraction(rec["tau"]), int(rec["k"]), rec["mode"],
                rec["aggregation"], int(rec["seed"]), int(rec["moves"]),
                int(rec["rounds"]), rec["verdict"]))
    return rows


def emit_plot(rows: list[ExperimentRow], out_path: str) -> None:
    """Scatter of moves against edge count, one series and fit line per topology."""
    if not rows:
        raise ValueError("no experiment rows to plot")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    topologies = sorted({r.topology for r in rows})
    colors = {topo: f"C{i}" for i, topo in enumerate(topologies)}
    for topo in topologies:
        sub = [r for r in rows if r.topology == topo]
        ax.scatter([r.m for r in sub], [r.moves for r in sub], s=8, alpha=0.25,
                   color=colors[topo], label=f"{topo} (trials)")
        sizes = sorted({r.m for r in sub})
        if len(sizes) >= 2:
            fit = fit_moves_vs_edges(rows, topo)
            xs = np.array([min(sizes), max(sizes)], dtype=float)
            ax.plot(xs, fit.slope * xs + fit.intercept, color=colors[topo],
                    label=f"{topo} fit (R^2={fit.r_squared:.3f})")
            ax.plot([p[0] for p in fit.points], [p[1] for p in fit.points],
                    "o", color=colors[topo], markersize=5)
    ax.set_xlabel("m (edges)")
    ax.set_ylabel("moves until convergence")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
