"""Ordinal potential functions and trace monotonicity checking.

Two monitors:

* swap-game potential: half the summed one-vs-all negative neighborhood
  sizes, which equals the number of bichromatic edges.  On a regular
  graph it strictly drops by at least 1 per improving swap.
* jump-game edge-weight potential: weight 1 for an occupied bichromatic
  edge, ``c`` for an occupied-empty edge, 0 otherwise, with
  ``1/2 - 1/(2*delta) < c < 1/2``.  On a delta-regular graph with
  ``tau <= 2/delta`` it strictly drops by at least ``1 - 2c`` per
  improving jump.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dynamics import RunTrace, apply_move
from .graph import Graph
from .model import EMPTY, Placement, TypeAssignment

__all__ = [
    "EdgeWeightScheme",
    "default_weight_scheme",
    "ssg_potential",
    "jsg_edge_potential",
    "MonotoneReport",
    "check_monotone",
]


@dataclass(frozen=True)
class EdgeWeightScheme:
    """Occupied-empty edge weight ``c`` for the jump-game potential."""

    c: Fraction

    def validate_for(self, g: Graph) -> None:
        delta = max((g.degree(v) for v in range(g.n)), default=0)
        if delta == 0:
            raise ValueError("graph has no edges; no admissible c interval")
        lo = Fraction(1, 2) - Fraction(1, 2 * delta)
        if not (lo < self.c < Fraction(1, 2)):
            raise ValueError(
                f"c={self.c} outside the admissible interval ({lo}, 1/2) for delta={delta}")


def default_weight_scheme(g: Graph) -> EdgeWeightScheme:
    """Midpoint of the admissible interval: ``c = 1/2 - 1/(4*delta)``."""
    delta = max((g.degree(v) for v in range(g.n)), default=0)
    if delta == 0:
        raise ValueError("graph has no edges")
    return EdgeWeightScheme(Fraction(1, 2) - Fraction(1, 4 * delta))


def ssg_potential(g: Graph, t: TypeAssignment, p: Placement) -> int:
    """Number of bichromatic edges == half the summed negative neighborhoods.

    Defined for vacancy-free placements only (swap games).
    """
    occ = p.occupant_of
    if any(a == EMPTY for a in occ):
        raise ValueError("swap-game potential requires a vacancy-free placement")
    type_of = t.type_of
    total = 0
    for u, v in g.edges():
        if type_of[occ[u]] != type_of[occ[v]]:
            total += 1
    return total


def jsg_edge_potential(g: Graph, t: TypeAssignment, p: Placement,
                       scheme: EdgeWeightScheme | None = None) -> Fraction:
    """Edge-weight potential for jump games, exact rational.

    Typing is one-vs-all ("different types" compares type ids directly);
    the monitor may be evaluated on one-vs-one runs as a descriptive
    statistic, but only 1-k jump games carry its guarantee.
    """
    if scheme is None:
        scheme = default_weight_scheme(g)
    scheme.validate_for(g)
    occ = p.occupant_of
    type_of = t.type_of
    bichromatic = 0
    half_empty = 0
    for u, v in g.edges():
        a, b = occ[u], occ[v]
        if a == EMPTY:
            if b != EMPTY:
                half_empty += 1
        elif b == EMPTY:
            half_empty += 1
        elif type_of[a] != type_of[b]:
            bichromatic += 1
    return bichromatic + scheme.c * half_empty


@dataclass
class MonotoneReport:
    """Strict-decrease audit of a potential along a trace."""

    monotone: bool
    min_decrement: Fraction | None
    violation_step: int | None
    values: list[Fraction]


def check_monotone(g: Graph, t: TypeAssignment, trace: RunTrace, potential_fn) -> MonotoneReport:
    """Evaluate ``potential_fn(g, t, placement)`` after every move of a trace.

    Reports whether the potential strictly decreased at every step, the
    minimum per-move decrement, and the first violating step (1-based)
    if any.
    """
    p = trace.initial
    values = [potential_fn(g, t, p)]
    min_dec = None
    violation = None
    for i, mv in enumerate(trace.moves, start=1):
        p = apply_move(p, mv)
        val = potential_fn(g, t, p)
        dec = values[-1] - val
        if min_dec is None or dec < min_dec:
            min_dec = dec
        if dec <= 0 and violation is None:
            violation = i
        values.append(val)
    return MonotoneReport(monotone=violation is None, min_decrement=min_dec,
                          violation_step=violation, values=values)
