"""
Improving response cycles, machine-checked
==========================================

For intolerant two-type swap games and for jump games almost anywhere,
improving response dynamics can loop forever.  The library ships the
cyclic gadgets as parametric builders; each comes with a script of four
moves, the exact costs every mover must have before and after, and
(where claimed) the promise that each scripted move is the *only*
improving move in its state.  `verify_scripted_cycle` recomputes all of
it from scratch.
"""

from fractions import Fraction

from schelling import (BUILDERS, Schedule, Verdict, run_ird,
                       verify_scripted_cycle)

for name, args in [("ssg-k2", (Fraction(3, 5),)),
                   ("ssg-1k", (Fraction(2, 5),)),
                   ("ssg-11", (Fraction(1, 2),)),
                   ("ssg-11-regular", (Fraction(1, 2),)),
                   ("jsg-regular", (8, Fraction(1, 2))),
                   ("jsg-arbitrary", (Fraction(1, 2),))]:
    inst = BUILDERS[name](*args)
    report = verify_scripted_cycle(inst)
    size = f"n={inst.graph.n:4d}"
    unique = "unique moves" if inst.uniqueness_claimed else "existence only"
    print(f"{name:15s} {size}  {unique:15s} "
          f"verified: {'yes' if report.ok else 'NO'}")

# With a unique improving move per state, no scheduler can escape: the
# canonical scheduler walks straight into the cycle detector.
inst = BUILDERS["jsg-arbitrary"](Fraction(1, 2))
trace = run_ird(inst.graph, inst.types, inst.initial, inst.cfg,
                schedule=Schedule.CANONICAL_FIRST)
assert trace.verdict is Verdict.CYCLE_DETECTED
print(f"\ncanonical dynamics on jsg-arbitrary: {trace.verdict.value} after "
      f"{trace.steps} jumps (state at step {trace.first_repeat_index} repeats "
      f"step {trace.repeated_from})")
