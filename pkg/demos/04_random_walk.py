"""
A biased walk above a sink
==========================

Up with 1/3, down with 2/3, and 0 drops to a.  The walk is not terminating
but ends in a almost surely; a linear ranking function proves it.
"""

from parskit import (
    absorption_solve,
    check_conditions,
    check_lyapunov,
    conclude,
    divergence_bracket,
    explore,
    min_margin,
)
from parskit.ars import Decision, Verdict
from parskit.corpus import builtin, random_walk, random_walk_generated, random_walk_mapping

entry = builtin("random_walk")

# ### Ranking function V(n) = n + 2, V(a) = 1

window = explore(random_walk_generated(), 2000)
report = check_lyapunov(window, entry.certificate)
print(report.verdict, "over", report.states_checked, "states; smallest margin", min_margin(report))

# ### Absorption on finite pieces
#
# Reflecting at N gives a finite chain that is absorbed surely.  Leaving level N
# open instead bounds the infinite walk from below.

for N in (5, 20, 100):
    q = absorption_solve(random_walk(N))["0"].reach["a"]
    lost = divergence_bracket(random_walk_generated(), "0", N, N).hi
    print(f"N={N:3d}  reflecting: {q}   open: P(0 ->* a) >= 1 - {float(lost):.3e}")

# ### Collapsing every number onto one element
#
# Mapping each number to a single reducible element gives a two-element
# confluent target, and the transformation conditions transfer convergence back.

cond = check_conditions(random_walk_mapping(10))
print({k: c.verdict.value for k, c in cond.conditions.items()})
evidence = Decision("as_termination", Verdict.YES if report.holds else Verdict.NO)
print(conclude(cond, evidence).value)
