"""
Herman's token ring on three processes
======================================

Every token holder keeps or passes its token with probability 1/2; two tokens
meeting annihilate.  The token count keeps its parity, so odd rings can
never reach the empty configuration.
"""

from parskit import (
    absorption_solve,
    check_as_convergence,
    check_conditions,
    check_lyapunov,
    conclude,
    min_margin,
)
from parskit.ars import Decision, Verdict
from parskit.corpus import HERMAN_G, builtin, herman_pruned, herman_quotient, herman_ring
from parskit.transform import CPRIME, TransformMapping

ring = herman_ring(3)
for state in ring.states:
    succ = ", ".join(f"{t}:{p}" for t, p in ring.successors(state))
    print(f"{state} -> {succ or '(normal form)'}")

# ### Making [100] terminal
#
# Pruning the edges out of [100] leaves one normal form per parity.

pruned = herman_pruned()
solved = absorption_solve(pruned)
for state in ("[111]", "[110]"):
    print(state, dict(solved[state].reach))

# ### Ranking function and quotient

cert = builtin("herman3_pruned").certificate
report = check_lyapunov(pruned, cert)
for state, m in sorted(report.margins.items()):
    print(f"V{state} = {cert.value(state)}  margin {m}")
print("smallest margin", min_margin(report))

cond = check_conditions(TransformMapping(pruned, herman_quotient(), HERMAN_G, CPRIME))
evidence = Decision("as_termination", Verdict.YES if report.holds else Verdict.NO)
print("conditions:", {k: c.verdict.value for k, c in cond.conditions.items()})
print("conclusion:", conclude(cond, evidence).value)
print("direct check:", check_as_convergence(pruned).verdict.value)

# ### Bigger rings

for n in (5, 7, 9):
    print(n, "processes:", len(herman_ring(n).rules), "rules")
