"""
Two normal forms reached from a cycle
=====================================

0 and 1 flip a fair coin between each other and their own exit.  The system
is locally confluent and almost surely terminating, yet not confluent.
"""

from fractions import Fraction

from parskit import absorption_solve, check_confluence, path_probability, pn_trace
from parskit.corpus import builtin

s = builtin("hindley_c").system
for r in s.rules:
    print(f"{r.source} -> {r.target}  {r.p}")

# ### Exact absorption
#
# One rational linear solve gives every reaching probability at once.

for state, report in absorption_solve(s).items():
    reach = ", ".join(f"{t}: {p}" for t, p in report.reach.items())
    print(f"from {state}: {reach}  (divergence {report.divergence})")

# ### The same numbers from the step-indexed distributions
#
# Settled mass climbs towards 2/3 and 1/3 while the alive mass halves each step.

for st in pn_trace(s, "0", 12):
    if st.n % 3 == 0:
        a, b = st.settled.get("a", Fraction(0)), st.settled.get("b", Fraction(0))
        print(f"n={st.n:2d}  a={float(a):.6f}  b={float(b):.6f}  alive={st.alive_mass}")

print("path 0->1->0->a has probability", path_probability(s, ["0", "1", "0", "a"]))
print("confluence witness:", check_confluence(s).witness)
