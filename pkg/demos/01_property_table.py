"""
Property rows for the small example systems
===========================================

Six properties per system: local confluence, confluence, termination and
their almost-sure counterparts.  Finite systems are decided exactly; the two
infinite ladders are analysed on a depth-80 window.
"""

from parskit.corpus import TABLE_ONE, builtin, table_row
from parskit.window import PROPERTIES

SIGN = {"yes": "+", "no": "-", "unknown": "?"}

# ### The rows

print(f"{'':16s}" + "".join(f"{name:>15s}" for name in TABLE_ONE))
rows = {name: table_row(builtin(name), depth=80, n=60) for name in TABLE_ONE}
for p in PROPERTIES:
    print(f"{p:16s}" + "".join(f"{SIGN[rows[n][p].value]:>15s}" for n in TABLE_ONE))

# ### Where the infinite rows come from
#
# On a window the classical columns come from the entries' structural claims,
# checked against the window.  a.s. termination needs either a positive lower
# bound on divergence (refutes) or a Lyapunov certificate (proves).

from parskit.window import window_row

for name in ("ladder_d", "ladder_dprime"):
    entry = builtin(name)
    cell = window_row(entry.system, 80, 60, entry.certificate)["as_termination"]
    print(f"{name}: as_termination {SIGN[cell.verdict.value]}  ({cell.basis})")
