"""
Divergence on an infinite ladder
================================

Rung i drops to the normal form a with probability 4^-i and climbs on
otherwise.  The chance of climbing forever is the infinite product of
1 - 4^-i, roughly 0.6885.
"""

from fractions import Fraction

import numpy as np

from parskit import divergence_bracket, explore, pn_iterate, single_path_divergence_bounds
from parskit.corpus import ladder_d, ladder_dprime

g = ladder_d()

# ### Exact alive mass on a window
#
# Explored to depth 60 the window holds rungs 0..60; the mass still climbing
# after n steps is exactly the partial product.

window = explore(g, 60)
for n in (1, 2, 5, 10, 50):
    print(n, float(pn_iterate(window, "0", n).alive_mass))

# ### Certified brackets

factors = [1 - Fraction(1, 4 ** i) for i in range(1, 51)]
b = single_path_divergence_bounds(factors, 50, Fraction(1, 3 * 4 ** 50))
print("product bracket:", float(b.lo), float(b.hi), "width", float(b.width))

b = divergence_bracket(g, "0", depth=80, n=60)
print("window bracket: ", float(b.lo), float(b.hi))

# a float cross-check, nothing more
print("numpy product:  ", np.prod(1 - 0.25 ** np.arange(1, 200)))

# ### Halving every probability changes the picture
#
# With 1/2 everywhere the climber falls off almost surely.

b = divergence_bracket(ladder_dprime(), "0", depth=80, n=60)
print("all-1/2 ladder divergence in", [float(b.lo), float(b.hi)])
