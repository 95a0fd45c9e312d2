"""
Sampling against the exact answer
=================================

Monte Carlo runs are an independent check on the rational solver.  Samples
are drawn in fixed chunks with spawned seeds, so a seed pins the result
regardless of the worker count.
"""

import math

import numpy as np

from parskit import absorption_solve, explore, monte_carlo
from parskit.corpus import builtin, ladder_d

s = builtin("hindley_c").system
exact = absorption_solve(s)["0"].reach["a"]

# ### Spread over seeds

estimates = np.array([monte_carlo(s, "0", 1000, 100_000, seed).fraction("a") for seed in range(30)])
sigma = math.sqrt(float(exact * (1 - exact)) / 100_000)
print(f"exact {exact} = {float(exact):.5f}")
print(f"mean of 30 runs {estimates.mean():.5f}, sd {estimates.std():.5f}, predicted {sigma:.5f}")

one = monte_carlo(s, "0", 1000, 100_000, seed=3, workers=1)
four = monte_carlo(s, "0", 1000, 100_000, seed=3, workers=4)
print("identical across worker counts:", one == four)

# ### Censoring on the ladder
#
# Runs that never drop off are cut at the step limit; their share estimates
# the divergence probability.

r = monte_carlo(explore(ladder_d(), 250), "0", 200, 100_000, seed=1)
print(f"censored {r.censored_fraction:.4f}")
