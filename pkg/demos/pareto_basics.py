"""
Dominance, fronts and hypervolume
=================================

The vocabulary every archive in this package is built on.
"""

import numpy as np

from mourqd import pareto

# Objectives are maximised: (2, 3) beats (1, 3), but (2, 1) and (1, 2)
# are a trade-off and neither wins.
print(pareto.dominates((2, 3), (1, 3)), pareto.dominates((2, 1), (1, 2)))

# A cloud of random points and its non-dominated subset
rng = np.random.default_rng(0)
points = rng.random((200, 2))
front = pareto.extract_front(points)
print(f"{len(front)} of {len(points)} points are non-dominated")

# Hypervolume measures the area the front dominates above a reference point.
# The exact 2-D sweep matches a Monte-Carlo estimate to a few standard errors.
ref = np.zeros(2)
exact = pareto.hypervolume(front, ref)
estimate, se = pareto.mc_hypervolume_with_error(front, ref, 10**6, seed=1)
print(f"exact {exact:.5f}   monte-carlo {estimate:.5f} +- {se:.5f}")

# Three objectives use a slicing algorithm
front3 = pareto.extract_front(rng.random((100, 3)))
print("3-D hypervolume:", round(pareto.hypervolume(front3, np.zeros(3)), 5))
