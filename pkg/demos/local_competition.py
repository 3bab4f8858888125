"""
Local Pareto competition in an unstructured archive
===================================================

A new solution only competes with archived solutions closer than ``l`` in
feature space. Inside that radius the usual Pareto rules apply; outside it
everything is kept.
"""

import numpy as np

from mourqd import Solution, UnstructuredArchive

l = 0.1
archive = UnstructuredArchive(l, capacity=100, feature_dim=2, fitness_dim=2)

incumbent = Solution(0, [0.0], fitness=[5, 5], feature=[0.5, 0.5])
print(archive.try_add(incumbent).status.value)

# Same neighbourhood, dominated: rejected
print(archive.try_add(Solution(1, [0.0], [1, 1], [0.5, 0.55])).status.value)

# Same neighbourhood, a different trade-off: both are kept
print(archive.try_add(Solution(2, [0.0], [6, 4], [0.5, 0.55])).status.value, len(archive))

# Same neighbourhood, dominating both: the incumbent and the (6, 4) trade-off go
out = archive.try_add(Solution(3, [0.0], [6, 6], [0.52, 0.5]))
print(out.status.value, "removed", out.removed_ids)

# Far away, nothing to compete with
print(archive.try_add(Solution(4, [0.0], [0, 0], [0.9, 0.9])).status.value)

# The local front around a point looks at a 2l ball and filters it
print(archive.local_front([0.5, 0.5], 2 * l))

# Fill to capacity with random solutions; once full, a new solution
# replaces the most crowded stored one only if it is itself less crowded.
rng = np.random.default_rng(3)
small = UnstructuredArchive(0.01, capacity=50, feature_dim=2, fitness_dim=2)
outcomes = small.add_batch(Solution(i, [0.0], rng.random(2), rng.random(2)) for i in range(500))
print({s: sum(o.status.value == s for o in outcomes) for s in {o.status.value for o in outcomes}})
