"""
Learning the features of a deceptive maze
=========================================

The maze task hands the optimiser an 8x8 occupancy image of the robot's
final position. A PCA encoder turns it into a 4-D feature, and it is
refitted at iterations 2, 4, 8, 16, ... with the archive rebuilt each time.
Container-size control adjusts ``l`` every iteration to hold the archive
near 95% of its capacity.
"""

import numpy as np

from mourqd.config import from_mapping
from mourqd.runner import run

cfg = from_mapping({"task": "maze-2", "container": "mour-qd", "seed": 0}, profile="desk")
result = run(cfg)

print("target size", cfg.target_size)
for it in (0, 25, 50, 100, 150, 200):
    print(f"iter {it:3d}  size {result.size_history[it]:4d}  l {result.l_history[it]:.4f}")

# Metrics always use the true (x, y) positions, projected on a fixed grid
last = result.metrics[-1]
print(f"coverage {last.coverage:.2f}  moqd {last.moqd_score:.4g}")

enc = result.encoder
print("encoder", enc.kind, "latent dim", enc.latent_dim,
      "orthonormal", np.allclose(enc.components.T @ enc.components, np.eye(enc.latent_dim)))

# A grid fixed from the first batch's learned features, for comparison
aurora = run(cfg.replace(container="mo-aurora-grid")).metrics[-1]
print(f"fixed learned grid coverage {aurora.coverage:.2f}")
