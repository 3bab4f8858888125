"""
Unstructured archive versus a grid on a bounded problem
=======================================================

On the bi-objective Rastrigin task the feature space is the unit square, so
a CVT grid is well specified. The unstructured archive should still be
competitive. Both are scored on the same grid.
"""

from mourqd.config import from_mapping
from mourqd.runner import run

for container in ("mour-qd", "mome"):
    cfg = from_mapping({"task": "rastrigin-2", "container": container, "iterations": 100},
                       profile="desk")
    result = run(cfg)
    first, last = result.metrics[0], result.metrics[-1]
    print(f"{container:8s} moqd {first.moqd_score:10.4g} -> {last.moqd_score:10.4g}   "
          f"coverage {last.coverage:.2f}   size {last.archive_size}")
