"""
When the feature bounds are unknown
===================================

The planar arm's end effector can reach a disc of radius 8, but suppose we
did not know that. A grid built on too small a box squeezes everything into
its border cells, and one built on too large a box wastes cells. The
unstructured archive needs no bounds at all.
"""

import numpy as np

from mourqd.config import from_mapping
from mourqd.runner import run

for container in ("mour-qd", "mome", "mome-small", "mome-large"):
    scores = []
    for seed in range(2):
        cfg = from_mapping({"task": "arm-2", "container": container, "seed": seed,
                            "iterations": 100}, profile="desk")
        scores.append(run(cfg).metrics[-1])
    cov = np.median([m.coverage for m in scores])
    moqd = np.median([m.moqd_score for m in scores])
    print(f"{container:11s} coverage {cov:.2f}   moqd {moqd:9.4g}")
