"""
Running from the command line
=============================

The same runs are available through ``mourqd run``. This script drives the
CLI in-process: run a config, check the dump reproduces the final metrics,
and draw the archive.
"""

import tempfile
from pathlib import Path

from mourqd.cli import main

root = Path(__file__).resolve().parents[1]
out = Path(tempfile.mkdtemp()) / "arm"

main(["run", str(root / "configs" / "arm-2-mour-qd.toml"), "--seed", "1", "--out", str(out)])
main(["replay-metrics", str(out)])
main(["plot", str(out)])
print(sorted(p.name for p in out.iterdir()))
