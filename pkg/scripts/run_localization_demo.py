#!/usr/bin/env python3
"""Desk-scale localization demo.

Evolves the kappa = 25, lambda0 = 10 product state with the factored path,
dumps the entropy / coherence-length / width series and snapshots under
runs/desk_demo, and prints the summary.  Takes a few seconds.
"""

import sys
from pathlib import Path

from gravtwin.cli import main

if __name__ == "__main__":
    config = Path(__file__).resolve().parent.parent / "configs" / "desk_localization.cfg"
    sys.exit(main([
        "evolve",
        "--config", str(config),
        "--out", "runs/desk_demo",
    ]))
