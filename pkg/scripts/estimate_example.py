#!/usr/bin/env python3
"""Closed-form report for the standard example scenario.

Runs the estimates engine on the 1e-9 g / 1e-3 cm / 0.1 cm ball and prints
the localization time, coherence scale, branch count, entropy, spreading
time, and the Gaussian energy budget.
"""

import sys
from pathlib import Path

from gravtwin.cli import main

if __name__ == "__main__":
    config = Path(__file__).resolve().parent.parent / "configs" / "example_scenario.cfg"
    sys.exit(main([
        "estimate",
        "--config", str(config),
        "--out", "runs/estimate_example",
        "--mc-check",
    ]))
