#!/usr/bin/env python3
"""Coupling sweep of the desk-scale localization run.

Runs short independent evolve jobs over a list of couplings and collects
final entropy and coherence-shrink factors into runs/kappa_sweep.
"""

import sys

from gravtwin.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "sweep",
        "--kappa-list", "5,10,25,50",
        "--lambda0", "10",
        "--grid", "256",
        "--extent", "96",
        "--dt", "0.01",
        "--time", "12",
        "--snap-every", "200",
        "--workers", "2",
        "--out", "runs/kappa_sweep",
    ]))
