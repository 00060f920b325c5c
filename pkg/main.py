#!/usr/bin/env python3
"""Multi-level sequence learners – entry point.

Usage:
    python main.py synth                          # Generate spammer-hammer data
    python main.py train                          # Train and evaluate MLSL
    python main.py --seed 3 --out runs/s3 train   # Override seed and output dir
    python main.py eval --model runs/default/model.json
    python main.py baseline --which kos           # majority|kos|em|avg|em_grades|proportional
    python main.py unfold edges.csv i0 --depth 2  # Print an unfolding
    python main.py check-config                   # Validate config only
"""

import os
import sys

# Ensure src package is importable when run from project root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli.commands import cli  # noqa: E402

if __name__ == "__main__":
    cli(obj={})
