#!/usr/bin/env python3
"""Both cubic-law boundary sweeps with theory overlaid, as CSV and SVG.

    python3 scripts/reproduce_fig3.py [--n 20000] [--out-dir out/fig3]
"""
import argparse
import sys
from pathlib import Path

from lpplab.cli import main

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig3.toml"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--replicas", type=int, default=10)
    ap.add_argument("--out-dir", default="out/fig3")
    a = ap.parse_args()
    sys.exit(main(["sweep", "--config", str(CONFIG), "--n", str(a.n), "--replicas", str(a.replicas),
                   "--out-dir", a.out_dir, "--emit", "csv", "--emit", "svg"]))
