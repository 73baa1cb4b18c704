#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py          # all criteria
    python3 scripts/run_acceptance.py 4 8      # a subset
"""
import sys

from lpplab.acceptance import run_all

if __name__ == "__main__":
    wanted = {int(a) for a in sys.argv[1:]} or None
    results = run_all(wanted)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    sys.exit(0 if passed == len(results) else 1)
