#!/usr/bin/env python3
"""Run every bundled demo config through the CLI and summarize.

Usage: python scripts/run_demos.py [output_dir]
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from qeslab.cli import main as cli_main  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, "..", "configs")

RUNS = [
    ("classify", "hex_classify.json"),
    ("classify", "sol1_region1.json"),
    ("classify", "sol1_region2.json"),
    ("classify", "sol3_halfplane.json"),
    ("classify", "bounded_region.json"),
    ("verify", "sol2_verify.json"),
    ("spectrum", "hex_spectrum.json"),
    ("spectrum", "sol1_spectrum.json"),
    ("boundary-plot", "sol1_boundary_plot.json"),
]


def run(out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    failures = 0
    for command, name in RUNS:
        config = os.path.join(CONFIGS, name)
        stem = name.removesuffix(".json")
        if command == "boundary-plot":
            out = os.path.join(out_dir, stem)
        else:
            out = os.path.join(out_dir, stem + ".report.json")
        code = cli_main([command, "--config", config, "--out", out])
        summary = ""
        report_path = os.path.join(out, "report.json") if command == "boundary-plot" else out
        if os.path.exists(report_path):
            with open(report_path, "r", encoding="utf-8") as fh:
                report = json.load(fh)
            if command == "classify":
                summary = report.get("outcome", "")
            elif command == "verify":
                summary = "all checks pass" if report.get("pass") else "CHECK FAILED"
            elif command == "spectrum":
                pat = report.get("pattern", {})
                summary = f"dim {pat.get('dim')}: {pat.get('real')} real, {pat.get('pairs')} pairs"
            else:
                summary = f"{len(report.get('files', []))} files"
        status = "ok" if code == 0 else f"exit {code}"
        print(f"{command:14s} {name:28s} [{status}] {summary}")
        failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "demo_output"))
