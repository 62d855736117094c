#!/usr/bin/env python3
"""Regenerate committed artifacts: golden traces and scenario JSON files.

Run from the repository root after any intentional behaviour change:

    python3 scripts/regen_goldens.py

Golden traces land in src/coexsim/golden/, scenario files in scenarios/.
Review the diff before committing — golden traces are the contract.
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from coexsim.builtins import BUILTIN_FACTORIES, GOLDEN_NAMES  # noqa: E402
from coexsim.runner import run_scenario  # noqa: E402
from coexsim.scenario import dump_scenario  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main() -> None:
    golden_dir = ROOT / "src" / "coexsim" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    for name in GOLDEN_NAMES:
        artifacts = run_scenario(BUILTIN_FACTORIES[name]())
        path = golden_dir / f"{name}.trace"
        path.write_text(artifacts.trace.text())
        print(f"wrote {path} ({len(artifacts.records)} records, "
              f"sha256 {artifacts.trace.sha256()[:12]})")

    scenario_dir = ROOT / "scenarios"
    scenario_dir.mkdir(exist_ok=True)
    for name, factory in BUILTIN_FACTORIES.items():
        path = scenario_dir / f"{name}.json"
        path.write_text(dump_scenario(factory()))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
