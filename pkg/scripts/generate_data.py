#!/usr/bin/env python3
"""Regenerate the bundled benchmark scenarios under src/fgs/data/benchmarks.

The suite is a deterministic function of the seed baked into the package, so
rerunning this script must leave the tree unchanged; tests verify that.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fgs.scenario import build_benchmark_suite, save_scenario  # noqa: E402


def main() -> int:
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "src" / "fgs" / "data" / "benchmarks"
    out_dir.mkdir(parents=True, exist_ok=True)
    scenarios = build_benchmark_suite()
    for sc in scenarios:
        save_scenario(sc, out_dir / f"{sc.scenario_id}.json")
    print(f"wrote {len(scenarios)} scenarios to {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
