"""Regenerate the sample logs bundled with the package.

Runs each config in configs/ and freezes the resulting log under
src/plannerbench/data/sample_logs/. Timing values change between
regenerations; everything else is seeded.
"""

import argparse
from pathlib import Path

from plannerbench.benchlog import write_log
from plannerbench.runner import parse_config, run_benchmark

REPO = Path(__file__).resolve().parent.parent
CONFIGS = REPO / "configs"
OUT = REPO / "src" / "plannerbench" / "data" / "sample_logs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", help="regenerate just this config stem")
    args = parser.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    for config in sorted(CONFIGS.glob("*.cfg")):
        if args.only and config.stem != args.only:
            continue
        spec = parse_config(config.read_text(), base_dir=CONFIGS)
        print(f"{config.stem}: {len(spec.planner_specs)} planner(s) x {spec.run_count} run(s)")
        log = run_benchmark(spec)
        target = OUT / f"{config.stem}.log"
        target.write_text(write_log(log))
        print(f"  wrote {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
