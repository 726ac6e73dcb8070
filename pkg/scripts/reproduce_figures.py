"""Run every preset and write plot-ready tables.

    python scripts/reproduce_figures.py --out results/ [--workers 4] [--only fig2,fig4]

Each preset writes its CSV tables and summary JSON into ``<out>/<preset>/``
and prints a one-line summary per record.
"""

import argparse
import time
from pathlib import Path

from tdcoin.config import PRESETS
from tdcoin.experiments import preset_config, run_experiment
from tdcoin.output import to_json, write_output


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", help="comma-separated subset of " + ",".join(PRESETS))
    args = parser.parse_args()

    names = args.only.split(",") if args.only else PRESETS
    for name in names:
        start = time.perf_counter()
        records = run_experiment(preset_config(name, workers=args.workers))
        for record in records:
            write_output(record, args.out / name)
            print(f"{record.name:14s} {to_json(record.summary)[:160]}")
        print(f"-- {name}: {len(records)} record(s) in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
