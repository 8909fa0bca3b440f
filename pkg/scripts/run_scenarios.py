"""Run synthetic scenario files and print per-algorithm median NMI.

    python scripts/run_scenarios.py                       # scenarios 1, 2 and 3
    python scripts/run_scenarios.py configs/scenario1.scenario --threads 4
"""

import argparse
import json
from pathlib import Path

from vecsbm.io_bench import load_scenario, run_scenario, summarize, write_results

HERE = Path(__file__).parent
DEFAULT = ["scenario1.scenario", "scenario2.scenario"] + [f"scenario3_K{K}.scenario" for K in (2, 4, 6, 8, 10)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("scenarios", nargs="*", default=[str(HERE / "configs" / s) for s in DEFAULT])
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    for path in args.scenarios:
        scenario = load_scenario(path)
        rows = run_scenario(scenario, threads=args.threads)
        write_results(rows, args.out_dir, scenario.name)
        summary = summarize(rows)
        medians = {alg: round(s["nmi"]["median"], 4) for alg, s in summary.items()}
        print(scenario.name, json.dumps(medians))


if __name__ == "__main__":
    main()
