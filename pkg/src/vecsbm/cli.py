"""Command line entry point: ``vecsbm gen | run | sweep | metrics``.

Exit status is 0 on success, 1 on input/configuration errors and 2 on
numerical failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import NumericError, VecSbmError
from .io_bench import load_scenario, run_scenario, write_results
from .metrics import csv_rows, evaluate
from .model import Partition, VecSbmConfig, read_flat_config, sample_vecsbm
from .refine import RefineOptions
from .theory import RATE_COLUMNS, rate_configs, rate_curve


def write_labels(path, partition):
    with open(path, "w") as fh:
        for i, k in enumerate(partition.assignments.tolist()):
            fh.write(f"{i} {k}\n")


def read_labels(path):
    """Labels as ``node community`` lines or one community per line."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if len(parts) == 1:
                    pairs.append((len(pairs), int(parts[0])))
                else:
                    pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise VecSbmError(f"{path}:{lineno}: malformed label line") from None
    pairs.sort()
    z = np.array([k for _, k in pairs], dtype=np.int64)
    return z


def cmd_gen(args):
    cfg = VecSbmConfig.from_file(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    graph, truth, _ = sample_vecsbm(cfg)
    graph.write_edgelist(args.out)
    write_labels(args.labels_out or f"{args.out}.labels", truth)
    print(f"wrote {graph.num_edges} edges on {graph.n} nodes to {args.out}")


def cmd_run(args):
    scenario = load_scenario(args.scenario)
    if args.seeds is not None:
        scenario = replace(scenario, seeds=tuple(range(args.seeds)))
    rows = run_scenario(scenario, threads=args.threads, record_time=not args.no_timing)
    csv_path, json_path = write_results(rows, args.out_dir, scenario.name)
    print(f"wrote {csv_path} and {json_path}")


def cmd_sweep(args):
    kv = read_flat_config(args.rate_curve)
    n = int(kv["n"])
    scale = np.log(n) / n if kv.get("pq_scale", "none") in ("logn/n", "log(n)/n") else 1.0
    p = float(kv["p"]) * scale
    q = float(kv.get("q", kv["p"])) * scale
    values = [float(x) for x in kv["delta2"].split(",")]
    configs = rate_configs(n, p, q, values, d=int(kv.get("d", 1)), seed=int(kv.get("seed", 0)))
    opts = RefineOptions(T=int(kv.get("T", 10)), convergence=True)
    rows, fit = rate_curve(configs, opts, seeds=int(kv.get("seeds", 20)), tail_trials=int(kv.get("tail_trials", 0)))
    text = csv_rows(rows, RATE_COLUMNS)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if fit is not None:
        print(f"# log r_hat ~ {fit[0]:.4f} * delta2_min + {fit[1]:.4f}  (R^2 = {fit[2]:.3f})", file=sys.stderr)


def cmd_metrics(args):
    pred, truth = read_labels(args.pred), read_labels(args.truth)
    K = int(max(pred.max(initial=0), truth.max(initial=0)) + 1)
    report = evaluate(Partition(pred, K), Partition(truth, K))
    print(report.to_json())


def build_parser():
    parser = argparse.ArgumentParser(prog="vecsbm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a graph from a config file")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--labels-out")
    g.add_argument("--seed", type=int)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("--scenario", required=True)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--seeds", type=int)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--no-timing", action="store_true", help="leave wall_ms blank for reproducible output")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="misclustering-rate curve against signal strength")
    s.add_argument("--rate-curve", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("metrics", help="compare a predicted labelling with the truth")
    m.add_argument("--pred", required=True)
    m.add_argument("--truth", required=True)
    m.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except (VecSbmError, OSError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
