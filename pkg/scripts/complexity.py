"""Time one refinement step while the number of edges doubles at fixed n."""

import argparse
import time

import numpy as np

from vecsbm.model import VecSbmConfig, sample_vecsbm
from vecsbm.refine import RefineOptions, refine_step


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--K", type=int, default=4)
    parser.add_argument("--d", type=int, default=3)
    parser.add_argument("--degrees", type=float, nargs="+", default=[20, 40, 80])
    parser.add_argument("--reps", type=int, default=7)
    args = parser.parse_args()
    K = args.K
    # mean degree is n p (1 + (K - 1) / 2) / K with q = p / 2
    scale = (1 + (K - 1) / 2) / K
    graphs = [
        sample_vecsbm(VecSbmConfig(n=args.n, K=K, d=args.d, p=deg / (args.n * scale), q=deg / (2 * args.n * scale), seed=1))
        for deg in args.degrees
    ]
    for mode in ("isotropic", "full"):
        opts = RefineOptions(mode=mode)
        times = [[] for _ in graphs]
        for _ in range(args.reps):
            for i, (g, z, _) in enumerate(graphs):
                g.__dict__.pop("_payload_cache", None)
                t0 = time.perf_counter()
                refine_step(g, z, opts)
                times[i].append(time.perf_counter() - t0)
        prev = None
        for (g, _, _), t in zip(graphs, times):
            med = float(np.median(t))
            ratio = "" if prev is None else f"  x{med / prev:.2f}"
            print(f"{mode:9s} nnz={g.nnz:8d}  {med * 1e3:8.1f} ms{ratio}")
            prev = med


if __name__ == "__main__":
    main()
