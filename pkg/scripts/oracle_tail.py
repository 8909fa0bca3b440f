"""Monte-Carlo tail of the stochastic term along a signal sweep.

Prints the frequency of ``C_i(a,b) <= -(1 - delta) Delta^2`` with its
Wilson interval for each ``Delta^2_min`` and the fitted exponent.
"""

import argparse
import math

from vecsbm.theory import oracle_tail_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--p", type=float, help="defaults to 8 log(n)/n")
    parser.add_argument("--delta2", type=float, nargs="+", default=[4.0, 8.0, 16.0])
    parser.add_argument("--delta", type=float, nargs="+", default=[0.01, 0.25, 0.5])
    parser.add_argument("--trials", type=int, default=100_000)
    args = parser.parse_args()
    p = args.p if args.p is not None else 8 * math.log(args.n) / args.n
    for delta in args.delta:
        out = oracle_tail_sweep(args.n, p, p, args.delta2, delta=delta, trials=args.trials)
        print(f"delta={delta} fitted c={out[0].fitted_c:.4f}")
        for est in out:
            phat, lo, hi = est.p_min_pair
            print(f"  Delta2_min={est.delta2_min:6.2f}  P={phat:.5f}  [{lo:.5f}, {hi:.5f}]  xi/n={est.xi_hat:.5f}")


if __name__ == "__main__":
    main()
