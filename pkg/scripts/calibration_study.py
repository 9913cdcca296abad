#!/usr/bin/env python3
"""Rejection-rate study for the distributional and linearity tests.

Sweeps seeded trials under a true null and under canned alternatives and
prints one rate per (test, scenario) cell.  Rates under the null should
sit near alpha; rates under the alternatives are the power.
"""

import argparse

import numpy as np

from cdl_compass.stats import (
    Decision,
    cusum_linearity_test,
    gaussian_cdf,
    jarque_bera_test,
    ks_test,
)


def rejection_rate(make_report, trials: int, seed0: int) -> float:
    rejects = 0
    for seed in range(seed0, seed0 + trials):
        rng = np.random.default_rng(seed)
        rejects += make_report(rng).decision is Decision.REJECT_NULL
    return rejects / trials


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=500, help="seeded trials per cell")
    parser.add_argument("--n", type=int, default=500, help="sample size per trial")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0, help="first seed of the sweep")
    args = parser.parse_args()

    n, alpha = args.n, args.alpha
    cdf = gaussian_cdf(0.0, 1.0)

    def ks_null(rng):
        return ks_test(rng.standard_normal(n), cdf, alpha=alpha)

    def ks_shift(rng):
        return ks_test(rng.standard_normal(n) + 0.15, cdf, alpha=alpha)

    def jb_null(rng):
        return jarque_bera_test(rng.standard_normal(n), alpha=alpha)

    def jb_skewed(rng):
        return jarque_bera_test(rng.exponential(1.0, n), alpha=alpha)

    def cusum_null(rng):
        x = rng.uniform(0.0, 1.0, n)
        return cusum_linearity_test(x, 3.0 * x + rng.normal(0.0, 0.1, n), alpha=alpha)

    def cusum_quadratic(rng):
        x = rng.uniform(-1.0, 1.0, n)
        return cusum_linearity_test(x, x**2 + rng.normal(0.0, 0.05, n), alpha=alpha)

    cells = [
        ("ks", "null N(0,1)", ks_null),
        ("ks", "shifted mean", ks_shift),
        ("jarque_bera", "null N(0,1)", jb_null),
        ("jarque_bera", "exponential", jb_skewed),
        ("cusum", "linear truth", cusum_null),
        ("cusum", "quadratic", cusum_quadratic),
    ]
    print(f"trials={args.trials}  n={n}  alpha={alpha}")
    for test, scenario, make in cells:
        rate = rejection_rate(make, args.trials, args.seed)
        print(f"{test:12s} {scenario:14s} reject rate {rate:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
