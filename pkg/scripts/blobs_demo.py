#!/usr/bin/env python3
"""Synthetic-blobs experiment: consensus methods vs their base clusterings.

Generates well-separated Gaussian blobs, builds a k-means base-clustering
pool, repeatedly draws ensembles, and reports mean NMI for the weighted
consensus methods, plain evidence accumulation, and the base clusterings,
plus a theta sweep and an ensemble-size sweep.

    python scripts/blobs_demo.py --n 300 --runs 20 --out report.csv
"""

import argparse

import numpy as np

from lwec import ExperimentConfig, make_gaussian_blobs, run_experiment


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=300, help="number of objects")
    p.add_argument("--blobs", type=int, default=3, help="number of Gaussian blobs")
    p.add_argument("--spread", type=float, default=1.0, help="blob standard deviation")
    p.add_argument("--pool-size", type=int, default=100)
    p.add_argument("--m", type=int, default=10, help="ensemble size per draw")
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--theta", type=float, default=0.4)
    p.add_argument("--theta-grid", type=float, nargs="+", default=[0.2, 0.4, 0.6, 0.8, 1.0])
    p.add_argument("--m-grid", type=int, nargs="+", default=[5, 10, 20, 50])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="optional report CSV path")
    return p.parse_args()


def main():
    args = parse_args()
    radius = 9.0
    angles = np.linspace(0, 2 * np.pi, args.blobs, endpoint=False)
    centers = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    features, truth = make_gaussian_blobs(args.n, centers, spread=args.spread, seed=args.seed)

    config = ExperimentConfig(
        pool_size=args.pool_size,
        ensemble_size=args.m,
        theta=args.theta,
        runs=args.runs,
        seed=args.seed,
        theta_grid=tuple(args.theta_grid),
        m_grid=tuple(args.m_grid),
    )
    report = run_experiment(features, truth, config)

    base = report.base_mean_per_run
    print(f"{args.n} objects, {args.blobs} blobs, pool {args.pool_size}, "
          f"M={args.m}, {args.runs} runs, theta={args.theta}")
    print(f"{'method':<8}{'mean NMI':>10}{'std':>8}{'> base':>9}")
    for method, scores in report.method_nmi.items():
        wins = (scores > base).mean()
        print(f"{method:<8}{scores.mean():>10.4f}{scores.std():>8.4f}{wins:>8.0%}")
    print(f"{'base':<8}{base.mean():>10.4f}{base.std():>8.4f}")

    for parameter, fmt in (("theta", "%.1f"), ("M", "%d")):
        rows = [r for r in report.sweep_rows if r.parameter == parameter]
        if not rows:
            continue
        values = sorted({r.value for r in rows})
        print(f"\nmean NMI by {parameter}:")
        header = "".join(f"{fmt % v:>8}" for v in values)
        print(f"{'':<8}{header}")
        for method in ("lwea", "lwgp", "eac", "base"):
            cells = {r.value: r.mean for r in rows if r.method == method}
            if not cells:
                continue
            line = "".join(f"{cells[v]:>8.4f}" for v in values)
            print(f"{method:<8}{line}")

    if args.out:
        report.to_csv(args.out)
        print(f"\nreport written to {args.out}")


if __name__ == "__main__":
    main()
