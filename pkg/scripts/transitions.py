"""Verdict changes of the rotated oscillator along the ray tau = -t."""

import argparse

import numpy as np

from fockflow import models
from fockflow.semigroup import classify, transition_times


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=models.ROTATION_ANGLE)
    ap.add_argument("--t-max", type=float, default=8.0)
    args = ap.parse_args()
    nf = models.rotated_oscillator(args.theta)
    times = transition_times(nf, np.pi, args.t_max)
    print(f"theta={args.theta:.6f}  transitions in (0, {args.t_max}]:")
    edges = [0.0] + times + [args.t_max]
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        print(f"  ({lo:8.4f}, {hi:8.4f}]  {classify(nf, -mid, with_delta0=False).verdict.name}")


if __name__ == "__main__":
    main()
