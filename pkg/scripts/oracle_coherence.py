"""Compare classifier verdicts with truncated Fock-space norms on random normal forms.

Unbounded cases whose truncated norms have not yet left the bound by the top
degree are listed with delta0: they sit next to the boundedness threshold,
where the truncated norm grows only by about e^{|delta0|} per degree.
"""

import argparse

import numpy as np

from fockflow import models, polyoracle as po
from fockflow.semigroup import Verdict, classify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--forms", type=int, default=50)
    ap.add_argument("--taus", type=int, default=10)
    ap.add_argument("--degree", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    counts = {v: 0 for v in Verdict}
    bounded_bad, slow = 0, []
    for _ in range(args.forms):
        nf = models.random_normal_form(rng, int(rng.integers(1, 3)))
        table = po.gram(nf.weight, args.degree)
        for _ in range(args.taus):
            tau = complex(rng.uniform(-2, 1), rng.uniform(-2, 2))
            rep = classify(nf, tau)
            counts[rep.verdict] += 1
            norms = [po.truncated_norm(nf, tau, d, table) for d in range(4, args.degree + 1)]
            if rep.verdict.bounded and max(norms) > rep.norm_bound + 1e-6:
                bounded_bad += 1
            if rep.verdict is Verdict.UNBOUNDED and max(norms) < 1.01 * rep.norm_bound:
                slow.append((rep.delta0, norms[-1] / rep.norm_bound, norms[-1] / norms[-2]))
    print("verdicts:", {v.name: c for v, c in counts.items()})
    print("bounded cases exceeding the bound:", bounded_bad)
    print(f"unbounded cases still below 1.01x bound at degree {args.degree}: {len(slow)}")
    print(f"{'delta0':>10} {'norm/bound':>11} {'last growth':>12} {'e^|delta0|':>11}")
    for d0, ratio, growth in sorted(slow):
        print(f"{d0:10.4f} {ratio:11.4f} {growth:12.4f} {np.exp(abs(d0)):11.4f}")


if __name__ == "__main__":
    main()
