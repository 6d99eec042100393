"""Small-time decay constants of ||e^{-tM}|| next to the index-based upper bounds."""

import numpy as np

from fockflow import models
from fockflow.semigroup import norm_decay_fit, small_time_order


def main():
    print(f"{'model':>22} {'order':>5} {'fitted c':>12} {'expected':>12} {'upper':>12}")
    for a in (0.3, 0.5, 1.0):
        nf = models.fokker_planck_nf(a, 0.0)
        st = small_time_order(nf)
        print(f"{'fokker-planck a=' + str(a):>22} {st.order:5d} {norm_decay_fit(nf.m, st.order):12.6e} "
              f"{a * a / 12:12.6e} {st.upper_c:12.6e}")
    a, b = 1.0, 0.5
    nf = models.chain_nf(a, b)
    st = small_time_order(nf)
    print(f"{'chain a=1 b=0.5':>22} {st.order:5d} {norm_decay_fit(nf.m, st.order):12.6e} "
          f"{a * a * b * b / 720:12.6e} {st.upper_c:12.6e}")


if __name__ == "__main__":
    main()
