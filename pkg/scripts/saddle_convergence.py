"""Saddle approximation against exact counts along a doubling sequence of k."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from tstable.exact_counts import exact_C
from tstable.poly_saddle import approx_log_C


@dataclass(frozen=True)
class Config:
    degrees: tuple[int, ...] = (1, 2, 3)
    ks: tuple[int, ...] = (50, 100, 200, 400, 800, 1600)
    # position inside the window: 0 = lower edge, 1 = upper edge
    position: float = 0.5


def mid_window_m(t: int, k: int, position: float) -> int:
    lk, sk = math.log(k), math.sqrt(k)
    lo, hi = t - lk / sk, t - 1 / (sk * lk)
    return round(k * (lo + position * (hi - lo)) / 2)


def run(cfg: Config) -> None:
    print("t,k,m,in_window,ln_exact,ln_approx,abs_log_ratio")
    for t in cfg.degrees:
        for k in cfg.ks:
            m = mid_window_m(t, k, cfg.position)
            approx = approx_log_C(t, k, m)
            exact = exact_C(t, k, m).ln_value
            print(f"{t},{k},{m},{approx.in_window},{exact!r},{approx.log_value!r},"
                  f"{abs(approx.log_value - exact)!r}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, nargs="+", default=list(Config.degrees))
    ap.add_argument("--k", type=int, nargs="+", default=list(Config.ks))
    ap.add_argument("--position", type=float, default=Config.position)
    a = ap.parse_args()
    run(Config(tuple(a.t), tuple(a.k), a.position))


if __name__ == "__main__":
    main()
