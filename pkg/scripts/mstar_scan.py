"""Exact argmax of f(m) against the leading-order prediction, over k and p."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from tstable import Params
from tstable.moments import build_profile, mstar_prediction


@dataclass(frozen=True)
class Config:
    degrees: tuple[int, ...] = (1, 2)
    probs: tuple[float, ...] = (0.3, 0.5, 0.7)
    ks: tuple[int, ...] = (100, 200, 400, 800, 1600)


def run(cfg: Config) -> None:
    print("t,p,k,mode,m_star,prediction,residual")
    for t in cfg.degrees:
        for p in cfg.probs:
            params = Params(t, p)
            for k in cfg.ks:
                prof = build_profile(params, k)
                pred = mstar_prediction(params, k)
                res = abs(2 * prof.m_star - 2 * pred) / math.sqrt(k)
                print(f"{t},{p!r},{k},{prof.mode},{prof.m_star},{pred!r},{res!r}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, nargs="+", default=list(Config.degrees))
    ap.add_argument("--p", type=float, nargs="+", default=list(Config.probs))
    ap.add_argument("--k", type=int, nargs="+", default=list(Config.ks))
    a = ap.parse_args()
    run(Config(tuple(a.t), tuple(a.p), tuple(a.k)))


if __name__ == "__main__":
    main()
