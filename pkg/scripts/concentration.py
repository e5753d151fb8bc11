"""Histogram of alpha_t(G(n, p)) over seeded trials, next to the predicted window."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from tstable import Params
from tstable.graph_lab import run_concentration_experiment, summarize


@dataclass(frozen=True)
class Config:
    t: int = 1
    p: float = 0.5
    ns: tuple[int, ...] = (30, 40, 60)
    trials: int = 100
    epsilon: float = 0.2
    seed: int = 20240
    budget_ms: float = 10000.0
    jobs: int = 1


def run(cfg: Config) -> None:
    params = Params(cfg.t, cfg.p)
    for n in cfg.ns:
        recs = run_concentration_experiment(params, n, cfg.trials, cfg.epsilon, cfg.seed,
                                            budget_ms=cfg.budget_ms, jobs=cfg.jobs)
        s = summarize(recs)
        w = recs[0].window
        hist = " ".join(f"{a}:{c}" for a, c in s.counts.items())
        print(f"n={n} formula={s.alpha_formula:.3f} window=[{w.lo},{w.hi}] "
              f"support={s.support} mode={s.mode} in_window={s.in_window_fraction:.2f} "
              f"timeouts={s.timeouts} | {hist}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, default=Config.t)
    ap.add_argument("--p", type=float, default=Config.p)
    ap.add_argument("--n", type=int, nargs="+", default=list(Config.ns))
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--eps", type=float, default=Config.epsilon)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--budget-ms", type=float, default=Config.budget_ms)
    ap.add_argument("--jobs", type=int, default=Config.jobs)
    a = ap.parse_args()
    run(Config(a.t, a.p, tuple(a.n), a.trials, a.eps, a.seed, a.budget_ms, a.jobs))


if __name__ == "__main__":
    main()
