"""Where balanced partitions fail to maximise h, for small n."""

from __future__ import annotations

import argparse
import math

from tstable import Params
from tstable.formulas import check_balanced_max


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=20)
    ap.add_argument("--t", type=int, nargs="+", default=[0, 1, 2, 3])
    a = ap.parse_args()
    print("t,b,n,r,argmax,h_max,h_balanced")
    for t in a.t:
        for p in (0.5, 1 - 1 / math.e):
            params = Params(t, p)
            for n in range(4, a.max_n + 1):
                for r in range(2, n // 2 + 1):
                    chk = check_balanced_max(params, n, r)
                    if not chk.balanced_is_max:
                        print(f"{t},{params.b:.6g},{n},{r},{' '.join(map(str, chk.argmax))},"
                              f"{chk.h_max!r},{chk.h_balanced!r}")


if __name__ == "__main__":
    main()
