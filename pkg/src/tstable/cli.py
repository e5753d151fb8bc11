"""``tstable-lab``: tables and experiments from the command line.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 domain error,
4 oracle-scale refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from . import exact_counts, formulas, graph_lab, moments, poly_saddle
from .errors import DomainError, OracleScaleError, PrecisionLossError
from .moments import Params

log = logging.getLogger("tstable")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_ORACLE = 4

COMMANDS = ("counts", "saddle", "profile", "window", "chi", "experiment", "partition-check")

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}

EXPERIMENT_COLUMNS = [
    "seed", "n", "t", "p", "alpha_exact", "alpha_heuristic",
    "window_lo", "window_hi", "in_window", "chi_greedy", "elapsed_ms",
]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: Params | None
    ranges: dict[str, list[int]]
    seed: int | None
    output_path: str
    format: str


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, Any]]


def parse_range(text: str) -> list[int]:
    """``7``, ``10,20,40`` or inclusive ``lo:hi[:step]``; pieces may be mixed."""
    out: list[int] = []
    try:
        for piece in text.split(","):
            piece = piece.strip()
            if ":" in piece:
                parts = [int(x) for x in piece.split(":")]
                if len(parts) not in (2, 3):
                    raise ValueError(piece)
                lo, hi = parts[0], parts[1]
                step = parts[2] if len(parts) == 3 else 1
                if step <= 0:
                    raise ValueError(piece)
                out.extend(range(lo, hi + 1, step))
            else:
                out.append(int(piece))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


def _json_cell(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def render(table: Table, fmt: str, meta: dict[str, Any]) -> str:
    if fmt == "json":
        doc = {
            **meta,
            "columns": table.columns,
            "rows": [{c: _json_cell(row.get(c)) for c in table.columns} for row in table.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_cell(row.get(c)) for c in table.columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tstable-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _params(args: argparse.Namespace) -> Params:
    _need(args, "t", "p")
    return Params(args.t, args.p)


def cmd_counts(args: argparse.Namespace) -> Table:
    _need(args, "t", "k", "m")
    t = args.t
    rows = []
    for k in args.k:
        for m in args.m:
            c = exact_counts.exact_C(t, k, m)
            row: dict[str, Any] = {"t": t, "k": k, "m": m, "exact": str(c), "ln_exact": c.ln_value}
            if t >= 1 and 2 * m <= t * k:
                try:
                    lc = poly_saddle.contour_log_C(t, k, m, args.nodes)
                    row["ln_contour"] = lc
                    row["contour"] = math.exp(lc) if lc < 700 else None
                except PrecisionLossError as exc:
                    log.warning("contour skipped at k=%d m=%d: %s", k, m, exc)
            if t >= 1 and k >= 2 and 0 < 2 * m < t * k:
                sa = poly_saddle.approx_log_C(t, k, m)
                row["ln_saddle"] = sa.log_value
                row["saddle_in_window"] = sa.in_window
                row["saddle_ratio"] = math.exp(sa.log_value - c.ln_value)
            rows.append(row)
    cols = ["t", "k", "m", "exact", "ln_exact", "contour", "ln_contour",
            "ln_saddle", "saddle_in_window", "saddle_ratio"]
    return Table(cols, rows)


def cmd_saddle(args: argparse.Namespace) -> Table:
    _need(args, "t")
    t = args.t
    if args.y is not None:
        ys = args.y
    else:
        _need(args, "k", "m")
        ys = [2 * m / k for k in args.k for m in args.m]
    poly = poly_saddle.TruncExpPoly(t)
    rows = []
    for y in ys:
        sd = poly_saddle.solve_r0(poly, y)
        rows.append({"t": t, "y": y, "r0": sd.r0, "s": sd.s,
                     "r0_asymptotic": poly_saddle.r0_asymptotic(t, y)})
    return Table(["t", "y", "r0", "s", "r0_asymptotic"], rows)


def cmd_profile(args: argparse.Namespace) -> Table:
    params = _params(args)
    _need(args, "k")
    rows = []
    for k in args.k:
        prof = moments.build_profile(params, k, mode=args.mode)
        if args.detail:
            lam = list(prof.ratios) + [None]
            for m, (lf, r) in enumerate(zip(prof.log_f, lam)):
                rows.append({"k": k, "m": m, "log_f": float(lf),
                             "lambda": None if r is None else float(r)})
            continue
        pred = moments.mstar_prediction(params, k)
        prob = moments.log_prob_tstable_upper(params, k, prof)
        rows.append({
            "t": params.t, "p": params.p, "k": k, "mode": prof.mode,
            "m_star": prof.m_star, "m_star_pred": pred,
            "residual": abs(2 * prof.m_star - 2 * pred) / math.sqrt(k),
            "log_f_max": float(prof.log_f[prof.m_star]), "log_sum": prof.log_sum,
            "log_prob_upper": prob.log_bound, "log_prob_closed": prob.log_closed_form,
        })
    if args.detail:
        return Table(["k", "m", "log_f", "lambda"], rows)
    return Table(["t", "p", "k", "mode", "m_star", "m_star_pred", "residual",
                  "log_f_max", "log_sum", "log_prob_upper", "log_prob_closed"], rows)


def cmd_window(args: argparse.Namespace) -> Table:
    params = _params(args)
    _need(args, "n")
    rows = []
    for n in args.n:
        w = formulas.stability_window(params, n, args.eps)
        rows.append({"n": n, "alpha": w.alpha, "lo": w.lo, "hi": w.hi, "eps": args.eps,
                     "alpha_hat": formulas.alpha_hat(params, n, args.eps)})
    return Table(["n", "alpha", "lo", "hi", "eps", "alpha_hat"], rows)


def cmd_chi(args: argparse.Namespace) -> Table:
    params = _params(args)
    _need(args, "n")
    rows = []
    for n in args.n:
        lo, hi = formulas.chi_bounds(params, n)
        rows.append({"n": n, "alpha": formulas.alpha_formula(params, n), "lower": lo, "upper": hi})
    return Table(["n", "alpha", "lower", "upper"], rows)


def cmd_experiment(args: argparse.Namespace) -> Table:
    params = _params(args)
    _need(args, "n", "trials", "seed")
    rows = []
    for n in args.n:
        records = graph_lab.run_concentration_experiment(
            params, n, args.trials, args.eps, args.seed,
            budget_ms=args.budget_ms, jobs=args.jobs, colour=args.colour,
        )
        summary = graph_lab.summarize(records)
        log.info("n=%d support=%s mode=%d in-window=%.3f timeouts=%d",
                 n, summary.support, summary.mode, summary.in_window_fraction, summary.timeouts)
        for r in records:
            rows.append({
                "seed": r.seed, "n": r.n, "t": r.t, "p": r.p,
                "alpha_exact": r.alpha_exact, "alpha_heuristic": r.alpha_heuristic,
                "window_lo": r.window.lo, "window_hi": r.window.hi,
                "in_window": r.in_window, "chi_greedy": r.chi_greedy,
                "elapsed_ms": r.elapsed_ms if args.timing else None,
            })
    return Table(list(EXPERIMENT_COLUMNS), rows)


def cmd_partition_check(args: argparse.Namespace) -> Table:
    params = _params(args)
    _need(args, "n")
    rows = []
    for n in args.n:
        rs = args.r if args.r is not None else range(2, n // 2 + 1)
        for r in rs:
            chk = formulas.check_balanced_max(params, n, r)
            rows.append({
                "t": params.t, "b": params.b, "n": n, "r": r,
                "balanced_is_max": chk.balanced_is_max,
                "argmax": " ".join(map(str, chk.argmax)),
                "h_max": chk.h_max, "h_balanced": chk.h_balanced,
                "swap_failures": len(chk.swap_failures), "ok": chk.ok,
            })
    return Table(["t", "b", "n", "r", "balanced_is_max", "argmax", "h_max",
                  "h_balanced", "swap_failures", "ok"], rows)


HANDLERS: dict[str, Callable[[argparse.Namespace], Table]] = {
    "counts": cmd_counts,
    "saddle": cmd_saddle,
    "profile": cmd_profile,
    "window": cmd_window,
    "chi": cmd_chi,
    "experiment": cmd_experiment,
    "partition-check": cmd_partition_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tstable-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--t", type=int)
    common.add_argument("--p", type=float)
    common.add_argument("--n", type=parse_range)
    common.add_argument("--k", type=parse_range)
    common.add_argument("--m", type=parse_range)
    common.add_argument("--eps", type=float, default=0.2)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default="-", help="output file; '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("counts", parents=[common], help="exact, contour and saddle C_2m(t,k)") \
        .add_argument("--nodes", type=int, default=poly_saddle.DEFAULT_NODES)
    sp = sub.add_parser("saddle", parents=[common], help="saddle radius r0(y) and s(y)")
    sp.add_argument("--y", type=parse_floats)
    sp = sub.add_parser("profile", parents=[common], help="f(m) profile, m* and P(A t-stable)")
    sp.add_argument("--mode", choices=("exact", "saddle"))
    sp.add_argument("--detail", action="store_true", help="one row per m")
    sub.add_parser("window", parents=[common], help="two-point window for alpha_t")
    sub.add_parser("chi", parents=[common], help="reference bounds on chi_t")
    sp = sub.add_parser("experiment", parents=[common], help="Monte Carlo concentration trials")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--budget-ms", type=float, default=10000.0)
    sp.add_argument("--colour", action="store_true", help="also run the peeling colouring")
    sp.add_argument("--timing", action="store_true",
                    help="fill elapsed_ms (wall-clock, so output is no longer reproducible)")
    sp = sub.add_parser("partition-check", parents=[common], help="balanced partitions maximise h")
    sp.add_argument("--r", type=parse_range)
    return parser


def parse_config(args: argparse.Namespace) -> RunConfig:
    params = Params(args.t, args.p) if args.t is not None and args.p is not None else None
    ranges = {name: getattr(args, name) for name in ("n", "k", "m") if getattr(args, name)}
    return RunConfig(args.command, params, ranges, args.seed, args.out, args.format)


def _meta(config: RunConfig) -> dict[str, Any]:
    params = None
    if config.params is not None:
        params = {"t": config.params.t, "p": config.params.p, "b": config.params.b}
    return {"command": config.command, "params": params, "seed": config.seed}


def main(argv: Sequence[str] | None = None) -> int:
    raw = os.environ.get("TSTABLE_LOG", "warn").lower()
    level = LOG_LEVELS.get(raw, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("tstable").setLevel(level)
    if raw not in LOG_LEVELS:
        log.warning("TSTABLE_LOG=%r not one of %s; using warn", raw, "/".join(LOG_LEVELS))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        config = parse_config(args)
        table = HANDLERS[args.command](args)
        text = render(table, config.format, _meta(config))
        write_atomic(config.output_path, text)
    except UsageError as exc:
        print(f"tstable-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleScaleError as exc:
        print(f"tstable-lab: refused: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (DomainError, PrecisionLossError) as exc:
        print(f"tstable-lab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"tstable-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
