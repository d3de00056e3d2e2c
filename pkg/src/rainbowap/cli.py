"""Command-line front end.

Exit codes: 0 success, 1 usage or input error (including cache conflicts),
2 budget exhausted.

CSV headers per subcommand:

    gamma          ground,k,gamma,closed_form
    count          ground,r,k_or_pattern,method,count,elapsed_ms,nodes
    pattern        ground,r,k_or_pattern,method,count,elapsed_ms,nodes,solutions
    formula        r,k,s,t,f_exact,f_below_k
    ratio          n,r,k,g,ratio,ratio_float,lower,lower_float,target,error_term
    scan / sidon   subset,count,is_max,violation
    aw             ground,k,aw,witness
    cyclic         n,r,k,g_interval,g_cyclic,ratio_cyclic,target
    template-stat  order,r,k,rk,bound,satisfies
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import counting, extremal, progressions, templates
from .counting import Budget, BudgetExceeded
from .ground import GroundSet, cyclic, interval, parse_subset_literal, subset

log = logging.getLogger("rainbowap")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2

CSV_HEADERS = {
    "gamma": ["ground", "k", "gamma", "closed_form"],
    "count": ["ground", "r", "k_or_pattern", "method", "count", "elapsed_ms", "nodes"],
    "pattern": ["ground", "r", "k_or_pattern", "method", "count", "elapsed_ms", "nodes",
                "solutions"],
    "formula": ["r", "k", "s", "t", "f_exact", "f_below_k"],
    "ratio": ["n", "r", "k", "g", "ratio", "ratio_float", "lower", "lower_float", "target",
              "error_term"],
    "scan": ["subset", "count", "is_max", "violation"],
    "sidon": ["subset", "count", "is_max", "violation"],
    "aw": ["ground", "k", "aw", "witness"],
    "cyclic": ["n", "r", "k", "g_interval", "g_cyclic", "ratio_cyclic", "target"],
    "template-stat": ["order", "r", "k", "rk", "bound", "satisfies"],
}

METHOD_NAMES = {"auto": "pruned", "bruteforce": "bruteforce", "pruned": "pruned",
                "symmetry": "symmetry", "ie": "inclusion_exclusion"}


class UsageError(Exception):
    pass


class CacheConflict(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------- #
# Result cache
# --------------------------------------------------------------------------- #

def cache_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _comparable(report: dict) -> dict:
    return {k: v for k, v in report.items() if k not in ("elapsed_ms", "nodes")}


class ResultCache:
    """Append-only JSON-lines store.

    One record per line: ``key``, ``report``, ``role`` (the subcommand),
    ``created_at`` and, for scans, the per-subset ``rows``.
    """

    def __init__(self, path: Optional[str | Path]):
        self.path = Path(path) if path else None

    def records(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        if self.path is None or not self.path.exists():
            return out
        for lineno, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key, report = rec["key"], rec["report"]
                if not isinstance(report, dict):
                    raise TypeError("report is not an object")
            except (ValueError, KeyError, TypeError) as exc:
                log.warning("skipping corrupt cache line %d in %s: %s", lineno, self.path, exc)
                continue
            if key in out and _comparable(out[key]["report"]) != _comparable(report):
                raise CacheConflict(f"cache key {key[:12]} maps to conflicting reports "
                                    f"(line {lineno})")
            out.setdefault(key, rec)
        return out

    def lookup(self, key: str) -> Optional[dict]:
        return self.records().get(key)

    def append(self, key: str, report: dict, rows: Optional[list[dict]] = None,
               role: Optional[str] = None) -> None:
        if self.path is None:
            return
        existing = self.lookup(key)
        if existing is not None:
            if _comparable(existing["report"]) != _comparable(report):
                raise CacheConflict(f"cache key {key[:12]} already holds a different value")
            return
        rec = {"key": key, "report": report,
               "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat()}
        if role is not None:
            rec["role"] = role
        if rows is not None:
            rec["rows"] = rows
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


# --------------------------------------------------------------------------- #
# Argument handling
# --------------------------------------------------------------------------- #

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="ambient size n ([n] or Z_n)")
    p.add_argument("--r", type=int, help="number of colors")
    p.add_argument("--k", type=int, help="progression length")
    p.add_argument("--set", dest="set_literal", metavar="LIST",
                   help='subset of [n]: "1,2,5,9" or "@file" (one integer per line)')
    p.add_argument("--cyclic", action="store_true", help="color Z_n (wrap-around APs)")
    p.add_argument("--pattern", metavar="FILE",
                   help='pattern file ("rows cols" header then rows), or "sidon" / "ap:K"')
    p.add_argument("--method", choices=sorted(METHOD_NAMES), default="auto")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget-nodes", type=int, default=counting.DEFAULT_BUDGET.nodes)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--cache", metavar="PATH", default=os.environ.get("RAINBOWAP_CACHE"))
    p.add_argument("--verify", action="store_true",
                   help="recompute on cache hits and fail on any mismatch")
    p.add_argument("--stable", action="store_true",
                   help="omit timing fields for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rainbowap", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "gamma": "number of k-APs in the ground set",
        "count": "number of rainbow k-AP-free r-colorings",
        "formula": "exact-coloring formulas f(t,s) and f^{<k}(r,s)",
        "ratio": "g/(k-1)^n against its lower bound and limit",
        "scan": "compare proper subsets of [n] with [n]",
        "aw": "anti-van der Waerden number",
        "cyclic": "compare [n] with Z_n",
        "pattern": "rainbow-free colorings for a linear pattern",
        "sidon": "experiment for the pattern x1-x2+x3-x4=0",
        "template-stat": "rainbow-subtemplate count of a template or coloring",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text,
                           epilog=f"CSV columns: {','.join(CSV_HEADERS[name])}")
        _common(p)
        if name == "formula":
            p.add_argument("--s", type=int, help="size of the colored set")
            p.add_argument("--t", type=int, help="exact number of colors for f(t,s)")
        if name in ("scan", "sidon"):
            p.add_argument("--strategy", choices=extremal.STRATEGIES, default="deletions")
            p.add_argument("--samples", type=int, default=200)
            p.add_argument("--density", type=float, default=0.5)
            p.add_argument("--seed", type=int, default=0)
        if name == "template-stat":
            p.add_argument("--template", metavar="FILE", help='lines "x: c1 c2 ..."')
            p.add_argument("--coloring", metavar="LIT", help='"1:1,2:2,3:2,4:3"')
    return parser


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _ground(args) -> GroundSet:
    if args.set_literal and args.cyclic:
        raise UsageError("give exactly one ground set: --set or --cyclic, not both")
    if args.set_literal:
        elems = parse_subset_literal(args.set_literal)
        return subset(args.n if args.n is not None else max(elems), elems)
    _need(args, "n")
    return cyclic(args.n) if args.cyclic else interval(args.n)


def _pattern(args) -> progressions.LinearPattern:
    _need(args, "pattern")
    choice = args.pattern
    if choice == "sidon":
        return progressions.SIDON
    if choice.startswith("ap:"):
        return progressions.ap_pattern(int(choice[3:]))
    return progressions.load_pattern(choice)


def _budget(args) -> Budget:
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.budget_nodes < 1 or (args.budget_seconds is not None and args.budget_seconds <= 0):
        raise UsageError("budgets must be positive")
    return Budget(nodes=args.budget_nodes, seconds=args.budget_seconds)


# --------------------------------------------------------------------------- #
# Subcommands: each returns (cache payload or None, compute thunk)
# A thunk returns (summary report dict, csv rows).
# --------------------------------------------------------------------------- #

def _plan(args):
    cmd = args.command
    budget = _budget(args)
    kw = {"budget": budget, "workers": args.workers}

    if cmd == "gamma":
        _need(args, "k")
        S = _ground(args)

        def run():
            row = {"ground": S.descriptor(), "k": args.k, "gamma": progressions.gamma_k(S, args.k)}
            if S.kind.value == "interval" and S.n >= args.k:
                row["closed_form"] = progressions.gamma_closed_form(S.n, args.k)
            return row, [row]
        return None, run

    if cmd == "formula":
        _need(args, "s")

        def run():
            row: dict = {"s": args.s}
            if args.t is not None:
                row.update(t=args.t, f_exact=str(counting.f_exact(args.t, args.s)))
            if args.r is not None and args.k is not None:
                a = counting.f_below_k(args.r, args.k, args.s)
                b = counting.f_below_k_by_exact(args.r, args.k, args.s)
                if a != b:
                    raise AssertionError(f"formula forms disagree: {a} != {b}")
                row.update(r=args.r, k=args.k, f_below_k=str(a))
            if len(row) == 1:
                raise UsageError("formula needs --t, or --r and --k")
            return row, [row]
        return None, run

    if cmd == "template-stat":
        _need(args, "k")
        if bool(args.template) == bool(args.coloring):
            raise UsageError("give exactly one of --template or --coloring")

        def run():
            if args.template:
                P = templates.load_template(args.template, args.r)
            else:
                col = templates.parse_coloring_literal(args.coloring)
                n = args.n if args.n is not None else max(col)
                c = templates.make_coloring(subset(n, col), col, args.r)
                P = templates.coloring_to_template(c, n)
            st = templates.container_statistic(P, args.k)
            row = {"order": P.order, "r": P.r, "k": args.k, "rk": st.rk,
                   "bound": round(st.bound, 6), "satisfies": st.satisfies}
            return row, [row]
        return None, run

    if cmd in ("count", "pattern"):
        S = _ground(args)
        _need(args, "r")
        method = METHOD_NAMES[args.method]
        if cmd == "count":
            _need(args, "k")
            system = counting.ap_system(S, args.k)
            kp: object = args.k
        else:
            M = _pattern(args)
            system = counting.pattern_system(S, M)
            kp = M.label()
        payload = {"cmd": cmd, "ground": S.descriptor(), "r": args.r, "k_or_pattern": kp,
                   "method": method}

        def run():
            rep = counting.count_system(system, args.r, method, **kw)
            d = rep.to_dict()
            if cmd == "pattern":
                d["solutions"] = len(progressions.enumerate_pattern_solutions(M, S))
            return d, [d]
        return payload, run

    if cmd == "ratio":
        _need(args, "n", "r", "k")
        payload = {"cmd": cmd, "n": args.n, "r": args.r, "k": args.k}

        def run():
            row = counting.ratio_report(args.n, args.r, args.k, **kw).to_dict()
            return row, [row]
        return payload, run

    if cmd in ("scan", "sidon"):
        _need(args, "n", "r")
        extra = {"strategy": args.strategy, "samples": args.samples,
                 "density": args.density, "seed": args.seed}
        if cmd == "scan":
            _need(args, "k")
            payload = {"cmd": cmd, "n": args.n, "r": args.r, "k": args.k, **extra}

            def run():
                res = extremal.scan_subsets(args.n, args.r, args.k, **extra, **kw)
                return res.to_dict(), res.csv_rows()
        else:
            payload = {"cmd": cmd, "n": args.n, "r": args.r, **extra}

            def run():
                rep = extremal.sidon_experiment(args.n, args.r, **extra, **kw)
                return rep.to_dict(), rep.scan.csv_rows()
        return payload, run

    if cmd == "aw":
        _need(args, "k")
        S = _ground(args)
        payload = {"cmd": cmd, "ground": S.descriptor(), "k": args.k}

        def run():
            row = extremal.anti_vdw(S, args.k, **kw).to_dict()
            return row, [row]
        return payload, run

    if cmd == "cyclic":
        _need(args, "n", "r", "k")
        payload = {"cmd": cmd, "n": args.n, "r": args.r, "k": args.k}

        def run():
            row = extremal.cyclic_compare(args.n, args.r, args.k, **kw).to_dict()
            return row, [row]
        return payload, run

    raise UsageError(f"unknown command {cmd}")  # pragma: no cover


# --------------------------------------------------------------------------- #
# Output
# --------------------------------------------------------------------------- #

def _cell(v) -> str:
    if isinstance(v, dict) and "kind" in v:
        return interval(v["n"]).label() if v["kind"] == "interval" else (
            cyclic(v["n"]).label() if v["kind"] == "cyclic" else
            "{" + ",".join(map(str, v["elements"])) + "}")
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _strip(row: dict, stable: bool) -> dict:
    return {k: v for k, v in row.items() if not (stable and k == "elapsed_ms")}


def render(command: str, summary: dict, rows: list[dict], fmt: str, stable: bool) -> str:
    if fmt == "json":
        return json.dumps(_strip(summary, stable), sort_keys=True) + "\n"
    header = [h for h in CSV_HEADERS[command] if not (stable and h == "elapsed_ms")]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({h: _cell(row.get(h, "")) for h in header})
        return buf.getvalue()
    table = [header] + [[_cell(row.get(h, "")) for h in header] for row in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n"
                   for r in table)


# --------------------------------------------------------------------------- #
# Entry point
# --------------------------------------------------------------------------- #

def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        payload, thunk = _plan(args)
        cache = ResultCache(args.cache)
        key = cache_key(payload) if payload is not None else None
        hit = cache.lookup(key) if key is not None and cache.path is not None else None
        if hit is not None and not args.verify:
            summary = dict(hit["report"])
            if "nodes" in summary:
                summary["nodes"] = 0
            rows = hit.get("rows") or [summary]
            print(f"cache hit {key[:12]}", file=stderr)
        else:
            summary, rows = thunk()
            stored = _strip(summary, stable=True)
            if hit is not None:
                if _comparable(hit["report"]) != _comparable(stored):
                    raise CacheConflict(
                        f"cached report for key {key[:12]} disagrees with a fresh computation")
                print(f"cache verified {key[:12]}", file=stderr)
            elif key is not None:
                cache.append(key, stored, None if rows == [summary] else rows, role=args.command)
        stdout.write(render(args.command, summary, rows, args.format, args.stable))
        return EXIT_OK
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=stderr)
        return EXIT_BUDGET
    except (UsageError, CacheConflict, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
