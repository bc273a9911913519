"""Command-line interface.

Exit status: 0 success, 2 parse error, 3 ill-formed input, 4 incorrect
net, 5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from . import __version__
from .calculus import equivalent, format_proof, parse_proof, translate
from .cutelim import normalize
from .errors import IllFormedError, ParseError, ResourceLimit, UnetsError
from .families import FAMILIES, family, girard_chain
from .girard import girard_normalize, girard_of
from .nets import Linking, check_correct
from .sequentialize import sequentialize_cuts
from .syntax import count_symbol
from .unify import TermStore

EXIT_OK, EXIT_PARSE, EXIT_ILL_FORMED, EXIT_INCORRECT, EXIT_CAP = 0, 2, 3, 4, 5


class Reporter:
    """Prints either ``key: value`` text or ``key=value`` machine lines."""

    def __init__(self, fmt: str, out: TextIO):
        self.fmt = fmt
        self.out = out

    def fields(self, items: Sequence[tuple]) -> None:
        if self.fmt == "machine":
            for k, v in items:
                print("%s=%s" % (k, _machine(v)), file=self.out)
        else:
            for k, v in items:
                print("%s: %s" % (k, v), file=self.out)

    def block(self, key: str, text: str) -> None:
        if self.fmt == "machine":
            for line in text.splitlines():
                print("%s=%s" % (key, line), file=self.out)
        else:
            print(text, file=self.out)

    def table(self, header: List[str], rows: List[List[object]]) -> None:
        if self.fmt == "machine":
            for row in rows:
                print(" ".join("%s=%s" % (h, _machine(v)) for h, v in zip(header, row)), file=self.out)
            return
        cells = [header] + [[str(v) for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=self.out)


def _machine(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.6f" % v
    return str(v).replace("\n", " ")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _net(path: str) -> Linking:
    return Linking.parse(_read(path))


def _require_correct(l: Linking, args) -> None:
    v = check_correct(l, max_switchings=args.max_switchings)
    if not v.correct:
        raise _Incorrect(str(v))


class _Incorrect(UnetsError):
    pass


# --------------------------------------------------------------------------
# Subcommands


def cmd_check(args, rep: Reporter) -> int:
    l = _net(args.net)
    store = TermStore()
    start = time.perf_counter()
    v = check_correct(l, witness=True, store=store, max_switchings=args.max_switchings)
    elapsed = time.perf_counter() - start
    items = [("verdict", v.status)]
    if not v.correct:
        items.append(("reason", v.detail))
        if v.witness is not None and v.graph is not None:
            items.append(("witness", v.witness.describe(v.graph)))
    if v.graph is not None:
        items += [("leaps", len(v.graph.leaps())), ("vertices", len(v.graph.vertices)),
                  ("edges", len(v.graph.edges))]
    items += [("store_nodes", store.allocated), ("time_ms", round(elapsed * 1000, 3))]
    rep.fields(items)
    if args.dot and v.graph is not None:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(v.graph.to_dot())
    return EXIT_OK if v.correct else EXIT_INCORRECT


def cmd_translate(args, rep: Reporter) -> int:
    p = parse_proof(_read(args.proof))
    rep.block("net", translate(p).to_text())
    return EXIT_OK


def cmd_normalize(args, rep: Reporter) -> int:
    l = _net(args.net)
    _require_correct(l, args)
    trace = None
    if args.trace:
        step = [0]

        def trace(net: Linking) -> None:
            rep.block("trace", "-- step %d\n%s" % (step[0], net.to_text()))
            step[0] += 1

    res = normalize(l, trace=trace)
    rep.block("net", res.net.to_text())
    rep.fields([("steps", res.steps)])
    return EXIT_OK


def cmd_sequentialize(args, rep: Reporter) -> int:
    l = _net(args.net)
    _require_correct(l, args)
    p = sequentialize_cuts(l, cap=args.max_nodes)
    rep.block("proof", format_proof(p, indent=None if args.compact else 2))
    return EXIT_OK


def cmd_girard(args, rep: Reporter) -> int:
    l = _net(args.net)
    _require_correct(l, args)
    g = girard_of(l, cap=args.max_nodes)
    rep.block("girard", g.describe())
    rep.fields([("size", g.size())])
    return EXIT_OK


def cmd_equiv(args, rep: Reporter) -> int:
    p = parse_proof(_read(args.left))
    q = parse_proof(_read(args.right))
    rep.fields([("equivalent", equivalent(p, q))])
    return EXIT_OK


def cmd_gen(args, rep: Reporter) -> int:
    rep.block("net", family(args.family, args.n).to_text())
    return EXIT_OK


def _timed(fn: Callable[[], object], repeat: int) -> tuple:
    fn()  # warm-up, discarded
    best = None
    result = None
    for _ in range(max(1, repeat)):
        start = time.perf_counter()
        result = fn()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return result, best


def bench_row(name: str, n: int, cap: int, repeat: int = 1) -> List[object]:
    """``n, size, check_ms, store_nodes, normalize_steps, girard_peak, peak_count``.

    ``girard_peak`` is the largest Girard net met: the normalization peak for
    cut-chain, the unfolding otherwise.  ``peak_count`` counts ``x1`` in the
    largest term of the Girard normal form (cut-chain), ``c`` in one
    axiom atom (par-blowup) or ``c`` in the whole axiom link
    (quantifier-blowup).
    """
    l = family(name, n)
    stores: List[TermStore] = []

    def check():
        store = TermStore()
        stores.append(store)
        return check_correct(l, witness=False, store=store)

    v, t_check = _timed(check, repeat)
    steps = normalize(l).steps if l.host.cuts else 0
    try:
        if name == "cut-chain":
            res = girard_normalize(girard_chain(n), cap=cap)
            peak, count = res.peak_size, res.occurrences("x1")
        else:
            g = girard_of(l, cap=cap)
            a, b = g.axiom_atoms()[0]
            peak = g.size()
            # The axiom link holds both atoms; par-blowup reports one of them.
            atoms = a.args if name == "par-blowup" else a.args + b.args
            count = sum(count_symbol(t, "c") for t in atoms)
    except ResourceLimit:
        peak, count = "cap", "cap"
    return [n, l.host.size(), round(t_check * 1000, 3), stores[-1].allocated, steps, peak, count,
            v.status]


BENCH_HEADER = ["n", "size", "check_ms", "store_nodes", "normalize_steps", "girard_peak",
                "peak_count", "verdict"]


def cmd_bench(args, rep: Reporter) -> int:
    rows = [bench_row(args.family, n, args.max_nodes, args.repeat) for n in args.n]
    rep.table(BENCH_HEADER, rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unets", description="Unification nets for first-order MLL.")
    ap.add_argument("--version", action="version", version="%(prog)s " + __version__)
    ap.add_argument("--format", choices=("text", "machine"), default="text")
    ap.add_argument("--max-nodes", type=int, default=10 ** 6, help="term/net size cap (default 10^6)")
    ap.add_argument("--max-switchings", type=int, default=10 ** 4,
                    help="switchings enumerated when searching for a counterexample (default 10^4)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide correctness of a net")
    p.add_argument("net", help="net file ('-' for stdin)")
    p.add_argument("--dot", help="write the net graph in DOT format to this file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="translate a proof to its net")
    p.add_argument("proof")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("normalize", help="eliminate the cuts of a net")
    p.add_argument("net")
    p.add_argument("--trace", action="store_true", help="print the net after every step")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("sequentialize", help="read a proof back from a net")
    p.add_argument("net")
    p.add_argument("--compact", action="store_true", help="print the proof on one line")
    p.set_defaults(func=cmd_sequentialize)

    p = sub.add_parser("girard", help="unfold a cut-free net into a Girard net")
    p.add_argument("net")
    p.set_defaults(func=cmd_girard)

    p = sub.add_parser("equiv", help="decide equivalence of two proofs")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("gen", help="print a member of a benchmark family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark a family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("n", type=int, nargs="+")
    p.add_argument("--repeat", type=int, default=1, help="timed repetitions after one warm-up")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
         err: Optional[TextIO] = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    rep = Reporter(args.format, out)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        return args.func(args, rep)
    except ParseError as e:
        return _fail(rep, err, "parse", e, EXIT_PARSE)
    except _Incorrect as e:
        rep.fields([("verdict", str(e).split(":")[0])])
        return _fail(rep, err, "incorrect", e, EXIT_INCORRECT)
    except ResourceLimit as e:
        return _fail(rep, err, "cap", e, EXIT_CAP)
    except (IllFormedError, ValueError) as e:
        return _fail(rep, err, "ill-formed", e, EXIT_ILL_FORMED)
    except OSError as e:
        return _fail(rep, err, "ill-formed", e, EXIT_ILL_FORMED)


def _fail(rep: Reporter, err: TextIO, category: str, e: Exception, code: int) -> int:
    if rep.fmt == "machine":
        print("error=%s" % category, file=rep.out)
        print("message=%s" % _machine(e), file=rep.out)
    print("error (%s): %s" % (category, e), file=err)
    return code


if __name__ == "__main__":
    sys.exit(main())
