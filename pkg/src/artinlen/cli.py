"""Command-line front end.

    artinlen ring-info RING
    artinlen resolve RING MODULE [--stages N]
    artinlen verify SUITE [RING ...] [--count N] [--h 2,3,5]

RING is a ring spec file or the name of a bundled ring (x2y2, m2zero,
lescot132, ...); MODULE is a module spec file or ``k`` for the residue
field.  Reports go to stdout (or ``--out``), diagnostics to stderr.

Exit codes: 0 pass, 1 assertion failure, 2 parse error, 3 stage budget
exceeded, 4 wrong ring class.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import CharMismatch, NonLocalRelation, NotArtinian, build_algebra, classify, hilbert, load_ring
from .harness import (
    BadExponents,
    SuiteConfig,
    WrongRingClass,
    verify_ci4,
    verify_curv,
    verify_flat,
    verify_limits,
    verify_monomial_ci,
    verify_short_nonci,
)
from .modules import load_module
from .polynomial import ParseError
from .resolution import DEFAULT_CAP, StageBudgetExceeded, resolve
from .series import residue_field

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_RING_CLASS = 4

SUITES = ("ci4", "short", "curv", "flat", "monomial-ci", "limits")


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _ring_info(A) -> dict:
    hd = hilbert(A)
    cls = classify(A)
    return {
        "name": A.name,
        "char": A.p,
        "vars": list(A.names),
        "dim": A.dim,
        "hilbert": hd.h,
        "embdim": hd.embdim,
        "socle_dim": hd.socle_dim,
        **cls.to_dict(),
    }


def cmd_ring_info(args) -> int:
    A = build_algebra(load_ring(args.ring))
    _emit(_dump(_ring_info(A)), args.out)
    return EXIT_OK


def _table_json(table) -> dict:
    per = table.periodic
    return {
        "betti": table.betti,
        "lengths": table.syzygy_lengths,
        "bounded": table.bounded_flag,
        "periodic": None if per is None else
        {"i": per.i, "j": per.j, "method": per.method, "certified": per.certified},
        "truncated": table.truncated,
    }


def cmd_resolve(args) -> int:
    A = build_algebra(load_ring(args.ring))
    M = residue_field(A) if args.module == "k" else load_module(args.module, algebra=A)
    try:
        table, _ = resolve(M, args.stages, window=args.window, cap=args.cap,
                           trials=args.trials, seed=args.seed)
    except StageBudgetExceeded as exc:
        print(f"artinlen: {exc}", file=sys.stderr)
        _emit(_dump(_table_json(exc.table)), args.out)
        return EXIT_BUDGET
    _emit(_dump(_table_json(table)), args.out)
    return EXIT_OK


def _config(args, ring: str) -> SuiteConfig:
    cfg = SuiteConfig(ring=ring, seed=args.seed, stages=args.stages, trials=args.trials,
                      window=args.window, cap=args.cap, char=args.char)
    if args.count is not None:
        cfg.count = args.count
    if args.controls is not None:
        cfg.controls = args.controls
    return cfg


def _need(rings, k: int, suite: str):
    if len(rings) != k:
        raise UsageError(f"suite {suite} takes {k} ring argument(s), got {len(rings)}")


def cmd_verify(args) -> int:
    suite, rings = args.suite, args.rings
    if suite == "limits":
        _need(rings, 0, suite)
        report = verify_limits(args.h or [2, 3, 5], n_max=args.n_max)
    elif suite == "monomial-ci":
        exps = args.exponents
        if exps is None:
            _need(rings, 1, suite)
            exps = _int_list(rings[0])
        else:
            _need(rings, 0, suite)
        report = verify_monomial_ci(exps, _config(args, ",".join(map(str, exps))))
    elif suite == "flat":
        _need(rings, 2, suite)
        report = verify_flat(rings[0], rings[1], _config(args, " ".join(rings)))
    else:
        _need(rings, 1, suite)
        run = {"ci4": verify_ci4, "short": verify_short_nonci, "curv": verify_curv}[suite]
        report = run(rings[0], _config(args, rings[0]))
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _emit(text, args.out)
    for a in report.assertions:
        if not a["passed"]:
            print(f"artinlen: FAILED {a['name']}: {a['detail']}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _common(p: argparse.ArgumentParser):
    p.add_argument("--stages", type=int, default=12, help="syzygy stages (default 12)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=64, help="random isomorphism trials (default 64)")
    p.add_argument("--window", type=int, default=4, help="plateau window (default 4)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                   help=f"largest allowed betti * dim A (default {DEFAULT_CAP})")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artinlen", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"artinlen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ring-info", help="dimension, Hilbert function and classification of a ring")
    p.add_argument("ring")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ring_info)

    p = sub.add_parser("resolve", help="Betti numbers and syzygy lengths of a module")
    p.add_argument("ring")
    p.add_argument("module", help="module spec file, or 'k' for the residue field")
    _common(p)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("rings", nargs="*",
                   help="one ring (ci4, short, curv), two rings R T (flat), or exponents like 4,2 (monomial-ci)")
    _common(p)
    p.add_argument("--count", type=int, default=None, help="extension-closure members (default 50)")
    p.add_argument("--controls", type=int, default=None, help="random control presentations (default 10)")
    p.add_argument("--char", type=int, default=7, help="characteristic for monomial-ci (default 7)")
    p.add_argument("--exponents", type=_int_list, default=None, help="monomial-ci exponents, e.g. 4,2")
    p.add_argument("--h", type=_int_list, default=None, help="limits: comma-separated h values (default 2,3,5)")
    p.add_argument("--n-max", type=int, default=60, help="limits: index of the checked term (default 60)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NotArtinian, NonLocalRelation, FileNotFoundError, IsADirectoryError) as exc:
        print(f"artinlen: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (WrongRingClass, BadExponents, CharMismatch) as exc:
        print(f"artinlen: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RING_CLASS
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"artinlen: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
