"""Command-line front end: `nsr <command> ...`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checker as ck
from .claims import ClaimFileError, run_claims
from .formulas import FormulaParseError, parse_formula
from .individuals import IndividualParseError, Status, default_valuation, family_by_name, parse_individual
from .machine import run
from .realizers import LIBRARY, UnknownRealizer, describe, term as lib_term
from .terms import ParseError, show
from .typecheck import MODE_ALIASES, DerivationParseError, check_derivation, parse_derivations

EX_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _range(src: str) -> range:
    a, sep, b = src.partition("..")
    if not sep or not a.strip().isdigit() or not b.strip().isdigit() or int(b) < int(a):
        raise argparse.ArgumentTypeError(f"expected a..b, got {src!r}")
    return range(int(a), int(b) + 1)


def _nonneg(src: str) -> int:
    n = int(src)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _add_run_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("term", help="term source; library names are resolved")
    p.add_argument("--state", type=_nonneg, default=0)
    p.add_argument("--strategy", choices=("cbn", "cbv"), default="cbn")
    p.add_argument("--fuel", type=_nonneg, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nsr", description="Stateful realizability toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="reduce a term and print the result line")
    _add_run_opts(p)
    p.add_argument("--format", choices=("text", "json-lines"), default="text")

    p = sub.add_parser("trace", help="print every reduction step")
    _add_run_opts(p)
    p.add_argument("--format", choices=("text", "json-lines"), default="text")

    p = sub.add_parser("typecheck", help="check a file of derivations")
    p.add_argument("file")
    p.add_argument("--mode", choices=sorted(MODE_ALIASES), default=None,
                   help="override the mode given in the file")

    p = sub.add_parser("check", help="bounded membership of a term in a formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("--state", type=_nonneg, default=None)
    p.add_argument("--range", type=_range, default=None, help="check every state in a..b")
    p.add_argument("--fuel", type=_nonneg, default=None)
    p.add_argument("--individuals", default=None, help="';'-separated individual literals, or 'default'")
    p.add_argument("--generators", default=None, help="';;'-separated hypothesis generator terms")
    p.add_argument("--bind", action="append", default=[], metavar="X=LIT")
    p.add_argument("--pred", action="append", default=[], metavar="X=FAMILY")
    p.add_argument("--atoms", choices=("slice", "saturated"), default="slice")

    p = sub.add_parser("extract", help="witness extraction with the pairing probe")
    p.add_argument("term")
    p.add_argument("--state", type=_nonneg, default=0)
    p.add_argument("--fuel", type=_nonneg, default=None)

    p = sub.add_parser("claims", help="claim corpus")
    csub = p.add_subparsers(dest="claims_command", required=True, parser_class=_Parser)
    r = csub.add_parser("run", help="run claim files (default: the shipped corpus)")
    r.add_argument("paths", nargs="*")
    r.add_argument("--fuel", type=_nonneg, default=None)
    r.add_argument("--select", default=None, help="only claims whose id contains this text")
    r.add_argument("--format", choices=("text", "json-lines"), default="text")
    r.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("list-realizers", help="list the realizer library")

    p = sub.add_parser("show", help="show a library realizer")
    p.add_argument("name")
    return ap


# commands


def _cmd_reduce(a) -> int:
    tr = run(lib_term(a.term), a.state, a.fuel, a.strategy, record=a.command == "trace")
    if a.command == "trace":
        print(tr.export() if a.format == "text" else tr.export_json_lines())
    else:
        print(tr.result_line() if a.format == "text" else json.dumps(tr.result_json()))
    return 0


def _cmd_typecheck(a) -> int:
    entries = parse_derivations(Path(a.file).read_text())
    bad = 0
    for e in entries:
        mode = MODE_ALIASES[a.mode] if a.mode else e.mode
        rep = check_derivation(e.derivation, mode)
        got = "accept" if rep.ok else "reject"
        ok = got == e.expect
        bad += not ok
        print(f"{'ACCEPT' if rep.ok else 'REJECT'} {e.name} [{mode}]" + ("" if ok else f" (expected {e.expect})"))
        for d in rep.diagnostics:
            print(f"  {d}")
    return 1 if bad else 0


def _config(a) -> ck.CheckConfig:
    kw = {}
    if a.fuel is not None:
        kw["fuel"] = a.fuel
    if a.range is not None:
        kw["states"] = a.range
    if a.individuals:
        inds = ()
        for item in (x.strip() for x in a.individuals.split(";")):
            if item == "default":
                inds += ck.default_individuals()
            elif item:
                inds += (parse_individual(item),)
        kw["individuals"] = inds
    if a.generators:
        kw["generators"] = tuple(lib_term(g) for g in a.generators.split(";;") if g.strip())
    kw["atoms"] = a.atoms
    return ck.CheckConfig(**kw)


def _valuation(a):
    rho = default_valuation()
    for b in a.bind:
        x, eq, lit = b.partition("=")
        if not eq:
            raise UsageError(f"--bind expects X=LIT, got {b!r}")
        rho = rho.bind(x.strip(), parse_individual(lit))
    for b in a.pred:
        x, eq, fam = b.partition("=")
        if not eq:
            raise UsageError(f"--pred expects X=FAMILY, got {b!r}")
        rho = rho.bind_so(x.strip(), family_by_name(fam))
    return rho


_EXIT = {Status.MEMBER: 0, Status.NONMEMBER: 1, Status.UNKNOWN: 2}


def _cmd_check(a) -> int:
    if a.state is not None and a.range is not None:
        raise UsageError("give --state or --range, not both")
    formula, t, cfg, rho = parse_formula(a.formula), lib_term(a.term), _config(a), _valuation(a)
    if a.range is not None:
        rep = ck.universal(formula, rho, t, cfg)
        print(rep.summary())
        v = rep.verdict
    else:
        v = ck.member(formula, rho, t, a.state or 0, cfg)
    print(f"VERDICT {v}" + (f" ({v.reason})" if v.reason else ""))
    return _EXIT[v.status]


def _cmd_extract(a) -> int:
    cfg = ck.CheckConfig(fuel=a.fuel) if a.fuel is not None else ck.CheckConfig()
    try:
        w = ck.extract_witness(lib_term(a.term), a.state, cfg)
    except ck.ExtractionError as exc:
        print(f"ERROR {exc}")
        return 2 if exc.unknown else 1
    print(f"WITNESS {w.value} STATE {w.state} PAYLOAD {show(w.payload)}")
    return 0


def _cmd_claims(a) -> int:
    rep = run_claims(a.paths or None, a.fuel, a.select)
    print(rep.text(a.verbose) if a.format == "text" else rep.json_lines())
    return rep.exit_code


def _cmd_list(a) -> int:
    width = max(len(n) for n in LIBRARY)
    for name, r in LIBRARY.items():
        print(f"{name:<{width}}  {r.anchor}")
    return 0


def _cmd_show(a) -> int:
    if a.name not in LIBRARY:
        raise UsageError(f"unknown realizer {a.name!r}")
    print(describe(a.name))
    return 0


_COMMANDS = {"reduce": _cmd_reduce, "trace": _cmd_reduce, "typecheck": _cmd_typecheck,
             "check": _cmd_check, "extract": _cmd_extract, "claims": _cmd_claims,
             "list-realizers": _cmd_list, "show": _cmd_show}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ParseError, FormulaParseError, IndividualParseError, DerivationParseError,
            ClaimFileError, UnknownRealizer, FileNotFoundError, ck.UncheckableFormula) as exc:
        print(f"nsr: error: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
