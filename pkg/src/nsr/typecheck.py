"""Derivation checking for the natural-deduction system, plus a small type inferencer.

Derivations are explicit trees; each node names its rule and carries the witnesses
the rule needs (instantiating expression, substituted predicate body). Serialized as

    RULE fa1_e [expr=S(0)] :: x : A ; y : B |- t : formula
      RULE ... (children indented by two spaces)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator

from .formulas import (
    Abbrev, And, Arrow, ExistsFO, ExistsSO, ForallFO, ForallSO, Formula, FormulaParseError, Nat,
    NatRestr, Or, PredVar, ValRestr, alpha_eq as formula_alpha_eq, congr_normalize, expand,
    fo_free, internal, parse_expr, parse_formula, show as show_formula, show_expr, so_free,
    subst_fo, subst_so, expand_once,
)
from .terms import (
    Abs, App, Case, Inl, Inr, Pair, Proj1, Proj2, Rec, Succ, Term, Var, Zero, ParseError,
    alpha_eq as term_alpha_eq, is_value, parse_term, show as show_term,
)

MODES = ("effect-free", "stateful")
MODE_ALIASES = {"pure": "effect-free", "effect-free": "effect-free", "stateful": "stateful"}

RULES = ("ax", "0", "S", "rec", "imp_e", "imp_i", "and_i", "and_e1", "and_e2", "ex1_i", "fa1_e",
         "fa1_i", "ex2_i", "fa2_e", "fa2_i", "congr", "restr_i", "restr_e", "or_i1", "or_i2", "or_e")

ARITH_RULES = ("0", "S", "rec")

AXIOM_0 = parse_formula("Nat(0)")
AXIOM_S = parse_formula("fa_N x. Nat(S(x))")
AXIOM_REC = parse_formula("forall2 Z:1. Z(0) -> (fa_N y. Z(y) -> Z(S(y))) -> fa_N x. Z(x)")


@dataclass(frozen=True)
class Judgment:
    context: tuple[tuple[str, Formula], ...]
    subject: Term
    formula: Formula

    def lookup(self, x: str) -> Formula | None:
        for y, a in reversed(self.context):
            if y == x:
                return a
        return None

    def __str__(self) -> str:
        ctx = " ; ".join(f"{x} : {show_formula(a)}" for x, a in self.context)
        return f"{ctx}{' ' if ctx else ''}|- {show_term(self.subject)} : {show_formula(self.formula)}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: tuple[Derivation, ...] = ()
    witnesses: tuple[tuple[str, str], ...] = ()

    def witness(self, key: str) -> str | None:
        return dict(self.witnesses).get(key)

    def nodes(self) -> Iterator[tuple[tuple[int, ...], Derivation]]:
        """All nodes with their paths (child indices from the root)."""
        yield (), self
        for i, p in enumerate(self.premises):
            for path, n in p.nodes():
                yield (i, *path), n

    def replace_at(self, path: tuple[int, ...], new: Derivation) -> Derivation:
        if not path:
            return new
        i, rest = path[0], path[1:]
        kids = list(self.premises)
        kids[i] = kids[i].replace_at(rest, new)
        return replace(self, premises=tuple(kids))

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def dump(self, indent: int = 0) -> str:
        w = ""
        if self.witnesses:
            w = " [" + "; ".join(f"{k}={v}" for k, v in self.witnesses) + "]"
        lines = [f"{'  ' * indent}RULE {self.rule}{w} :: {self.conclusion}"]
        lines += [p.dump(indent + 1) for p in self.premises]
        return "\n".join(lines)


@dataclass(frozen=True)
class Diagnostic:
    path: tuple[int, ...]
    rule: str
    message: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return f"{where} ({self.rule}): {self.message}"


@dataclass
class CheckReport:
    ok: bool
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __str__(self) -> str:
        if self.ok:
            return "accepted"
        return "rejected\n" + "\n".join(f"  {d}" for d in self.diagnostics)


class RuleError(Exception):
    pass


# formula comparison up to abbreviations and renaming of bound variables


def same(a: Formula, b: Formula) -> bool:
    return formula_alpha_eq(expand(a), expand(b))


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise RuleError(msg)


def _arity(d: Derivation, n: int) -> None:
    _need(len(d.premises) == n, f"expects {n} premise(s), got {len(d.premises)}")


def _same_context(d: Derivation, *premises: Derivation) -> None:
    for p in premises:
        _need(p.conclusion.context == d.conclusion.context, "premise context differs from conclusion")


def _same_subject(d: Derivation, p: Derivation) -> None:
    _need(term_alpha_eq(p.conclusion.subject, d.conclusion.subject),
          "premise and conclusion type different terms")


def _ctx_fo(ctx) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for _, a in ctx:
        out |= fo_free(expand(a))
    return out


def _ctx_so(ctx) -> set[str]:
    out: set[str] = set()
    for _, a in ctx:
        out |= set(so_free(expand(a)))
    return out


def _witness_expr(d: Derivation):
    src = d.witness("expr")
    _need(src is not None, "missing witness expr")
    try:
        return parse_expr(src)
    except FormulaParseError as exc:
        raise RuleError(f"bad witness expr: {exc}") from None


def _witness_body(d: Derivation):
    params = tuple((d.witness("params") or "").split())
    src = d.witness("body")
    _need(src is not None, "missing witness body")
    try:
        return params, parse_formula(src)
    except FormulaParseError as exc:
        raise RuleError(f"bad witness body: {exc}") from None


def _unfold_top(a: Formula) -> Formula:
    """Expand abbreviations at the root only (so connectives can be matched)."""
    while isinstance(a, Abbrev):
        a = expand_once(a)
    return a


def _check_node(d: Derivation, mode: str) -> None:
    j = d.conclusion
    t, a = j.subject, j.formula
    names = [x for x, _ in j.context]
    _need(len(names) == len(set(names)), "context variables are not distinct")
    match d.rule:
        case "ax":
            _arity(d, 0)
            _need(isinstance(t, Var), "ax types a variable")
            b = j.lookup(t.name)
            _need(b is not None, f"{t.name} not in context")
            _need(same(a, b), f"context gives {t.name} : {show_formula(b)}")
        case "0" | "S" | "rec":
            _arity(d, 0)
            _need(mode == "effect-free", f"rule {d.rule} is not available in stateful mode")
            want = {"0": (Zero, AXIOM_0), "S": (Succ, AXIOM_S), "rec": (Rec, AXIOM_REC)}[d.rule]
            _need(isinstance(t, want[0]), f"rule {d.rule} types the constant {d.rule}")
            _need(same(a, want[1]), f"expected {show_formula(want[1])}")
        case "imp_e":
            _arity(d, 2)
            f, u = d.premises
            _same_context(d, f, u)
            _need(isinstance(t, App), "imp_e types an application")
            _need(term_alpha_eq(f.conclusion.subject, t.fun), "function premise types another term")
            _need(term_alpha_eq(u.conclusion.subject, t.arg), "argument premise types another term")
            fa = _unfold_top(f.conclusion.formula)
            _need(isinstance(fa, Arrow), "function premise is not an implication")
            _need(same(fa.hyp, u.conclusion.formula), "argument does not match the hypothesis")
            _need(same(fa.body, a), "conclusion does not match the implication's body")
        case "imp_i":
            _arity(d, 1)
            (p,) = d.premises
            _need(isinstance(t, Abs), "imp_i types an abstraction")
            fa = _unfold_top(a)
            _need(isinstance(fa, Arrow), "conclusion is not an implication")
            pc = p.conclusion
            _need(pc.context == j.context + ((t.binder, pc.context[-1][1]),) if pc.context else False,
                  "premise context must extend the conclusion's by the bound variable")
            _need(t.binder not in names, "bound variable already in context")
            _need(same(pc.context[-1][1], fa.hyp), "hypothesis does not match the bound variable's type")
            _need(term_alpha_eq(pc.subject, t.body), "premise types another body")
            _need(same(pc.formula, fa.body), "premise formula does not match the implication's body")
        case "and_i":
            _arity(d, 2)
            l, r = d.premises
            _same_context(d, l, r)
            _need(isinstance(t, Pair), "and_i types a pair")
            fa = _unfold_top(a)
            _need(isinstance(fa, And), "conclusion is not a conjunction")
            _need(term_alpha_eq(l.conclusion.subject, t.left) and term_alpha_eq(r.conclusion.subject, t.right),
                  "premises type other terms")
            _need(same(l.conclusion.formula, fa.left) and same(r.conclusion.formula, fa.right),
                  "premise formulas do not match the conjuncts")
        case "and_e1" | "and_e2":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            proj = Proj1 if d.rule == "and_e1" else Proj2
            _need(isinstance(t, proj), f"{d.rule} types a projection")
            _need(term_alpha_eq(p.conclusion.subject, t.t), "premise types another term")
            pa = _unfold_top(p.conclusion.formula)
            _need(isinstance(pa, And), "premise is not a conjunction")
            _need(same(pa.left if d.rule == "and_e1" else pa.right, a), "conclusion is not that conjunct")
        case "ex1_i" | "fa1_e":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            e = _witness_expr(d)
            if d.rule == "ex1_i":
                q, inst = _unfold_top(a), p.conclusion.formula
                _need(isinstance(q, ExistsFO), "conclusion is not a first-order existential")
            else:
                q, inst = _unfold_top(p.conclusion.formula), a
                _need(isinstance(q, ForallFO), "premise is not a first-order universal")
            _need(same(inst, subst_fo(q.body, q.var, e)),
                  f"formula is not the instance at {show_expr(e)}")
        case "fa1_i":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            q = _unfold_top(a)
            _need(isinstance(q, ForallFO), "conclusion is not a first-order universal")
            _need(same(q.body, p.conclusion.formula), "premise is not the quantified body")
            _need(q.var not in _ctx_fo(j.context), f"eigenvariable {q.var} is free in the context")
        case "ex2_i" | "fa2_e":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            params, body = _witness_body(d)
            quant = ExistsSO if d.rule == "ex2_i" else ForallSO
            q = _unfold_top(a if d.rule == "ex2_i" else p.conclusion.formula)
            _need(isinstance(q, quant), "expected a second-order quantifier")
            _need(len(params) == q.arity, f"substitution has {len(params)} parameters, {q.var} has arity {q.arity}")
            if mode == "stateful" and q.arity > 0:
                _need(internal(body), "external substitution: only internal bodies may instantiate "
                                      "a predicate variable of positive arity in stateful mode")
            inst = p.conclusion.formula if d.rule == "ex2_i" else a
            _need(same(inst, subst_so(q.body, q.var, params, body)),
                  "formula is not the instance of the given substitution")
        case "fa2_i":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            q = _unfold_top(a)
            _need(isinstance(q, ForallSO), "conclusion is not a second-order universal")
            _need(same(q.body, p.conclusion.formula), "premise is not the quantified body")
            _need(q.var not in _ctx_so(j.context), f"eigenvariable {q.var} is free in the context")
        case "congr":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            _need(formula_alpha_eq(congr_normalize(expand(a)), congr_normalize(expand(p.conclusion.formula))),
                  "formulas are not congruent")
        case "restr_i":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            _same_subject(d, p)
            pa = _unfold_top(p.conclusion.formula)
            _need(isinstance(pa, Arrow), "premise is not an implication")
            q = _unfold_top(a)
            match q:
                case NatRestr(e, b):
                    _need(same(pa.hyp, Nat(e)) and same(pa.body, b), "restriction does not match the premise")
                case ValRestr(h, b):
                    _need(same(pa.hyp, h) and same(pa.body, b), "restriction does not match the premise")
                case _:
                    raise RuleError("conclusion is not a value restriction")
        case "restr_e":
            _arity(d, 2)
            f, v = d.premises
            _same_context(d, f, v)
            _need(isinstance(t, App), "restr_e types an application")
            _need(is_value(t.arg), "restr_e needs a value argument")
            _need(term_alpha_eq(f.conclusion.subject, t.fun) and term_alpha_eq(v.conclusion.subject, t.arg),
                  "premises type other terms")
            fa = _unfold_top(f.conclusion.formula)
            match fa:
                case NatRestr(e, b):
                    hyp = Nat(e)
                case ValRestr(hyp, b):
                    pass
                case _:
                    raise RuleError("function premise is not a value restriction")
            _need(same(hyp, v.conclusion.formula), "argument does not match the restriction")
            _need(same(b, a), "conclusion does not match the restriction's body")
        case "or_i1" | "or_i2":
            _arity(d, 1)
            (p,) = d.premises
            _same_context(d, p)
            inj = Inl if d.rule == "or_i1" else Inr
            _need(isinstance(t, inj), f"{d.rule} types an injection")
            _need(term_alpha_eq(p.conclusion.subject, t.t), "premise types another term")
            q = _unfold_top(a)
            _need(isinstance(q, Or), "conclusion is not a disjunction")
            _need(same(q.left if d.rule == "or_i1" else q.right, p.conclusion.formula),
                  "premise is not that disjunct")
        case "or_e":
            _arity(d, 3)
            s, l, r = d.premises
            _same_context(d, s)
            _need(isinstance(t, Case), "or_e types a case analysis")
            _need(term_alpha_eq(s.conclusion.subject, t.scrutinee), "first premise types another term")
            q = _unfold_top(s.conclusion.formula)
            _need(isinstance(q, Or), "scrutinee is not a disjunction")
            for prem, x, body, side in ((l, t.left_binder, t.left_body, q.left),
                                        (r, t.right_binder, t.right_body, q.right)):
                pc = prem.conclusion
                _need(x not in names, f"bound variable {x} already in context")
                _need(pc.context == j.context + ((x, pc.context[-1][1]),) if pc.context else False,
                      "branch context must extend the conclusion's by the bound variable")
                _need(same(pc.context[-1][1], side), "branch variable does not have the disjunct's type")
                _need(term_alpha_eq(pc.subject, body), "branch premise types another term")
                _need(same(pc.formula, a), "branch formula differs from the conclusion")
        case _:
            raise RuleError(f"unknown rule {d.rule!r}")


def check_derivation(d: Derivation, mode: str = "effect-free") -> CheckReport:
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    diags = []
    for path, node in d.nodes():
        try:
            _check_node(node, mode)
        except RuleError as exc:
            diags.append(Diagnostic(path, node.rule, str(exc)))
    return CheckReport(not diags, diags)


# serialization


class DerivationParseError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_judgment(src: str, line: int = 0) -> Judgment:
    if "|- " not in src + " ":
        raise DerivationParseError("missing '|-'", line)
    head, _, rest = src.partition("|- ")
    if head and not head.endswith(" "):
        raise DerivationParseError("missing '|-'", line)
    try:
        ctx = []
        for entry in filter(None, (e.strip() for e in head.split(" ; "))):
            x, _, a = entry.partition(":")
            ctx.append((x.strip(), parse_formula(a)))
        term_src, colon, formula_src = rest.partition(":")
        if not colon:
            raise DerivationParseError("judgment needs 'term : formula'", line)
        return Judgment(tuple(ctx), parse_term(term_src), parse_formula(formula_src))
    except (ParseError, FormulaParseError) as exc:
        raise DerivationParseError(str(exc), line) from None


def _parse_node_line(text: str, line: int) -> tuple[str, tuple[tuple[str, str], ...], Judgment]:
    if not text.startswith("RULE "):
        raise DerivationParseError("expected 'RULE'", line)
    head, sep, judgment = text[5:].partition(" :: ")
    if not sep:
        raise DerivationParseError("expected ' :: ' before the judgment", line)
    head = head.strip()
    witnesses: list[tuple[str, str]] = []
    if "[" in head:
        rule, _, w = head.partition("[")
        if not w.endswith("]"):
            raise DerivationParseError("unterminated witness list", line)
        for item in filter(None, (i.strip() for i in w[:-1].split(";"))):
            k, eq, v = item.partition("=")
            if not eq:
                raise DerivationParseError(f"bad witness {item!r}", line)
            witnesses.append((k.strip(), v.strip()))
        head = rule.strip()
    return head, tuple(witnesses), parse_judgment(judgment, line)


@dataclass(frozen=True)
class DerivationEntry:
    name: str
    derivation: Derivation
    mode: str = "effect-free"
    expect: str = "accept"


def parse_derivation(src: str) -> Derivation:
    entries = parse_derivations(src)
    if len(entries) != 1:
        raise DerivationParseError(f"expected one derivation, found {len(entries)}", 0)
    return entries[0].derivation


def _parse_header(text: str, line: int) -> tuple[str, str, str]:
    parts = text.split()
    name = parts[0] if parts else "derivation"
    mode, expect = "effect-free", "accept"
    for opt in parts[1:]:
        k, eq, v = opt.partition("=")
        if k == "mode" and v in MODE_ALIASES:
            mode = MODE_ALIASES[v]
        elif k == "expect" and v in ("accept", "reject"):
            expect = v
        else:
            raise DerivationParseError(f"bad header option {opt!r}", line)
    return name, mode, expect


def parse_derivations(src: str) -> list[DerivationEntry]:
    """Parse a file of derivations.

    A line `DERIVATION name [mode=stateful|effect-free] [expect=accept|reject]` starts each tree.
    """
    out: list[DerivationEntry] = []
    header = ("derivation", "effect-free", "accept")
    stack: list[tuple[int, list]] = []  # (indent, [rule, witnesses, judgment, children])
    roots: list = []

    def close():
        nonlocal roots
        for r in roots:
            out.append(DerivationEntry(header[0], _freeze(r), header[1], header[2]))
        roots = []

    for i, raw in enumerate(src.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if raw.startswith("DERIVATION"):
            close()
            stack.clear()
            header = _parse_header(raw[len("DERIVATION"):], i)
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2:
            raise DerivationParseError("indentation must be a multiple of two spaces", i)
        rule, wit, judg = _parse_node_line(raw.strip(), i)
        node = [rule, wit, judg, []]
        while stack and stack[-1][0] >= indent:
            stack.pop()
        if stack:
            if indent != stack[-1][0] + 2:
                raise DerivationParseError("child indented too deeply", i)
            stack[-1][1][3].append(node)
        else:
            if indent:
                raise DerivationParseError("root must not be indented", i)
            roots.append(node)
        stack.append((indent, node))
    close()
    return out


def _freeze(node) -> Derivation:
    rule, wit, judg, kids = node
    return Derivation(rule, judg, tuple(_freeze(k) for k in kids), wit)


# mutations (used to test that the checker is not vacuous)


def single_node_mutations(d: Derivation) -> Iterator[tuple[str, Derivation]]:
    """Rule-name swaps and witness perturbations, one node at a time."""
    for path, node in d.nodes():
        where = ".".join(map(str, path)) or "root"
        for k, v in node.witnesses:
            if k == "expr":
                new = tuple((k2, f"S({v2})" if k2 == k else v2) for k2, v2 in node.witnesses)
                yield f"{where}: expr {v} -> S({v})", d.replace_at(path, replace(node, witnesses=new))
            if k == "body":
                new = tuple((k2, f"({v2}) -> bot" if k2 == k else v2) for k2, v2 in node.witnesses)
                yield f"{where}: body wrapped in negation", d.replace_at(path, replace(node, witnesses=new))
        for other in _SWAPS.get(node.rule, ()):
            yield f"{where}: {node.rule} -> {other}", d.replace_at(path, replace(node, rule=other))


_SWAPS = {
    "ax": ("0",), "0": ("S",), "S": ("rec",), "rec": ("S",), "imp_e": ("restr_e",),
    "imp_i": ("fa1_i",), "and_i": ("imp_e",), "and_e1": ("and_e2",), "and_e2": ("and_e1",),
    "ex1_i": ("fa1_e",), "fa1_e": ("ex1_i",), "fa1_i": ("fa2_i",), "ex2_i": ("fa2_e",),
    "fa2_e": ("ex2_i",), "fa2_i": ("fa1_i",), "congr": ("ax",), "restr_i": ("congr",),
    "restr_e": ("imp_e",), "or_i1": ("or_i2",), "or_i2": ("or_i1",), "or_e": ("and_i",),
}


# inference for the implication/conjunction fragment


@dataclass(frozen=True)
class _Meta:
    n: int


def infer_simple(ctx: tuple[tuple[str, Formula], ...], t: Term) -> tuple[Formula, Derivation] | None:
    """Most general type of t in the -> / /\\ fragment, with a derivation; None if untypable."""
    counter = itertools.count()
    subst: dict[int, object] = {}

    def fresh():
        return _Meta(next(counter))

    def walk(x):
        while isinstance(x, _Meta) and x.n in subst:
            x = subst[x.n]
        return x

    def occurs(m: _Meta, x) -> bool:
        x = walk(x)
        if isinstance(x, _Meta):
            return x == m
        if isinstance(x, tuple):
            return occurs(m, x[1]) or occurs(m, x[2])
        return False

    def unify(a, b) -> bool:
        a, b = walk(a), walk(b)
        if a == b:
            return True
        if isinstance(a, _Meta):
            if occurs(a, b):
                return False
            subst[a.n] = b
            return True
        if isinstance(b, _Meta):
            return unify(b, a)
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0]:
            return unify(a[1], b[1]) and unify(a[2], b[2])
        return False

    # types: _Meta | Formula (rigid) | ("->", a, b) | ("/\\", a, b)
    def lift(f: Formula):
        match f:
            case Arrow(h, b):
                return ("->", lift(h), lift(b))
            case And(l, r):
                return ("/\\", lift(l), lift(r))
        return f


    def go(env: tuple, u: Term):
        match u:
            case Var(x):
                for y, ty in reversed(env):
                    if y == x:
                        return ("ax", env, u, ty, ())
                return None
            case Zero():
                return ("0", env, u, Nat(parse_expr("0")), ())
            case Abs(x, body):
                if any(y == x for y, _ in env):
                    return None
                a = fresh()
                sub = go(env + ((x, a),), body)
                if sub is None:
                    return None
                return ("imp_i", env, u, ("->", a, sub[3]), (sub,))
            case App(f, arg):
                nf, na = go(env, f), go(env, arg)
                if nf is None or na is None:
                    return None
                r = fresh()
                if not unify(nf[3], ("->", na[3], r)):
                    return None
                return ("imp_e", env, u, r, (nf, na))
            case Pair(l, r):
                nl, nr = go(env, l), go(env, r)
                if nl is None or nr is None:
                    return None
                return ("and_i", env, u, ("/\\", nl[3], nr[3]), (nl, nr))
            case Proj1(p) | Proj2(p):
                np_ = go(env, p)
                if np_ is None:
                    return None
                a, b = fresh(), fresh()
                if not unify(np_[3], ("/\\", a, b)):
                    return None
                first = isinstance(u, Proj1)
                return ("and_e1" if first else "and_e2", env, u, a if first else b, (np_,))
        return None

    root = go(tuple((x, lift(a)) for x, a in ctx), t)
    if root is None:
        return None

    names: dict[int, str] = {}
    taken = set()
    for _, a in ctx:
        taken |= set(so_free(a))
    pool = (n for n in itertools.chain("ABCDEFGHIJKLMNOPQRUVW",
                                       (f"A{i}" for i in itertools.count(1))) if n not in taken)

    def lower(x) -> Formula:
        x = walk(x)
        if isinstance(x, _Meta):
            if x.n not in names:
                names[x.n] = next(pool)
            return PredVar(names[x.n])
        if isinstance(x, tuple):
            return (Arrow if x[0] == "->" else And)(lower(x[1]), lower(x[2]))
        return x

    def build(n) -> Derivation:
        rule, env, u, ty, kids = n
        j = Judgment(tuple((x, lower(a)) for x, a in env), u, lower(ty))
        return Derivation(rule, j, tuple(build(k) for k in kids))

    d = build(root)
    return d.conclusion.formula, d
