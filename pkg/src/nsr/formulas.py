"""Formulas: second-order arithmetic with st(e), Nat(e) |-> A and disjunction.

Covers first-order expressions, abbreviations and their expansion, the congruence
normal form for existential hypotheses, internal/external classification, and
truncation of an internal formula to a single state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping

from .arith import FUNCTIONS, RELATIONS


# first-order expressions


class Expr:
    def __str__(self) -> str:
        return show_expr(self)


@dataclass(frozen=True)
class FVar(Expr):
    name: str


@dataclass(frozen=True)
class FZero(Expr):
    pass


@dataclass(frozen=True)
class FSucc(Expr):
    e: Expr


@dataclass(frozen=True)
class FFun(Expr):
    symbol: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class FNum(Expr):
    """The constant n, shorthand for S^n(0)."""

    n: int


def expr_vars(e: Expr) -> frozenset[str]:
    match e:
        case FVar(x):
            return frozenset((x,))
        case FSucc(a):
            return expr_vars(a)
        case FFun(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= expr_vars(a)
            return out
    return frozenset()


def subst_expr(e: Expr, x: str, by: Expr) -> Expr:
    match e:
        case FVar(y):
            return by if y == x else e
        case FSucc(a):
            return FSucc(subst_expr(a, x, by))
        case FFun(f, args):
            return FFun(f, tuple(subst_expr(a, x, by) for a in args))
    return e


Env = Mapping[str, Callable[[int], int]]


def eval_expr(e: Expr, env: Env, s: int) -> int:
    """Value of e at state s, where env maps variables to state-indexed functions."""
    match e:
        case FVar(x):
            if x not in env:
                raise KeyError(f"unbound first-order variable {x}")
            return env[x](s)
        case FZero():
            return 0
        case FNum(n):
            return n
        case FSucc(a):
            return eval_expr(a, env, s) + 1
        case FFun(f, args):
            return FUNCTIONS[f].fn(*(eval_expr(a, env, s) for a in args))
    raise AssertionError(e)


def const_expr(n: int) -> Expr:
    return FZero() if n == 0 else FNum(n)


def fold_expr(e: Expr) -> Expr:
    """Constant-fold a closed expression to FNum."""
    if expr_vars(e):
        match e:
            case FSucc(a):
                return FSucc(fold_expr(a))
            case FFun(f, args):
                return FFun(f, tuple(fold_expr(a) for a in args))
        return e
    return const_expr(eval_expr(e, {}, 0))


def show_expr(e: Expr) -> str:
    match e:
        case FVar(x):
            return x
        case FZero():
            return "0"
        case FNum(n):
            return str(n)
        case FSucc(a):
            return f"S({show_expr(a)})"
        case FFun(f, args):
            return f"{f}({', '.join(show_expr(a) for a in args)})"
    raise AssertionError(e)


# formulas


class Formula:
    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class St(Formula):
    e: Expr


@dataclass(frozen=True)
class PredVar(Formula):
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Nat(Formula):
    """The effect-free natural-number predicate."""

    e: Expr


@dataclass(frozen=True)
class NatRestr(Formula):
    e: Expr
    body: Formula


@dataclass(frozen=True)
class ValRestr(Formula):
    """General value restriction A |-> B. Representable, never interpreted."""

    hyp: Formula
    body: Formula


@dataclass(frozen=True)
class Arrow(Formula):
    hyp: Formula
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForallFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallSO(Formula):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True)
class ExistsSO(Formula):
    var: str
    arity: int
    body: Formula


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Abbrev(Formula):
    """An unexpanded abbreviation.

    kind is one of ABBREVIATIONS; binder kinds carry `var` and one sub-formula.
    """

    kind: str
    var: str | None = None
    exprs: tuple[Expr, ...] = ()
    subs: tuple[Formula, ...] = ()


BINDER_ABBREVS = ("fa_bv", "ex_bv", "fa_st", "ex_st", "fa_stbv", "ex_stbv", "fa_N", "ex_N")
ABBREVIATIONS = ("bot", "top", "not", "eq", "natp") + BINDER_ABBREVS
EXTERNAL_ABBREVS = ("fa_st", "ex_st", "fa_stbv", "ex_stbv")

BOT = Abbrev("bot")
TOP = Abbrev("top")


def Not(a: Formula) -> Formula:
    return Abbrev("not", subs=(a,))


def binder(kind: str, var: str, body: Formula) -> Formula:
    if kind not in BINDER_ABBREVS:
        raise ValueError(kind)
    return Abbrev(kind, var, subs=(body,))


# structural helpers



def children(a: Formula) -> tuple[Formula, ...]:
    match a:
        case NatRestr(_, b):
            return (b,)
        case ValRestr(h, b) | Arrow(h, b) | And(h, b) | Or(h, b):
            return (h, b)
        case ForallFO(_, b) | ExistsFO(_, b) | ForallSO(_, _, b) | ExistsSO(_, _, b):
            return (b,)
        case Abbrev(subs=subs):
            return subs
    return ()


def exprs_of(a: Formula) -> tuple[Expr, ...]:
    match a:
        case St(e) | Nat(e) | NatRestr(e, _):
            return (e,)
        case PredVar(_, args) | Rel(_, args):
            return args
        case Abbrev(exprs=exprs):
            return exprs
    return ()


def fo_free(a: Formula) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for e in exprs_of(a):
        out |= expr_vars(e)
    match a:
        case ForallFO(x, b) | ExistsFO(x, b):
            return out | (fo_free(b) - {x})
        case Abbrev(kind, x, _, subs) if kind in BINDER_ABBREVS:
            return out | (fo_free(subs[0]) - {x})
    for c in children(a):
        out |= fo_free(c)
    return out


def so_free(a: Formula) -> dict[str, int]:
    """Free predicate variables with their arities."""
    match a:
        case PredVar(x, args):
            return {x: len(args)}
        case ForallSO(x, _, b) | ExistsSO(x, _, b):
            out = so_free(b)
            out.pop(x, None)
            return out
    out: dict[str, int] = {}
    for c in children(a):
        out.update(so_free(c))
    return out


def all_names(a: Formula) -> set[str]:
    """Every variable name occurring anywhere, bound or free."""
    names: set[str] = set()
    for e in exprs_of(a):
        names |= expr_vars(e)
    match a:
        case PredVar(x, _):
            names.add(x)
        case ForallFO(x, _) | ExistsFO(x, _) | ForallSO(x, _, _) | ExistsSO(x, _, _):
            names.add(x)
        case Abbrev(var=x) if x:
            names.add(x)
    for c in children(a):
        names |= all_names(c)
    return names


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    stem = base.rstrip("0123456789") or "v"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def rebuild(a: Formula, kids: tuple[Formula, ...]) -> Formula:
    match a:
        case NatRestr(e, _):
            return NatRestr(e, kids[0])
        case ValRestr():
            return ValRestr(*kids)
        case Arrow():
            return Arrow(*kids)
        case And():
            return And(*kids)
        case Or():
            return Or(*kids)
        case ForallFO(x, _):
            return ForallFO(x, kids[0])
        case ExistsFO(x, _):
            return ExistsFO(x, kids[0])
        case ForallSO(x, k, _):
            return ForallSO(x, k, kids[0])
        case ExistsSO(x, k, _):
            return ExistsSO(x, k, kids[0])
        case Abbrev(kind, x, exprs, _):
            return Abbrev(kind, x, exprs, kids)
    return a


def map_exprs(a: Formula, f: Callable[[Expr], Expr]) -> Formula:
    """Apply f to the expressions at this node only."""
    match a:
        case St(e):
            return St(f(e))
        case Nat(e):
            return Nat(f(e))
        case NatRestr(e, b):
            return NatRestr(f(e), b)
        case PredVar(x, args):
            return PredVar(x, tuple(f(e) for e in args))
        case Rel(r, args):
            return Rel(r, tuple(f(e) for e in args))
        case Abbrev(kind, x, exprs, subs):
            return Abbrev(kind, x, tuple(f(e) for e in exprs), subs)
    return a


def _fo_binder(a: Formula) -> str | None:
    match a:
        case ForallFO(x, _) | ExistsFO(x, _):
            return x
        case Abbrev(kind, x, _, _) if kind in BINDER_ABBREVS:
            return x
    return None


def _rename_fo_binder(a: Formula, new: str) -> Formula:
    old = _fo_binder(a)
    body = subst_fo(children(a)[0], old, FVar(new))
    match a:
        case ForallFO():
            return ForallFO(new, body)
        case ExistsFO():
            return ExistsFO(new, body)
        case Abbrev(kind, _, exprs, _):
            return Abbrev(kind, new, exprs, (body,))
    raise AssertionError(a)


def subst_fo(a: Formula, x: str, by: Expr) -> Formula:
    """Capture-avoiding A[x := by]."""
    if x not in fo_free(a):
        return a
    a = map_exprs(a, lambda e: subst_expr(e, x, by))
    y = _fo_binder(a)
    if y is not None:
        if y == x:
            return a
        bv = expr_vars(by)
        if y in bv:
            a = _rename_fo_binder(a, fresh_name(y, bv | all_names(a) | {x}))
    return rebuild(a, tuple(subst_fo(c, x, by) for c in children(a)))


def _rename_so_binder(a: Formula, new: str) -> Formula:
    match a:
        case ForallSO(x, k, b):
            return ForallSO(new, k, subst_so(b, x, tuple(f"p{i}" for i in range(k)),
                                             PredVar(new, tuple(FVar(f"p{i}") for i in range(k)))))
        case ExistsSO(x, k, b):
            return ExistsSO(new, k, subst_so(b, x, tuple(f"p{i}" for i in range(k)),
                                             PredVar(new, tuple(FVar(f"p{i}") for i in range(k)))))
    raise AssertionError(a)


def subst_so(a: Formula, X: str, params: tuple[str, ...], body: Formula) -> Formula:
    """Capture-avoiding A[X(params) := body]."""
    if X not in so_free(a):
        return a
    match a:
        case PredVar(name, args) if name == X:
            if len(args) != len(params):
                raise ValueError(f"arity mismatch for {X}: {len(args)} vs {len(params)}")
            # simultaneous substitution through fresh intermediates
            used = all_names(body) | set(params) | _args_vars(args)
            tmp = []
            for _ in params:
                tmp.append(fresh_name("q", used))
                used.add(tmp[-1])
            out = body
            for p, q in zip(params, tmp):
                out = subst_fo(out, p, FVar(q))
            for q, e in zip(tmp, args):
                out = subst_fo(out, q, e)
            return out
        case ForallSO(Y, _, _) | ExistsSO(Y, _, _):
            if Y == X:
                return a
            if Y in so_free(body):
                a = _rename_so_binder(a, fresh_name(Y, set(so_free(body)) | all_names(a) | {X}))
            return rebuild(a, (subst_so(children(a)[0], X, params, body),))
    y = _fo_binder(a)
    if y is not None and y in fo_free(body) - set(params):
        a = _rename_fo_binder(a, fresh_name(y, fo_free(body) | all_names(a)))
    return rebuild(a, tuple(subst_so(c, X, params, body) for c in children(a)))


def _args_vars(args: tuple[Expr, ...]) -> set[str]:
    out: set[str] = set()
    for e in args:
        out |= expr_vars(e)
    return out


# abbreviations


def expand_once(a: Abbrev) -> Formula:
    """One layer of abbreviation unfolding."""
    taken = all_names(a)
    match a.kind:
        case "bot":
            return ForallSO("X", 0, PredVar("X"))
        case "top":
            return ExistsSO("X", 0, PredVar("X"))
        case "not":
            return Arrow(a.subs[0], BOT)
        case "eq":
            e1, e2 = a.exprs
            z = fresh_name("Z", taken)
            return ForallSO(z, 1, Arrow(PredVar(z, (e1,)), PredVar(z, (e2,))))
        case "natp":
            (e,) = a.exprs
            X = fresh_name("X", taken)
            return ForallSO(X, 0, Arrow(NatRestr(e, PredVar(X)), PredVar(X)))
    x, body = a.var, a.subs[0]
    match a.kind:
        case "fa_N":
            return ForallFO(x, Arrow(Nat(FVar(x)), body))
        case "ex_N":
            return ExistsFO(x, And(Nat(FVar(x)), body))
        case "fa_bv":
            return ForallFO(x, NatRestr(FVar(x), body))
        case "fa_st":
            return ForallFO(x, Arrow(St(FVar(x)), body))
        case "ex_st":
            return ExistsFO(x, And(St(FVar(x)), body))
        case "fa_stbv":
            return ForallFO(x, Arrow(St(FVar(x)), NatRestr(FVar(x), body)))
        case "ex_bv" | "ex_stbv":
            X = fresh_name("X", taken)
            inner = "fa_bv" if a.kind == "ex_bv" else "fa_stbv"
            hyp = Abbrev(inner, x, subs=(Arrow(body, PredVar(X)),))
            return ForallSO(X, 0, Arrow(hyp, PredVar(X)))
    raise ValueError(f"unknown abbreviation {a.kind}")


def expand(a: Formula) -> Formula:
    """Unfold every abbreviation."""
    if isinstance(a, Abbrev):
        return expand(expand_once(a))
    return rebuild(a, tuple(expand(c) for c in children(a)))


def has_abbrev(a: Formula) -> bool:
    return isinstance(a, Abbrev) or any(has_abbrev(c) for c in children(a))


def internal(a: Formula) -> bool:
    """True iff st does not occur once abbreviations are unfolded."""
    match a:
        case St():
            return False
        case Abbrev(kind) if kind in EXTERNAL_ABBREVS:
            return False
    return all(internal(c) for c in children(a))


# congruence normal form


def congr_normalize(a: Formula) -> Formula:
    """Rewrite (exists.A) -> B and (exists.A) |-> B into forall.(A -> B) everywhere."""
    a = rebuild(a, tuple(congr_normalize(c) for c in children(a)))
    match a:
        case Arrow(hyp, body) | ValRestr(hyp, body) if isinstance(hyp, (ExistsFO, ExistsSO)):
            make = Arrow if isinstance(a, Arrow) else ValRestr
            if isinstance(hyp, ExistsFO):
                x, inner = hyp.var, hyp.body
                if x in fo_free(body):
                    new = fresh_name(x, fo_free(body) | all_names(hyp))
                    inner, x = subst_fo(inner, x, FVar(new)), new
                return ForallFO(x, congr_normalize(make(inner, body)))
            X, k, inner = hyp.var, hyp.arity, hyp.body
            if X in so_free(body):
                renamed = _rename_so_binder(hyp, fresh_name(X, set(so_free(body)) | all_names(hyp)))
                X, inner = renamed.var, renamed.body
            return ForallSO(X, k, congr_normalize(make(inner, body)))
    return a


def alpha_eq(a: Formula, b: Formula) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha_expr(e: Expr, f: Expr, ea: dict, eb: dict) -> bool:
    match e, f:
        case FVar(x), FVar(y):
            if (x in ea) != (y in eb):
                return False
            return ea.get(x, x) == eb.get(y, y)
        case FSucc(a), FSucc(b):
            return _alpha_expr(a, b, ea, eb)
        case FFun(g, xs), FFun(h, ys):
            return g == h and len(xs) == len(ys) and all(
                _alpha_expr(a, b, ea, eb) for a, b in zip(xs, ys))
    return _const_value(e) is not None and _const_value(e) == _const_value(f)


def _const_value(e: Expr) -> int | None:
    match e:
        case FZero():
            return 0
        case FNum(n):
            return n
        case FSucc(a):
            v = _const_value(a)
            return None if v is None else v + 1
    return None


def _alpha(a: Formula, b: Formula, ea: dict, eb: dict, d: int) -> bool:
    if type(a) is not type(b):
        return False
    match a, b:
        case PredVar(x, xs), PredVar(y, ys):
            if (x in ea) != (y in eb) or ea.get(x, x) != eb.get(y, y) or len(xs) != len(ys):
                return False
        case Rel(r, _), Rel(q, _):
            if r != q:
                return False
        case (ForallFO(x, _), ForallFO(y, _)) | (ExistsFO(x, _), ExistsFO(y, _)):
            ea, eb, d = {**ea, x: d}, {**eb, y: d}, d + 1
        case (ForallSO(x, k, _), ForallSO(y, j, _)) | (ExistsSO(x, k, _), ExistsSO(y, j, _)):
            if k != j:
                return False
            ea, eb, d = {**ea, x: d}, {**eb, y: d}, d + 1
        case Abbrev(k1, _, _, _), Abbrev(k2, _, _, _):
            if k1 != k2:
                return False
    xs, ys = exprs_of(a), exprs_of(b)
    if len(xs) != len(ys):
        return False
    if not all(_alpha_expr(e, f, ea, eb) for e, f in zip(xs, ys)):
        return False
    if isinstance(a, Abbrev) and a.var is not None:
        # binder abbreviations bind their sub-formula only
        ea, eb, d = {**ea, a.var: d}, {**eb, b.var: d}, d + 1
    ca, cb = children(a), children(b)
    return len(ca) == len(cb) and all(_alpha(p, q, ea, eb, d) for p, q in zip(ca, cb))


# truncation


def truncate(a: Formula, s: int, env: Env) -> Formula:
    """Replace every free first-order variable by its constant value at state s.

    Closed expressions are folded to constants. Only internal formulas are accepted.
    """
    if not internal(a):
        raise ValueError("truncation is only defined for internal formulas")
    return _truncate(a, s, env, frozenset())


def _truncate(a: Formula, s: int, env: Env, bound: frozenset[str]) -> Formula:
    def fix(e: Expr) -> Expr:
        for x in expr_vars(e) - bound:
            e = subst_expr(e, x, const_expr(env[x](s)))
        return fold_expr(e)

    a = map_exprs(a, fix)
    y = _fo_binder(a)
    if y is not None:
        bound = bound | {y}
    return rebuild(a, tuple(_truncate(c, s, env, bound) for c in children(a)))


# printing


def show(a: Formula) -> str:
    return _show(a, 0)


def _args(es: tuple[Expr, ...]) -> str:
    return "(" + ", ".join(show_expr(e) for e in es) + ")"


def _show(a: Formula, level: int) -> str:
    """level: 0 = arrow body, 1 = arrow hypothesis / disjunct, 2 = conjunct, 3 = prefix operand."""
    def wrap(text: str, max_level: int) -> str:
        return text if level <= max_level else f"({text})"

    match a:
        case St(e):
            return f"st({show_expr(e)})"
        case Nat(e):
            return f"Nat({show_expr(e)})"
        case PredVar(x, args):
            return x + (_args(args) if args else "")
        case Rel(r, args):
            return r + _args(args)
        case NatRestr(e, b):
            return wrap(f"Nat({show_expr(e)}) |-> {_show(b, 0)}", 0)
        case ValRestr(h, b):
            return wrap(f"{_show(h, 1)} |-> {_show(b, 0)}", 0)
        case Arrow(h, b):
            return wrap(f"{_show(h, 1)} -> {_show(b, 0)}", 0)
        case Or(l, r):
            return wrap(f"{_show(l, 2)} \\/ {_show(r, 1)}", 1)
        case And(l, r):
            return wrap(f"{_show(l, 3)} /\\ {_show(r, 2)}", 2)
        case ForallFO(x, b):
            return wrap(f"forall {x}. {_show(b, 0)}", 0)
        case ExistsFO(x, b):
            return wrap(f"exists {x}. {_show(b, 0)}", 0)
        case ForallSO(x, k, b):
            return wrap(f"forall2 {x}:{k}. {_show(b, 0)}", 0)
        case ExistsSO(x, k, b):
            return wrap(f"exists2 {x}:{k}. {_show(b, 0)}", 0)
        case Abbrev(kind, x, exprs, subs):
            if kind in ("bot", "top"):
                return kind
            if kind == "not":
                return f"not {_show(subs[0], 3)}"
            if kind in ("eq", "natp"):
                return kind + _args(exprs)
            return wrap(f"{kind} {x}. {_show(subs[0], 0)}", 0)
    raise AssertionError(a)


# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<sym>\|->|->|/\\|\\/|[().,:])|(?P<num>[0-9]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)

_FORMULA_KEYWORDS = {"st", "Nat", "forall", "exists", "forall2", "exists2", "not", "eq", "natp",
                     "bot", "top", *BINDER_ABBREVS}


class FormulaParseError(ValueError):
    pass


class _P:
    def __init__(self, src: str):
        self.src = src
        self.toks: list[tuple[str, str, int]] = []
        i = 0
        while i < len(src):
            if src[i:].strip() == "":
                break
            m = _TOKEN.match(src, i)
            if not m or m.end() == i:
                raise FormulaParseError(f"unexpected character at {i}: {src[i:i + 10]!r}")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            i = m.end()
        self.toks.append(("eof", "", len(src)))
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, msg: str):
        raise FormulaParseError(f"{msg} at position {self.tok[2]} in {self.src!r}")

    def eat(self, text: str):
        if self.tok[1] != text:
            self.fail(f"expected {text!r}")
        self.i += 1

    def ident(self) -> str:
        if self.tok[0] != "ident":
            self.fail("expected identifier")
        self.i += 1
        return self.toks[self.i - 1][1]

    def formula(self) -> Formula:
        left = self.disj()
        if self.tok[1] == "->":
            self.i += 1
            return Arrow(left, self.formula())
        if self.tok[1] == "|->":
            self.i += 1
            body = self.formula()
            if isinstance(left, Nat):
                return NatRestr(left.e, body)
            return ValRestr(left, body)
        return left

    def disj(self) -> Formula:
        left = self.conj()
        if self.tok[1] == "\\/":
            self.i += 1
            return Or(left, self.disj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        if self.tok[1] == "/\\":
            self.i += 1
            return And(left, self.conj())
        return left

    def unary(self) -> Formula:
        kind, text, _ = self.tok
        if kind == "ident":
            if text == "not":
                self.i += 1
                return Not(self.unary())
            if text in ("forall", "exists") or text in BINDER_ABBREVS:
                self.i += 1
                x = self.ident()
                self.eat(".")
                body = self.formula()
                match text:
                    case "forall":
                        return ForallFO(x, body)
                    case "exists":
                        return ExistsFO(x, body)
                return Abbrev(text, x, subs=(body,))
            if text in ("forall2", "exists2"):
                self.i += 1
                x = self.ident()
                self.eat(":")
                if self.tok[0] != "num":
                    self.fail("expected arity")
                k = int(self.tok[1])
                self.i += 1
                self.eat(".")
                body = self.formula()
                return (ForallSO if text == "forall2" else ExistsSO)(x, k, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, text, _ = self.tok
        if text == "(":
            self.i += 1
            inner = self.formula()
            self.eat(")")
            return inner
        if kind != "ident":
            self.fail("expected a formula")
        self.i += 1
        match text:
            case "bot":
                return BOT
            case "top":
                return TOP
            case "st":
                return St(self.single_arg())
            case "Nat":
                return Nat(self.single_arg())
            case "natp":
                return Abbrev("natp", exprs=(self.single_arg(),))
            case "eq":
                args = self.arg_list()
                if len(args) != 2:
                    self.fail("eq takes two arguments")
                return Abbrev("eq", exprs=args)
        if text in _FORMULA_KEYWORDS:
            self.fail(f"misplaced keyword {text!r}")
        args = self.arg_list() if self.tok[1] == "(" else ()
        if text in RELATIONS:
            if len(args) != RELATIONS[text].arity:
                self.fail(f"relation {text} takes {RELATIONS[text].arity} arguments")
            return Rel(text, args)
        return PredVar(text, args)

    def single_arg(self) -> Expr:
        args = self.arg_list()
        if len(args) != 1:
            self.fail("expected one argument")
        return args[0]

    def arg_list(self) -> tuple[Expr, ...]:
        self.eat("(")
        if self.tok[1] == ")":
            self.i += 1
            return ()
        args = [self.expr()]
        while self.tok[1] == ",":
            self.i += 1
            args.append(self.expr())
        self.eat(")")
        return tuple(args)

    def expr(self) -> Expr:
        kind, text, _ = self.tok
        if kind == "num":
            self.i += 1
            return const_expr(int(text))
        if kind != "ident":
            self.fail("expected an expression")
        self.i += 1
        if text == "S" and self.tok[1] == "(":
            args = self.arg_list()
            if len(args) != 1:
                self.fail("S takes one argument")
            return FSucc(args[0])
        if text in FUNCTIONS:
            args = self.arg_list()
            if len(args) != FUNCTIONS[text].arity:
                self.fail(f"function {text} takes {FUNCTIONS[text].arity} arguments")
            return FFun(text, args)
        return FVar(text)


def parse_formula(src: str) -> Formula:
    p = _P(src)
    a = p.formula()
    if p.tok[0] != "eof":
        p.fail("trailing input")
    return a


def parse_expr(src: str) -> Expr:
    p = _P(src)
    e = p.expr()
    if p.tok[0] != "eof":
        p.fail("trailing input")
    return e
