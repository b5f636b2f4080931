"""Terms of the stateful lambda calculus: AST, values, substitution, parsing, printing."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property


class Term:
    """Base class for all term nodes. Subclasses are frozen dataclasses."""

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return _free_vars(self)

    def is_closed(self) -> bool:
        return not self.free_vars

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str


@dataclass(frozen=True, eq=True)
class Zero(Term):
    pass


@dataclass(frozen=True, eq=True)
class Succ(Term):
    pass


@dataclass(frozen=True, eq=True)
class Rec(Term):
    pass


@dataclass(frozen=True, eq=True)
class Get(Term):
    pass


@dataclass(frozen=True, eq=True)
class Set(Term):
    pass


@dataclass(frozen=True, eq=True)
class Dagger(Term):
    pass


@dataclass(frozen=True, eq=True)
class Const(Term):
    """Inert named constant. Used for probes such as TAG_L/TAG_R or an opaque `t`."""

    name: str


@dataclass(frozen=True, eq=True)
class Abs(Term):
    binder: str
    body: Term


@dataclass(frozen=True, eq=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, eq=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, eq=True)
class Proj1(Term):
    t: Term


@dataclass(frozen=True, eq=True)
class Proj2(Term):
    t: Term


@dataclass(frozen=True, eq=True)
class Inl(Term):
    t: Term


@dataclass(frozen=True, eq=True)
class Inr(Term):
    t: Term


@dataclass(frozen=True, eq=True)
class Case(Term):
    scrutinee: Term
    left_binder: str
    left_body: Term
    right_binder: str
    right_body: Term


ZERO = Zero()
SUCC = Succ()
REC = Rec()
GET = Get()
SET = Set()
DAGGER = Dagger()

_EMPTY: frozenset[str] = frozenset()


def _free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Abs(x, body):
            return body.free_vars - {x}
        case App(f, a):
            return f.free_vars | a.free_vars
        case Pair(a, b):
            return a.free_vars | b.free_vars
        case Proj1(u) | Proj2(u) | Inl(u) | Inr(u):
            return u.free_vars
        case Case(sc, x, l, y, r):
            return sc.free_vars | (l.free_vars - {x}) | (r.free_vars - {y})
        case _:
            return _EMPTY


# numerals


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are natural numbers")
    t: Term = ZERO
    for _ in range(n):
        t = App(SUCC, t)
    return t


def numeral_value(t: Term) -> int | None:
    """The n with t = S^n 0, or None."""
    n = 0
    while True:
        match t:
            case Zero():
                return n
            case App(Succ(), inner):
                n += 1
                t = inner
            case _:
                return None


def is_numeral(t: Term) -> bool:
    return numeral_value(t) is not None


def is_value(t: Term) -> bool:
    """Values: 0, S V, \\x.t, (V, V), inl V, inr V, dagger."""
    while True:
        match t:
            case Zero() | Abs() | Dagger():
                return True
            case App(Succ(), v) | Inl(v) | Inr(v):
                t = v
            case Pair(a, b):
                return is_value(a) and is_value(b)
            case _:
                return False


# substitution


def fresh(base: str, avoid: frozenset[str] | set[str]) -> str:
    """Smallest `base<k>` not in avoid."""
    stem = base.rstrip("0123456789") or "v"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def substitute(t: Term, x: str, u: Term) -> Term:
    """t[u/x], renaming binders of t that would capture free variables of u."""
    if x not in t.free_vars:
        return t
    return _subst(t, x, u, u.free_vars)


def _subst_binder(y: str, body: Term, x: str, u: Term, fu: frozenset[str]) -> tuple[str, Term]:
    if y == x:
        return y, body
    if y in fu and x in body.free_vars:
        z = fresh(y, fu | body.free_vars | {x})
        body = _subst(body, y, Var(z), frozenset((z,)))
        y = z
    return y, _subst(body, x, u, fu)


def _subst(t: Term, x: str, u: Term, fu: frozenset[str]) -> Term:
    if x not in t.free_vars:
        return t
    match t:
        case Var():
            return u
        case Abs(y, body):
            y, body = _subst_binder(y, body, x, u, fu)
            return Abs(y, body)
        case App(f, a):
            return App(_subst(f, x, u, fu), _subst(a, x, u, fu))
        case Pair(a, b):
            return Pair(_subst(a, x, u, fu), _subst(b, x, u, fu))
        case Proj1(v):
            return Proj1(_subst(v, x, u, fu))
        case Proj2(v):
            return Proj2(_subst(v, x, u, fu))
        case Inl(v):
            return Inl(_subst(v, x, u, fu))
        case Inr(v):
            return Inr(_subst(v, x, u, fu))
        case Case(sc, y1, l, y2, r):
            y1, l = _subst_binder(y1, l, x, u, fu)
            y2, r = _subst_binder(y2, r, x, u, fu)
            return Case(_subst(sc, x, u, fu), y1, l, y2, r)
    raise AssertionError(t)


def substitute_many(t: Term, env: dict[str, Term]) -> Term:
    """Sequential substitution of closed terms for free variables."""
    for x, u in env.items():
        t = substitute(t, x, u)
    return t


def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, ea: dict[str, int], eb: dict[str, int], d: int) -> bool:
    match a, b:
        case Var(x), Var(y):
            if (x in ea) != (y in eb):
                return False
            return ea.get(x, x) == eb.get(y, y)
        case Abs(x, s), Abs(y, t):
            return _alpha(s, t, {**ea, x: d}, {**eb, y: d}, d + 1)
        case App(f, s), App(g, t):
            return _alpha(f, g, ea, eb, d) and _alpha(s, t, ea, eb, d)
        case Pair(a1, a2), Pair(b1, b2):
            return _alpha(a1, b1, ea, eb, d) and _alpha(a2, b2, ea, eb, d)
        case (Proj1(s), Proj1(t)) | (Proj2(s), Proj2(t)) | (Inl(s), Inl(t)) | (Inr(s), Inr(t)):
            return _alpha(s, t, ea, eb, d)
        case Case(s, x1, l1, x2, r1), Case(t, y1, l2, y2, r2):
            return (
                _alpha(s, t, ea, eb, d)
                and _alpha(l1, l2, {**ea, x1: d}, {**eb, y1: d}, d + 1)
                and _alpha(r1, r2, {**ea, x2: d}, {**eb, y2: d}, d + 1)
            )
        case _:
            return type(a) is type(b) and a == b


def app(*ts: Term) -> Term:
    """Left-nested application."""
    out = ts[0]
    for t in ts[1:]:
        out = App(out, t)
    return out


def lam(binders: str, body: Term) -> Term:
    for x in reversed(binders.split()):
        body = Abs(x, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Head and argument list of a left-nested application."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# printing

_ATOMS = {Zero: "0", Succ: "S", Rec: "rec", Get: "get", Set: "set", Dagger: "dagger"}


def show(t: Term) -> str:
    return _show(t, "top")


def _show(t: Term, pos: str) -> str:
    match t:
        case Var(name):
            return name
        case Const(name):
            return "'" + name
        case Zero() | Succ() | Rec() | Get() | Set() | Dagger():
            return _ATOMS[type(t)]
        case Abs():
            binders = []
            while isinstance(t, Abs):
                binders.append(t.binder)
                t = t.body
            text = "\\" + " ".join(binders) + ". " + _show(t, "top")
            return text if pos == "top" else f"({text})"
        case App(f, a):
            n = numeral_value(t)
            if n is not None:
                return f"#{n}"
            text = _show(f, "fun") + " " + _show(a, "arg")
            return f"({text})" if pos == "arg" else text
        case Pair(a, b):
            return f"({_show(a, 'top')}, {_show(b, 'top')})"
        case Proj1(u) | Proj2(u) | Inl(u) | Inr(u):
            kw = {Proj1: "p1", Proj2: "p2", Inl: "inl", Inr: "inr"}[type(t)]
            text = f"{kw} {_show(u, 'arg')}"
            return f"({text})" if pos == "arg" else text
        case Case(sc, x, l, y, r):
            text = (
                f"case {_show(sc, 'top')} {{ inl {x} -> {_show(l, 'top')}"
                f" | inr {y} -> {_show(r, 'top')} }}"
            )
            return text if pos == "top" else f"({text})"
    raise AssertionError(t)


# parsing

KEYWORDS = {"S", "rec", "get", "set", "dagger", "p1", "p2", "inl", "inr", "case"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\#[0-9]+)
  | (?P<const>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<zero>0)
  | (?P<punct>[\\λ.(),{}|])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, src: str):
        super().__init__(f"{msg} at position {pos}: {src[max(0, pos - 10):pos + 10]!r}")
        self.pos = pos


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            raise ParseError("unexpected character", i, src)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), i))
        i = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


@dataclass
class _Parser:
    src: str
    toks: list[_Tok]
    i: int = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str):
        raise ParseError(msg, self.tok.pos, self.src)

    def eat(self, text: str) -> None:
        if self.tok.text != text:
            self.fail(f"expected {text!r}")
        self.i += 1

    def ident(self) -> str:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            self.fail("expected identifier")
        name = self.tok.text
        self.i += 1
        return name

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("num", "const", "ident", "zero"):
            return True
        return t.text in ("(", "\\", "λ")

    def term(self) -> Term:
        head = self.atom()
        while self.starts_atom():
            head = App(head, self.atom())
        return head

    def atom(self) -> Term:
        t = self.tok
        match t.kind:
            case "num":
                self.i += 1
                return numeral(int(t.text[1:]))
            case "const":
                self.i += 1
                return Const(t.text[1:])
            case "zero":
                self.i += 1
                return ZERO
        if t.text in ("\\", "λ"):
            self.i += 1
            binders = [self.ident()]
            while self.tok.text != ".":
                binders.append(self.ident())
            self.eat(".")
            return lam(" ".join(binders), self.term())
        if t.text == "(":
            self.i += 1
            first = self.term()
            if self.tok.text == ",":
                self.i += 1
                second = self.term()
                self.eat(")")
                return Pair(first, second)
            self.eat(")")
            return first
        if t.kind != "ident":
            self.fail("expected a term")
        self.i += 1
        match t.text:
            case "S":
                return SUCC
            case "rec":
                return REC
            case "get":
                return GET
            case "set":
                return SET
            case "dagger":
                return DAGGER
            case "p1":
                return Proj1(self.atom())
            case "p2":
                return Proj2(self.atom())
            case "inl":
                return Inl(self.atom())
            case "inr":
                return Inr(self.atom())
            case "case":
                sc = self.term()
                self.eat("{")
                self.eat("inl")
                x = self.ident()
                self.eat("->")
                left = self.term()
                self.eat("|")
                self.eat("inr")
                y = self.ident()
                self.eat("->")
                right = self.term()
                self.eat("}")
                return Case(sc, x, left, y, right)
        return Var(t.text)


def parse_term(src: str) -> Term:
    p = _Parser(src, tokenize(src))
    t = p.term()
    if p.tok.kind != "eof":
        p.fail("trailing input")
    return t
