"""Individuals (functions from states to naturals), standardness, valuations, test predicates."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .arith import FUNCTIONS
from .formulas import Expr, FFun, FNum, FSucc, FVar, FZero, eval_expr
from .machine import FuelExhausted, Normal, run
from .terms import DAGGER, Term, numeral, numeral_value

PROBE_RANGE = range(0, 65)


class Status(enum.Enum):
    MEMBER = "member"
    NONMEMBER = "nonmember"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


# certificates


@dataclass(frozen=True)
class Standard:
    value: int


@dataclass(frozen=True)
class Nonstandard:
    s1: int
    s2: int


@dataclass(frozen=True)
class Unknown:
    pass


Certificate = Standard | Nonstandard | Unknown


class Standardness(enum.Enum):
    STANDARD = "standard"
    NONSTANDARD = "nonstandard"
    UNKNOWN = "unknown"


class CertificateError(ValueError):
    pass


# individuals


class Individual:
    def __call__(self, s: int) -> int:
        raise NotImplementedError

    def certificate(self) -> Certificate:
        return Unknown()

    def __str__(self) -> str:
        return self.literal()

    def literal(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Individual):
    n: int

    def __call__(self, s: int) -> int:
        return self.n

    def certificate(self) -> Certificate:
        return Standard(self.n)

    def literal(self) -> str:
        return f"const {self.n}"


@dataclass(frozen=True)
class Diagonal(Individual):
    def __call__(self, s: int) -> int:
        return s

    def certificate(self) -> Certificate:
        return Nonstandard(0, 1)

    def literal(self) -> str:
        return "delta"


@dataclass(frozen=True)
class Mod(Individual):
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("mod needs a positive modulus")

    def __call__(self, s: int) -> int:
        return s % self.k

    def certificate(self) -> Certificate:
        return Standard(0) if self.k == 1 else Nonstandard(0, 1)

    def literal(self) -> str:
        return f"mod {self.k}"


@dataclass(frozen=True)
class TableThenConstant(Individual):
    prefix: tuple[int, ...]
    tail: int

    def __call__(self, s: int) -> int:
        return self.prefix[s] if s < len(self.prefix) else self.tail

    def certificate(self) -> Certificate:
        for i, v in enumerate(self.prefix):
            if v != self.tail:
                return Nonstandard(i, len(self.prefix))
        return Standard(self.tail)

    def literal(self) -> str:
        return f"table [{', '.join(map(str, self.prefix))}] then {self.tail}"


_INFIX = {"add": "+", "mul": "*"}


@dataclass(frozen=True)
class Pointwise(Individual):
    """op applied pointwise to child individuals; op is 'succ' or a registered function."""

    op: str
    children: tuple[Individual, ...]

    def __call__(self, s: int) -> int:
        vals = [c(s) for c in self.children]
        if self.op == "succ":
            return vals[0] + 1
        return FUNCTIONS[self.op].fn(*vals)

    def certificate(self) -> Certificate:
        certs = [c.certificate() for c in self.children]
        if all(isinstance(c, Standard) for c in certs):
            return Standard(self(0))
        return _sample_certificate(self, PROBE_RANGE)

    def literal(self) -> str:
        if self.op in _INFIX:
            a, b = self.children
            return f"({a.literal()} {_INFIX[self.op]} {b.literal()})"
        return f"{self.op}({', '.join(c.literal() for c in self.children)})"


@dataclass(frozen=True)
class Opaque(Individual):
    """An arbitrary function with no certificate."""

    fn: Callable[[int], int] = field(compare=False)
    label: str = "opaque"

    def __call__(self, s: int) -> int:
        return self.fn(s)

    def literal(self) -> str:
        return self.label


def _sample_certificate(f: Individual, probe: range) -> Certificate:
    first = f(probe[0])
    for s in probe:
        if f(s) != first:
            return Nonstandard(probe[0], s)
    return Unknown()


def is_standard(f: Individual, probe: range = PROBE_RANGE) -> Standardness:
    """Certificate-driven standardness; certificates are re-validated on the probe range."""
    match f.certificate():
        case Standard(n):
            bad = next((s for s in probe if f(s) != n), None)
            if bad is not None:
                raise CertificateError(f"{f.literal()} claims constant {n} but is {f(bad)} at {bad}")
            return Standardness.STANDARD
        case Nonstandard(s1, s2):
            if f(s1) == f(s2):
                raise CertificateError(f"{f.literal()}: evidence states {s1},{s2} agree")
            return Standardness.NONSTANDARD
    match _sample_certificate(f, probe):
        case Nonstandard():
            return Standardness.NONSTANDARD
    return Standardness.UNKNOWN


def pointwise(op: str, *children: Individual) -> Individual:
    """Pointwise combination, folded to a constant when every child is a constant."""
    if all(isinstance(c, Constant) for c in children):
        return Constant(Pointwise(op, children)(0))
    return Pointwise(op, children)


# individual literals: const n | delta | mod k | table [a,b] then n | f + g | f * g | fn(f, ...) | (f)

_LIT = re.compile(r"\s*(?:(?P<num>\d+)|(?P<word>[a-z_]+)|(?P<sym>[\[\],()+*]))")


class IndividualParseError(ValueError):
    pass


def parse_individual(src: str) -> Individual:
    toks: list[str] = []
    i = 0
    while i < len(src):
        if not src[i:].strip():
            break
        m = _LIT.match(src, i)
        if not m or m.end() == i:
            raise IndividualParseError(f"bad individual literal {src!r} at {i}")
        toks.append(m.group(m.lastgroup))
        i = m.end()
    pos = 0

    def peek() -> str | None:
        return toks[pos] if pos < len(toks) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(toks) or (expected is not None and toks[pos] != expected):
            raise IndividualParseError(f"expected {expected or 'token'} in {src!r}")
        pos += 1
        return toks[pos - 1]

    def number() -> int:
        t = take()
        if not t.isdigit():
            raise IndividualParseError(f"expected a number in {src!r}")
        return int(t)

    def atom() -> Individual:
        t = take()
        match t:
            case "const":
                return Constant(number())
            case "delta":
                return Diagonal()
            case "mod":
                return Mod(number())
            case "table":
                take("[")
                vals = []
                while peek() != "]":
                    vals.append(number())
                    if peek() == ",":
                        take(",")
                take("]")
                take("then")
                return TableThenConstant(tuple(vals), number())
            case "(":
                inner = sum_()
                take(")")
                return inner
        if t.isdigit():
            return Constant(int(t))
        if t in FUNCTIONS or t == "succ":
            take("(")
            args = [sum_()]
            while peek() == ",":
                take(",")
                args.append(sum_())
            take(")")
            want = 1 if t == "succ" else FUNCTIONS[t].arity
            if len(args) != want:
                raise IndividualParseError(f"{t} takes {want} argument(s) in {src!r}")
            return pointwise(t, *args)
        raise IndividualParseError(f"unknown individual {t!r} in {src!r}")

    def product() -> Individual:
        out = atom()
        while peek() == "*":
            take()
            out = pointwise("mul", out, atom())
        return out

    def sum_() -> Individual:
        out = product()
        while peek() == "+":
            take()
            out = pointwise("add", out, product())
        return out

    result = sum_()
    if pos != len(toks):
        raise IndividualParseError(f"trailing input in {src!r}")
    return result


# semantic predicates


@dataclass(frozen=True)
class SemPredicate:
    """A truth value: decides membership of (term, state) within a fuel budget."""

    describe: str
    decide: Callable[[Term, int, int], Status] = field(compare=False)
    samples: tuple[Term, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class PredicateFamily:
    """A function from k naturals to truth values."""

    name: str
    arity: int
    at: Callable[..., SemPredicate] = field(compare=False)

    def __call__(self, *values: int) -> SemPredicate:
        if len(values) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} arguments, got {len(values)}")
        return self.at(*values)


def normalizes_to(n: int) -> SemPredicate:
    """Terms reaching the numeral n from the given state (in any final state)."""

    def decide(t: Term, s: int, fuel: int) -> Status:
        tr = run(t, s, fuel)
        match tr.outcome:
            case Normal(cfg) if numeral_value(cfg.term) == n:
                return Status.MEMBER
            case FuelExhausted():
                return Status.UNKNOWN
        return Status.NONMEMBER

    return SemPredicate(f"normalizes to #{n}", decide, (numeral(n),))


TOTAL = SemPredicate("every term", lambda t, s, fuel: Status.MEMBER, (DAGGER,))
EMPTY = SemPredicate("no term", lambda t, s, fuel: Status.NONMEMBER)


def family_normalizes(arity: int, index: int = 0) -> PredicateFamily:
    """n1..nk -> normalizes to n_index (arity 0 means normalizes to #index)."""
    if arity == 0:
        return PredicateFamily(f"nf{index}", 0, lambda: normalizes_to(index))
    return PredicateFamily(f"nf_arg{index}/{arity}", arity, lambda *ns: normalizes_to(ns[index]))


def family_total(arity: int) -> PredicateFamily:
    return PredicateFamily(f"total/{arity}", arity, lambda *ns: TOTAL)


def family_empty(arity: int) -> PredicateFamily:
    return PredicateFamily(f"empty/{arity}", arity, lambda *ns: EMPTY)


def family_by_name(name: str) -> PredicateFamily:
    """nf<i> (arity 0), nf_arg<i>/<k>, total/<k>, empty/<k>."""
    m = re.fullmatch(r"nf(\d+)|nf_arg(\d+)/(\d+)|(total|empty)/(\d+)", name.strip())
    if not m:
        raise ValueError(f"unknown predicate family {name!r}")
    if m.group(1) is not None:
        return family_normalizes(0, int(m.group(1)))
    if m.group(2) is not None:
        i, k = int(m.group(2)), int(m.group(3))
        if i >= k:
            raise ValueError(f"argument index out of range in {name!r}")
        return family_normalizes(k, i)
    k = int(m.group(5))
    return family_total(k) if m.group(4) == "total" else family_empty(k)


def apply_predicate(F: PredicateFamily, fs: list[Individual], t: Term, s: int, fuel: int) -> Status:
    """Membership of (t, s) in F applied to individuals, pointwise at s."""
    if len(fs) != F.arity:
        raise ValueError(f"arity mismatch: {F.name} takes {F.arity}, got {len(fs)}")
    return F(*(f(s) for f in fs)).decide(t, s, fuel)


# valuations


@dataclass(frozen=True)
class Valuation:
    fo: Mapping[str, Individual] = field(default_factory=dict)
    so: Mapping[str, PredicateFamily] = field(default_factory=dict)

    def bind(self, x: str, f: Individual) -> Valuation:
        return Valuation({**self.fo, x: f}, self.so)

    def bind_so(self, X: str, F: PredicateFamily) -> Valuation:
        return Valuation(self.fo, {**self.so, X: F})

    def value(self, e: Expr, s: int) -> int:
        return eval_expr(e, self.fo, s)

    def individual(self, e: Expr) -> Individual:
        match e:
            case FVar(x):
                if x not in self.fo:
                    raise KeyError(f"unbound first-order variable {x}")
                return self.fo[x]
            case FZero():
                return Constant(0)
            case FNum(n):
                return Constant(n)
            case FSucc(a):
                return pointwise("succ", self.individual(a))
            case FFun(f, args):
                return pointwise(f, *(self.individual(a) for a in args))
        raise AssertionError(e)


def default_valuation(**fo: Individual) -> Valuation:
    """Valuation where `delta` names the diagonal."""
    return Valuation({"delta": Diagonal(), **fo}, {})
