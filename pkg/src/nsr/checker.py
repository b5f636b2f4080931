"""Bounded, observation-based membership checking for truth values at a state.

Verdicts are member / nonmember / unknown. Implication is tested against finite
generator sets, quantifiers against finite sets of test individuals and predicate
families, so a member verdict is only as strong as those sets (see Verdict.flags).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .formulas import (
    Abbrev, And, Arrow, ExistsFO, ExistsSO, ForallFO, ForallSO, Formula, Nat, NatRestr, Or,
    PredVar, Rel, St, ValRestr, expand_once, internal, show as show_formula, truncate,
)
from .arith import RELATIONS
from .individuals import (
    Constant, Diagonal, Individual, Mod, PredicateFamily, Standardness, Status, Valuation,
    family_empty, family_normalizes, family_total, is_standard, normalizes_to,
)
from .machine import Config, FuelExhausted, Normal, Stuck, default_fuel, run, step
from .terms import (
    DAGGER, Abs, App, Case, Const, Pair, Proj1, Proj2, Term, Var, Inl, Inr, numeral,
    numeral_value, parse_term, show, spine,
)

MEMBER, NONMEMBER, UNKNOWN = Status.MEMBER, Status.NONMEMBER, Status.UNKNOWN

GENERATOR_BOUNDED = "generator-bounded"
VACUOUS = "vacuous"
OBSERVATION = "observation"

TAG_L, TAG_R = Const("TAGL"), Const("TAGR")
PROBE_P = parse_term(r"\x y. (x, y)")
PROBE_P_ST = parse_term(r"\w x y. (x, y)")
IDENTITY = parse_term(r"\x. x")

MAX_GENERATORS = 48


class UncheckableFormula(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    status: Status
    flags: frozenset[str] = frozenset()
    reason: str = ""

    @property
    def member(self) -> bool:
        return self.status is MEMBER

    def with_flags(self, *flags: str) -> Verdict:
        return replace(self, flags=self.flags | frozenset(flags))

    def __str__(self) -> str:
        out = str(self.status)
        if self.flags:
            out += " [" + ", ".join(sorted(self.flags)) + "]"
        return out


def _member(*flags: str) -> Verdict:
    return Verdict(MEMBER, frozenset(flags))


def _non(reason: str) -> Verdict:
    return Verdict(NONMEMBER, reason=reason)


def _unknown(reason: str) -> Verdict:
    return Verdict(UNKNOWN, reason=reason)


def _all(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction: the first nonmember wins, then any unknown, else member."""
    flags: frozenset[str] = frozenset()
    pending = None
    all_vacuous = True
    for v in verdicts:
        if v.status is NONMEMBER:
            return v
        if v.status is UNKNOWN and pending is None:
            pending = v
        flags |= v.flags
        all_vacuous &= VACUOUS in v.flags
    if pending is not None:
        return pending
    # vacuity survives a conjunction only if every part was vacuous
    return Verdict(MEMBER, flags if all_vacuous else flags - {VACUOUS})


def _any(verdicts: Iterable[Verdict], what: str) -> Verdict:
    """Disjunction over candidates: the first member wins."""
    pending = None
    for v in verdicts:
        if v.status is MEMBER:
            return v
        if v.status is UNKNOWN and pending is None:
            pending = v
    return pending or _non(f"no {what} works")


def default_individuals() -> tuple[Individual, ...]:
    return tuple(Constant(n) for n in range(9)) + (Diagonal(), Mod(2))


def default_predicates() -> dict[int, tuple[PredicateFamily, ...]]:
    return {
        0: (family_normalizes(0, 0), family_normalizes(0, 1), family_total(0)),
        1: (family_normalizes(1, 0), family_total(1), family_empty(1)),
        2: (family_normalizes(2, 0), family_normalizes(2, 1), family_total(2)),
    }


@dataclass(frozen=True)
class CheckConfig:
    fuel: int = field(default_factory=default_fuel)
    states: range = range(0, 9)
    individuals: tuple[Individual, ...] = field(default_factory=default_individuals)
    predicates: Mapping[int, tuple[PredicateFamily, ...]] = field(default_factory=default_predicates)
    generators: tuple[Term, ...] = ()
    generators_for: Mapping[str, tuple[Term, ...]] = field(default_factory=dict)
    atoms: str = "slice"

    def __post_init__(self):
        if len(self.states) == 0:
            raise ValueError("state range must be nonempty")
        if not self.individuals:
            raise ValueError("test individuals must be nonempty")
        if self.atoms not in ("slice", "saturated"):
            raise ValueError(f"atoms must be 'slice' or 'saturated', not {self.atoms!r}")

    def families(self, arity: int) -> tuple[PredicateFamily, ...]:
        if arity in self.predicates:
            return self.predicates[arity]
        return (family_normalizes(arity, 0), family_total(arity))


# reduction walks


def _segments(t: Term, s: int, fuel: int, until=None):
    """Run t from s; return (outcome, [(term, state)] at each point the state changes).

    With `until`, stop (outcome None) at the first new state satisfying it.
    """
    cfg = Config(t, s)
    firsts = []
    for _ in range(fuel):
        nxt = step(cfg)
        if nxt is None:
            return run(cfg.term, cfg.state, 0).outcome, firsts
        new, _rule = nxt
        if new.state != cfg.state:
            firsts.append((new.term, new.state))
            if until is not None and until(new.state):
                return None, firsts
        cfg = new
    if step(cfg) is None:
        return run(cfg.term, cfg.state, 0).outcome, firsts
    return FuelExhausted(cfg), firsts


def _observe(t: Term, s: int, fuel: int):
    return run(t, s, fuel).outcome


def _tag_probe(t: Term) -> Term:
    return Case(t, "x", App(TAG_L, Var("x")), "x", App(TAG_R, Var("x")))


# membership


def member(a: Formula, rho: Valuation, t: Term, s: int, cfg: CheckConfig | None = None) -> Verdict:
    """Membership of (t, s) in the truth value of a under rho."""
    cfg = cfg or CheckConfig()
    match a:
        case St(e):
            match is_standard(rho.individual(e)):
                case Standardness.STANDARD:
                    return _member()
                case Standardness.NONSTANDARD:
                    return _non(f"{e} is nonstandard")
            return _unknown(f"standardness of {e} undetermined")
        case Rel(r, args):
            return _check_atom(lambda st: RELATIONS[r].decide(*(rho.value(e, st) for e in args)),
                               show_formula(a), t, s, cfg)
        case PredVar(x, args):
            return _check_predvar(a, rho, t, s, cfg)
        case Nat(e):
            out = _observe(t, s, cfg.fuel)
            match out:
                case Normal(Config(v, s2)) if numeral_value(v) is not None:
                    at = s2 if cfg.atoms == "saturated" else s
                    want = rho.value(e, at)
                    if numeral_value(v) == want:
                        return _member()
                    return _non(f"reached #{numeral_value(v)}, expected #{want}")
                case FuelExhausted():
                    return _unknown("fuel exhausted")
            return _non("does not reach a numeral")
        case NatRestr(e, b):
            return member(b, rho, App(t, numeral(rho.value(e, s))), s, cfg)
        case ValRestr():
            raise UncheckableFormula("general value restriction is not checkable")
        case Arrow(h, b):
            return _check_arrow(h, b, rho, t, s, cfg)
        case And(l, r):
            return _all([member(l, rho, Proj1(t), s, cfg), member(r, rho, Proj2(t), s, cfg)])
        case Or(l, r):
            return _check_or(l, r, rho, t, s, cfg)
        case ForallFO(x, b):
            return _all(member(b, rho.bind(x, f), t, s, cfg) for f in cfg.individuals)
        case ExistsFO(x, b):
            return _any((member(b, rho.bind(x, f), t, s, cfg) for f in cfg.individuals), "individual")
        case ForallSO(x, k, b):
            return _all(member(b, rho.bind_so(x, F), t, s, cfg) for F in cfg.families(k))
        case ExistsSO(x, k, b):
            return _any((member(b, rho.bind_so(x, F), t, s, cfg) for F in cfg.families(k)),
                        "predicate")
        case Abbrev():
            return _check_abbrev(a, rho, t, s, cfg)
    raise UncheckableFormula(f"unknown formula node {a!r}")


def _check_atom(holds, label: str, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    if holds(s):
        return _member()
    if cfg.atoms == "slice":
        return _non(f"{label} fails at state {s}")
    out, firsts = _segments(t, s, cfg.fuel, holds)
    if any(holds(s2) for _, s2 in firsts):
        return _member()
    if isinstance(out, FuelExhausted):
        return _unknown(f"{label} fails at every state reached before fuel ran out")
    return _non(f"{label} fails at every state reached from {s}")


def _check_predvar(a: PredVar, rho: Valuation, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    if a.name not in rho.so:
        raise UncheckableFormula(f"unbound predicate variable {a.name}")
    F = rho.so[a.name]

    def at(u: Term, st: int) -> Status:
        return F(*(rho.value(e, st) for e in a.args)).decide(u, st, cfg.fuel)

    first = at(t, s)
    if first is MEMBER or cfg.atoms == "slice":
        return Verdict(first, reason="" if first is MEMBER else f"not in {F.name} at {s}")
    _, firsts = _segments(t, s, cfg.fuel)
    if any(at(u, s2) is MEMBER for u, s2 in firsts):
        return _member()
    return Verdict(first, reason=f"not in {F.name} at {s} or later segments")


def _check_or(l: Formula, r: Formula, rho: Valuation, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    out = _observe(_tag_probe(t), s, cfg.fuel)
    match out:
        case Normal(Config(v, s2)):
            head, args = spine(v)
            if head in (TAG_L, TAG_R) and len(args) == 1:
                if s2 != s:
                    return _non(f"injection reached in state {s2}, not {s}")
                return member(l if head == TAG_L else r, rho, args[0], s, cfg)
            return _non(f"case probe ends in {show(v)}")
        case FuelExhausted():
            return _unknown("fuel exhausted under the case probe")
        case Stuck(_, reason):
            return _non(f"case probe stuck: {reason}")
    raise AssertionError(out)


def _check_arrow(h: Formula, b: Formula, rho: Valuation, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    used = 0
    pending = None
    flags = {GENERATOR_BOUNDED}
    for g in generators(h, rho, s, cfg):
        vh = member(h, rho, g, s, cfg)
        if vh.status is not MEMBER:
            continue
        used += 1
        vb = member(b, rho, App(t, g), s, cfg)
        if vb.status is NONMEMBER:
            return _non(f"fails on generator {show(g)}: {vb.reason}")
        if vb.status is UNKNOWN and pending is None:
            pending = vb
        flags |= vb.flags
    if pending is not None:
        return pending
    if used == 0:
        flags.add(VACUOUS)
    return Verdict(MEMBER, frozenset(flags))


def _check_abbrev(a: Abbrev, rho: Valuation, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    match a.kind:
        case "natp":
            (e,) = a.exprs
            want = rho.value(e, s)
            out = _observe(App(t, IDENTITY), s, cfg.fuel)
            match out:
                case Normal(Config(v, s2)) if numeral_value(v) is not None:
                    if s2 != s:
                        return _non(f"state changed from {s} to {s2}")
                    if numeral_value(v) != want:
                        return _non(f"observed #{numeral_value(v)}, expected #{want}")
                    return _member(OBSERVATION)
                case FuelExhausted():
                    return _unknown("fuel exhausted")
            return _non("t (\\x. x) does not reach a numeral")
        case "ex_bv" | "ex_stbv":
            return _check_exists_bv(a, rho, t, s, cfg)
        case "bot":
            v0 = normalizes_to(0).decide(t, s, cfg.fuel)
            v1 = normalizes_to(1).decide(t, s, cfg.fuel)
            if NONMEMBER in (v0, v1):
                return _non("bottom: the two disjoint test predicates cannot both hold")
            return _unknown("fuel exhausted")
    return member(expand_once(a), rho, t, s, cfg)


def _check_exists_bv(a: Abbrev, rho: Valuation, t: Term, s: int, cfg: CheckConfig) -> Verdict:
    standard = a.kind == "ex_stbv"
    try:
        n, u, _ = extract_witness(t, s, cfg, probe=PROBE_P_ST if standard else PROBE_P)
    except ExtractionError as exc:
        if exc.unknown:
            return _unknown(str(exc))
        return _non(str(exc))
    body, x = a.subs[0], a.var
    candidates: list[Individual] = [Constant(n)]
    if not standard:
        candidates += [f for f in cfg.individuals if f(s) == n and f != Constant(n)]
    v = _any((member(body, rho.bind(x, f), u, s, cfg) for f in candidates), "witness individual")
    return v.with_flags(OBSERVATION) if v.member else v


# generators


def generators(h: Formula, rho: Valuation, s: int, cfg: CheckConfig) -> list[Term]:
    """Candidate realizers for a hypothesis, deduplicated, in a fixed order."""
    out: list[Term] = []
    seen: set[Term] = set()
    for g in (*cfg.generators, *cfg.generators_for.get(show_formula(h), ()),
              *_auto_generators(h, rho, s, cfg, 2)):
        if g not in seen:
            seen.add(g)
            out.append(g)
        if len(out) >= MAX_GENERATORS:
            break
    return out


def _auto_generators(h: Formula, rho: Valuation, s: int, cfg: CheckConfig, depth: int) -> list[Term]:
    if depth < 0:
        return []
    sub = lambda a, r=rho: _auto_generators(a, r, s, cfg, depth - 1)  # noqa: E731
    match h:
        case St() | Rel():
            return [DAGGER]
        case Nat(e):
            return [numeral(rho.value(e, s))]
        case PredVar(x, args) if x in rho.so:
            return list(rho.so[x](*(rho.value(e, s) for e in args)).samples)
        case NatRestr(_, b):
            return [Abs("n", g) for g in sub(b)]
        case Arrow(_, b):
            return [Abs("x", g) for g in sub(b)]
        case And(l, r):
            return [Pair(g1, g2) for g1 in sub(l)[:6] for g2 in sub(r)[:6]]
        case Or(l, r):
            return [Inl(g) for g in sub(l)] + [Inr(g) for g in sub(r)]
        case ForallFO(x, b) | ExistsFO(x, b):
            out = []
            for f in cfg.individuals:
                out += sub(b, rho.bind(x, f))
            return out
        case ForallSO(x, k, b) | ExistsSO(x, k, b):
            out = []
            for F in cfg.families(k):
                out += sub(b, rho.bind_so(x, F))
            return out
        case Abbrev(kind="natp", exprs=(e,)):
            return [Abs("k", App(Var("k"), numeral(rho.value(e, s))))]
        case Abbrev(kind="ex_bv" | "ex_stbv" as kind, var=x, subs=(b,)):
            # canonical introductions \k. k n g (with a standardness argument for ex_stbv)
            out = []
            for f in cfg.individuals:
                if kind == "ex_stbv" and is_standard(f) is not Standardness.STANDARD:
                    continue
                k = App(Var("k"), DAGGER) if kind == "ex_stbv" else Var("k")
                for g in sub(b, rho.bind(x, f))[:4]:
                    out.append(Abs("k", App(App(k, numeral(f(s))), g)))
            return out
        case Abbrev(kind="bot"):
            return []
        case Abbrev():
            return _auto_generators(expand_once(h), rho, s, cfg, depth)
    return []


# universal realizers


@dataclass
class UniversalReport:
    formula: Formula
    term: Term
    per_state: dict[int, Verdict]

    @property
    def verdict(self) -> Verdict:
        return _all(self.per_state[s] for s in sorted(self.per_state))

    @property
    def status(self) -> Status:
        return self.verdict.status

    def unknown_states(self) -> list[int]:
        return [s for s, v in sorted(self.per_state.items()) if v.status is UNKNOWN]

    def summary(self) -> str:
        lines = [f"{s}: {v}" + (f" ({v.reason})" if v.reason else "")
                 for s, v in sorted(self.per_state.items())]
        return "\n".join(lines)


def universal(a: Formula, rho: Valuation, t: Term, cfg: CheckConfig | None = None) -> UniversalReport:
    cfg = cfg or CheckConfig()
    return UniversalReport(a, t, {s: member(a, rho, t, s, cfg) for s in cfg.states})


# witness extraction


class ExtractionError(ValueError):
    def __init__(self, msg: str, unknown: bool = False):
        super().__init__(msg)
        self.unknown = unknown


@dataclass(frozen=True)
class Witness:
    value: int
    payload: Term
    state: int

    def __iter__(self):
        return iter((self.value, self.payload, self.state))


def extract_witness(t: Term, s: int, cfg: CheckConfig | None = None, probe: Term = PROBE_P) -> Witness:
    """Run t P from s and read off (numeral, payload); the state must not change."""
    cfg = cfg or CheckConfig()
    out = run(App(t, probe), s, cfg.fuel).outcome
    match out:
        case FuelExhausted():
            raise ExtractionError("fuel exhausted", unknown=True)
        case Stuck(_, reason):
            raise ExtractionError(f"stuck: {reason}")
        case Normal(Config(Pair(n, u), s2)) if numeral_value(n) is not None:
            if s2 != s:
                raise ExtractionError(f"state changed from {s} to {s2}")
            return Witness(numeral_value(n), u, s2)
        case Normal(Config(v, _)):
            raise ExtractionError(f"non-pair normal form {show(v)}")
    raise AssertionError(out)


# glueing


@dataclass(frozen=True)
class GlueingResult:
    agree: bool
    sliced: Verdict
    truncated: Verdict
    inconclusive: bool = False


def glueing_check(a: Formula, rho: Valuation, t: Term, s: int, cfg: CheckConfig | None = None) -> GlueingResult:
    """Compare membership of (t, s) in a against membership in its truncation at s."""
    cfg = cfg or CheckConfig()
    if not internal(a):
        raise ValueError("glueing is stated for internal formulas only")
    sliced = member(a, rho, t, s, cfg)
    trunc = member(truncate(a, s, rho.fo), rho, t, s, cfg)
    if UNKNOWN in (sliced.status, trunc.status):
        return GlueingResult(True, sliced, trunc, inconclusive=True)
    return GlueingResult(sliced.status is trunc.status, sliced, trunc)


# disjunction probes


def tag_observation(t: Term, s: int, cfg: CheckConfig | None = None) -> tuple[str, Term, int] | None:
    """Run the case probe on t; return ('left'|'right', payload, state) or None."""
    cfg = cfg or CheckConfig()
    out = _observe(_tag_probe(t), s, cfg.fuel)
    if isinstance(out, Normal):
        head, args = spine(out.config.term)
        if head in (TAG_L, TAG_R) and len(args) == 1:
            return ("left" if head == TAG_L else "right"), args[0], out.config.state
    return None
