"""Deterministic small-step reduction with a single monotone memory cell.

Call-by-name is the reference strategy. Call-by-value exists for comparison only.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field
from typing import Union

from .terms import (
    App, Abs, Case, Const, Dagger, Get, Inl, Inr, Pair, Proj1, Proj2, Rec, Set, Succ,
    Term, Var, Zero, REC, SET, SUCC, app, numeral, numeral_value, show, spine, substitute,
)

# Unary numerals nest one frame per successor.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_FUEL = 100_000

STUCK_REASONS = (
    "apply-nonfunction",
    "project-nonpair",
    "case-noninjection",
    "set-nonnumeral",
    "rec-nonnumeral",
    "dagger-forced",
    "free-variable",
)


def default_fuel() -> int:
    raw = os.environ.get("NSR_FUEL")
    return int(raw) if raw else DEFAULT_FUEL


@dataclass(frozen=True)
class Config:
    term: Term
    state: int = 0


@dataclass(frozen=True)
class Normal:
    config: Config
    name = "Normal"


@dataclass(frozen=True)
class Stuck:
    config: Config
    reason: str
    name = "Stuck"


@dataclass(frozen=True)
class FuelExhausted:
    config: Config
    name = "FuelExhausted"


Outcome = Union[Normal, Stuck, FuelExhausted]

# step results: a (term, state, rule) triple, or a halting reason
_NORMAL = "normal"
_Step = Union[tuple, str]


def _wrap(r: _Step, rebuild) -> _Step:
    if isinstance(r, tuple):
        return rebuild(r[0]), r[1], r[2]
    return r


def _red_cbn(t: Term, s: int) -> _Step:
    match t:
        case Get():
            return numeral(s), s, "get"
        case Proj1(p) | Proj2(p):
            first = isinstance(t, Proj1)
            if isinstance(p, Pair):
                return (p.left if first else p.right), s, ("proj1" if first else "proj2")
            r = _red_cbn(p, s)
            if r == _NORMAL:
                return "project-nonpair"
            return _wrap(r, Proj1 if first else Proj2)
        case Case(sc, x, left, y, right):
            match sc:
                case Inl(u):
                    return substitute(left, x, u), s, "case-inl"
                case Inr(u):
                    return substitute(right, y, u), s, "case-inr"
            r = _red_cbn(sc, s)
            if r == _NORMAL:
                return "case-noninjection"
            return _wrap(r, lambda v: Case(v, x, left, y, right))
        case App():
            return _red_cbn_app(t, s)
        case Var():
            return "free-variable"
    return _NORMAL


def _red_cbn_app(t: Term, s: int) -> _Step:
    head, args = spine(t)
    match head:
        case Abs(x, body):
            return app(substitute(body, x, args[0]), *args[1:]), s, "beta"
        case Rec():
            if len(args) < 3:
                return _NORMAL
            u0, u1, n, rest = args[0], args[1], args[2], args[3:]
            match n:
                case Zero():
                    return app(u0, *rest), s, "rec-0"
                case App(Succ(), m):
                    return app(u1, m, app(REC, u0, u1, m), *rest), s, "rec-S"
            r = _red_cbn(n, s)
            if r == _NORMAL:
                return "rec-nonnumeral"
            return _wrap(r, lambda v: app(REC, u0, u1, v, *rest))
        case Set():
            if len(args) < 2:
                return _NORMAL
            k = numeral_value(args[0])
            if k is not None:
                return app(args[1], *args[2:]), max(k, s), "set"
            r = _red_cbn(args[0], s)
            if r == _NORMAL:
                return "set-nonnumeral"
            return _wrap(r, lambda v: app(SET, v, *args[1:]))
        case Succ():
            if numeral_value(args[0]) is None:
                r = _red_cbn(args[0], s)
                if r != _NORMAL:
                    return _wrap(r, lambda v: app(SUCC, v, *args[1:]))
            return _NORMAL if len(args) == 1 else "apply-nonfunction"
        case Const():
            return _NORMAL
        case Dagger():
            return "dagger-forced"
        case Var():
            return "free-variable"
        case Get() | Proj1() | Proj2() | Case():
            r = _red_cbn(head, s)
            if r == _NORMAL:
                return "apply-nonfunction"
            return _wrap(r, lambda v: app(v, *args))
    return "apply-nonfunction"


def _red_cbv(t: Term, s: int) -> _Step:
    match t:
        case Var():
            return "free-variable"
        case Get():
            return numeral(s), s, "get"
        case Pair(a, b):
            r = _red_cbv(a, s)
            if r != _NORMAL:
                return _wrap(r, lambda v: Pair(v, b))
            return _wrap(_red_cbv(b, s), lambda v: Pair(a, v))
        case Inl(u):
            return _wrap(_red_cbv(u, s), Inl)
        case Inr(u):
            return _wrap(_red_cbv(u, s), Inr)
        case Proj1(p) | Proj2(p):
            first = isinstance(t, Proj1)
            r = _red_cbv(p, s)
            if r != _NORMAL:
                return _wrap(r, Proj1 if first else Proj2)
            if isinstance(p, Pair):
                return (p.left if first else p.right), s, ("proj1" if first else "proj2")
            return "project-nonpair"
        case Case(sc, x, left, y, right):
            r = _red_cbv(sc, s)
            if r != _NORMAL:
                return _wrap(r, lambda v: Case(v, x, left, y, right))
            match sc:
                case Inl(u):
                    return substitute(left, x, u), s, "case-inl"
                case Inr(u):
                    return substitute(right, y, u), s, "case-inr"
            return "case-noninjection"
        case App(f, a):
            r = _red_cbv(f, s)
            if r != _NORMAL:
                return _wrap(r, lambda v: App(v, a))
            r = _red_cbv(a, s)
            if r != _NORMAL:
                return _wrap(r, lambda v: App(f, v))
            return _apply_cbv(f, a, s)
    return _NORMAL


def _apply_cbv(f: Term, a: Term, s: int) -> _Step:
    if isinstance(f, Abs):
        return substitute(f.body, f.binder, a), s, "beta"
    head, args = spine(f)
    match head:
        case Rec():
            if len(args) < 2:
                return _NORMAL
            u0, u1 = args
            match a:
                case Zero():
                    return u0, s, "rec-0"
                case App(Succ(), m):
                    return app(u1, m, app(REC, u0, u1, m)), s, "rec-S"
            return "rec-nonnumeral"
        case Set():
            if not args:
                return _NORMAL
            k = numeral_value(args[0])
            if k is None:
                return "set-nonnumeral"
            return a, max(k, s), "set"
        case Succ():
            return _NORMAL if not args else "apply-nonfunction"
        case Const():
            return _NORMAL
        case Dagger():
            return "dagger-forced"
    return "apply-nonfunction"


_STRATEGIES = {"cbn": _red_cbn, "cbv": _red_cbv}


def step(c: Config, strategy: str = "cbn") -> tuple[Config, str] | None:
    """One reduction step, or None when no rule applies (value, neutral, or stuck)."""
    r = _STRATEGIES[strategy](c.term, c.state)
    if isinstance(r, tuple):
        return Config(r[0], r[1]), r[2]
    return None


def halt_reason(c: Config, strategy: str = "cbn") -> str | None:
    """None if c can step; 'normal' or a stuck reason otherwise."""
    r = _STRATEGIES[strategy](c.term, c.state)
    return None if isinstance(r, tuple) else r


@dataclass
class Trace:
    start: Config
    steps: list[tuple[Config, str]] = field(default_factory=list)
    outcome: Outcome | None = None
    strategy: str = "cbn"
    step_count: int = 0

    @property
    def final(self) -> Config:
        return self.steps[-1][0] if self.steps else self.start

    @property
    def configs(self) -> list[Config]:
        return [self.start] + [c for c, _ in self.steps]

    @property
    def states(self) -> list[int]:
        return [c.state for c in self.configs]

    @property
    def normal(self) -> bool:
        return isinstance(self.outcome, Normal)

    def result_line(self) -> str:
        out = self.outcome
        label = out.name if not isinstance(out, Stuck) else f"Stuck:{out.reason}"
        return f"RESULT {label} {out.config.state} {show(out.config.term)}"

    def export(self) -> str:
        lines = [f"{c.state} | {rule} | {show(c.term)}" for c, rule in self.steps]
        lines.append(self.result_line())
        return "\n".join(lines)

    def export_json_lines(self) -> str:
        lines = [
            json.dumps({"step": i + 1, "state": c.state, "rule": rule, "term": show(c.term)})
            for i, (c, rule) in enumerate(self.steps)
        ]
        lines.append(json.dumps(self.result_json()))
        return "\n".join(lines)

    def result_json(self) -> dict:
        out = self.outcome
        d = {"outcome": out.name, "state": out.config.state, "term": show(out.config.term),
             "steps": len(self.steps)}
        if isinstance(out, Stuck):
            d["reason"] = out.reason
        return d


def reduce(c: Config, fuel: int | None = None, strategy: str = "cbn", record: bool = True) -> Trace:
    """Iterate step until a normal form, a stuck configuration, or fuel runs out.

    With record=False only the last configuration is kept (the step count is still exact).
    """
    if fuel is None:
        fuel = default_fuel()
    red = _STRATEGIES[strategy]
    trace = Trace(c, strategy=strategy)
    t, s = c.term, c.state
    n = 0
    last_rule = None
    while True:
        r = red(t, s)
        if not isinstance(r, tuple):
            cfg = Config(t, s)
            trace.outcome = Normal(cfg) if r == _NORMAL else Stuck(cfg, r)
            break
        if n >= fuel:
            trace.outcome = FuelExhausted(Config(t, s))
            break
        t, s, last_rule = r
        n += 1
        if record:
            trace.steps.append((Config(t, s), last_rule))
    trace.step_count = n
    return trace


def reduce_cbv(c: Config, fuel: int | None = None, record: bool = True) -> Trace:
    return reduce(c, fuel, strategy="cbv", record=record)


def run(term: Term, state: int = 0, fuel: int | None = None, strategy: str = "cbn",
        record: bool = False) -> Trace:
    return reduce(Config(term, state), fuel, strategy, record)


def neutral_head(t: Term) -> str | None:
    """Name of the inert constant heading t, if any."""
    head, _ = spine(t)
    return head.name if isinstance(head, Const) else None


__all__ = [
    "Config", "Normal", "Stuck", "FuelExhausted", "Trace", "step", "reduce", "reduce_cbv", "run",
    "halt_reason", "DEFAULT_FUEL", "STUCK_REASONS", "default_fuel", "neutral_head",
]
