"""Claim files: a line-oriented corpus of operational claims and a runner for it.

    CLAIM storage-T
    ANCHOR storage operator forces a numeral argument
    KIND reduce
    FOR n 0..32
    FOR s 0..8
    TERM T 'k #{n}
    STATE {s}
    OUTCOME Normal
    END-TERM 'k #{n}
    END-STATE {s}

FOR lines expand one claim into several (ids get a `[n=..,s=..]` suffix). `{expr}`
placeholders are evaluated over the FOR variables with a small arithmetic whitelist.
"""

from __future__ import annotations

import ast
import itertools
import json
import operator
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import checker as ck
from .arith import FUNCTIONS, RELATIONS, next_odd
from .formulas import (
    Abbrev, Arrow, FormulaParseError, Formula, FVar, Or, Rel, eval_expr, parse_formula,
)
from .individuals import (
    Individual, IndividualParseError, Status, Valuation, default_valuation, family_by_name,
    parse_individual,
)
from .machine import Stuck, default_fuel, run
from .realizers import UnknownRealizer, build, term as lib_term
from .terms import App, DAGGER, ParseError, Term, alpha_eq, numeral, show

KINDS = ("reduce", "member", "universal", "extract", "llpo", "idealize", "glueing")

# keys that may repeat; every other key may appear at most once
_MULTI = {"FOR", "BIND", "PRED", "DEVIATION", "OVERRIDE", "VERDICT-AT"}

_SETUP = {"TERM", "FORMULA", "STATE", "RANGE", "STRATEGY", "FUEL", "BIND", "PRED", "INDIVIDUALS",
          "GENERATORS", "ATOMS", "OVERRIDE", "PREMISE", "LEFT", "RIGHT", "RELATION", "TAU",
          "MAX-M"}
_EXPECT = {"OUTCOME", "END-STATE", "END-STATE-MIN", "END-TERM", "RULES", "STEPS", "VERDICT",
           "FLAGS", "VERDICT-AT", "WITNESS", "PAYLOAD", "ERROR", "SIDE", "SIDES",
           "PREMISE-VERDICT", "PAYLOAD-VERDICT", "CONCLUSION-VERDICT", "AGREE"}
_META = {"CLAIM", "ANCHOR", "KIND", "FOR", "DEVIATION"}


class ClaimFileError(ValueError):
    def __init__(self, msg: str, path: str = "<string>", line: int = 0):
        super().__init__(f"{path}:{line}: {msg}")
        self.path, self.line = path, line


@dataclass
class Claim:
    id: str
    anchor: str
    kind: str
    fields: dict[str, list[str]]
    deviations: list[str] = field(default_factory=list)
    path: str = "<string>"
    line: int = 0

    def get(self, key: str, default: str | None = None) -> str | None:
        vals = self.fields.get(key)
        return vals[-1] if vals else default

    def all(self, key: str) -> list[str]:
        return self.fields.get(key, [])


# template expressions

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod}
_CALLS = {"max": max, "min": min, "next_odd": next_odd,
          **{name: f.fn for name, f in FUNCTIONS.items()}}


def eval_template_expr(src: str, env: dict[str, int]) -> int:
    """Evaluate integer arithmetic over FOR variables (no names beyond env and _CALLS)."""

    def go(node) -> int:
        match node:
            case ast.Expression(body):
                return go(body)
            case ast.Constant(value) if isinstance(value, int):
                return value
            case ast.Name(id) if id in env:
                return env[id]
            case ast.BinOp(l, op, r) if type(op) in _BINOPS:
                return _BINOPS[type(op)](go(l), go(r))
            case ast.Call(ast.Name(fn), args, []) if fn in _CALLS:
                return _CALLS[fn](*(go(a) for a in args))
        raise ValueError(f"unsupported template expression {src!r}")

    return go(ast.parse(src, mode="eval"))


_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")


def _render(text: str, env: dict[str, int]) -> str:
    if not env:
        return text
    # `{ inl ...` inside case terms has spaces or arrows; only plain expressions are templates
    def sub(m: re.Match) -> str:
        inner = m.group(1).strip()
        if not inner or not re.fullmatch(r"[\w\s+\-*/%(),]+", inner):
            return m.group(0)
        return str(eval_template_expr(inner, env))
    return _PLACEHOLDER.sub(sub, text)


def _parse_range(src: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", src)
    if not m:
        raise ValueError(f"expected a range a..b, got {src!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if b < a:
        raise ValueError(f"empty range {src!r}")
    return range(a, b + 1)


# parsing


def parse_claims(text: str, path: str = "<string>") -> list[Claim]:
    raw: list[tuple[int, dict[str, list[str]]]] = []
    current: dict[str, list[str]] | None = None
    for i, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, _, value = stripped.partition(" ")
        value = value.strip()
        if key == "CLAIM":
            if not value:
                raise ClaimFileError("CLAIM needs an id", path, i)
            current = {"CLAIM": [value]}
            raw.append((i, current))
            continue
        if current is None:
            raise ClaimFileError(f"{key} outside a CLAIM block", path, i)
        if key not in _SETUP | _EXPECT | _META:
            raise ClaimFileError(f"unknown key {key!r}", path, i)
        if key in current and key not in _MULTI:
            raise ClaimFileError(f"duplicate key {key!r}", path, i)
        current.setdefault(key, []).append(value)

    claims = []
    seen = set()
    for line, fields in raw:
        cid = fields["CLAIM"][0]
        if "ANCHOR" not in fields:
            raise ClaimFileError(f"claim {cid} has no ANCHOR", path, line)
        kind = fields.get("KIND", [""])[0]
        if kind not in KINDS:
            raise ClaimFileError(f"claim {cid}: unknown KIND {kind!r}", path, line)
        loops = []
        for decl in fields.get("FOR", []):
            var, _, rng = decl.partition(" ")
            try:
                loops.append((var, _parse_range(rng)))
            except ValueError as exc:
                raise ClaimFileError(f"claim {cid}: {exc}", path, line) from None
        envs = [dict(zip([v for v, _ in loops], combo))
                for combo in itertools.product(*(r for _, r in loops))] if loops else [{}]
        for env in envs:
            suffix = ("[" + ",".join(f"{k}={v}" for k, v in env.items()) + "]") if env else ""
            try:
                rendered = {k: [_render(v, env) for v in vs] for k, vs in fields.items()
                            if k not in ("CLAIM", "KIND", "FOR", "ANCHOR", "DEVIATION")}
            except ValueError as exc:
                raise ClaimFileError(f"claim {cid}: {exc}", path, line) from None
            c = Claim(cid + suffix, fields["ANCHOR"][0], kind, rendered,
                      fields.get("DEVIATION", []), path, line)
            if c.id in seen:
                raise ClaimFileError(f"duplicate claim id {c.id}", path, line)
            seen.add(c.id)
            claims.append(c)
    return claims


def load_claims(path: str | Path) -> list[Claim]:
    p = Path(path)
    return parse_claims(p.read_text(), str(p))


def shipped_corpus() -> list[Path]:
    root = resources.files("nsr") / "corpus"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".claims"))


def collect_paths(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out += sorted(p.glob("*.claims"))
        elif p.exists():
            out.append(p)
        elif raw.rstrip("/") == "corpus":
            out += shipped_corpus()
        else:
            raise FileNotFoundError(raw)
    return out


# results


@dataclass
class ClaimResult:
    id: str
    kind: str
    status: str  # pass | fail | unknown | error
    details: list[str] = field(default_factory=list)
    deviations: list[str] = field(default_factory=list)

    def line(self) -> str:
        return f"{self.status.upper():7} {self.id}"

    def json(self) -> dict:
        d = {"id": self.id, "kind": self.kind, "status": self.status}
        if self.details:
            d["details"] = self.details
        if self.deviations:
            d["deviations"] = self.deviations
        return d


class _Outcome:
    """Accumulates expectation checks for one claim."""

    def __init__(self):
        self.failures: list[str] = []
        self.unknowns: list[str] = []
        self.notes: list[str] = []

    def expect(self, ok: bool, msg: str) -> None:
        if not ok:
            self.failures.append(msg)

    def verdict(self, label: str, got: ck.Verdict, want: str | None, flags: str | None = None) -> None:
        if want is None:
            return
        if got.status.value != want:
            if got.status is Status.UNKNOWN:
                self.unknowns.append(f"{label}: unknown ({got.reason}), expected {want}")
            else:
                self.failures.append(f"{label}: got {got}, expected {want}"
                                     + (f" ({got.reason})" if got.reason else ""))
            return
        if flags is not None:
            want_flags = frozenset() if flags.strip() in ("", "none") else \
                frozenset(f.strip() for f in flags.split(","))
            if got.flags != want_flags:
                self.failures.append(f"{label}: flags {sorted(got.flags)}, expected {sorted(want_flags)}")

    def status(self) -> str:
        if self.failures:
            return "fail"
        if self.unknowns:
            return "unknown"
        return "pass"


# claim setup helpers


def _overrides(c: Claim) -> dict[str, str]:
    out = {}
    for o in c.all("OVERRIDE"):
        k, eq, v = o.partition("=")
        if not eq:
            raise ValueError(f"bad OVERRIDE {o!r}")
        out[k.strip()] = v.strip()
    return out


def _term(c: Claim, src: str) -> Term:
    return lib_term(src, _overrides(c))


def _formula(src: str) -> Formula:
    return parse_formula(src)


def _fuel(c: Claim, fuel: int | None) -> int:
    if fuel is not None:
        return fuel
    return int(c.get("FUEL")) if c.get("FUEL") else default_fuel()


def _valuation(c: Claim) -> Valuation:
    rho = default_valuation()
    for b in c.all("BIND"):
        x, eq, lit = b.partition("=")
        if not eq:
            raise ValueError(f"bad BIND {b!r}")
        rho = rho.bind(x.strip(), parse_individual(lit))
    for b in c.all("PRED"):
        x, eq, fam = b.partition("=")
        if not eq:
            raise ValueError(f"bad PRED {b!r}")
        rho = rho.bind_so(x.strip(), family_by_name(fam))
    return rho


def _individuals(c: Claim, extra: tuple[Individual, ...] = ()) -> tuple[Individual, ...]:
    src = c.get("INDIVIDUALS")
    if src is None:
        base = ck.default_individuals()
    else:
        base = ()
        for item in (s.strip() for s in src.split(";")):
            if item == "default":
                base += ck.default_individuals()
            elif item:
                base += (parse_individual(item),)
    return base + tuple(f for f in extra if f not in base)


def _config(c: Claim, fuel: int | None, extra: tuple[Individual, ...] = ()) -> ck.CheckConfig:
    gens = tuple(_term(c, g) for g in (c.get("GENERATORS") or "").split(";;") if g.strip())
    return ck.CheckConfig(
        fuel=_fuel(c, fuel),
        states=_parse_range(c.get("RANGE", "0..8")),
        individuals=_individuals(c, extra),
        generators=gens,
        atoms=c.get("ATOMS", "slice"),
    )


def _state(c: Claim) -> int:
    return int(c.get("STATE", "0"))


# runners


def _run_reduce(c: Claim, out: _Outcome, fuel: int | None) -> None:
    t = _term(c, c.get("TERM"))
    strategy = c.get("STRATEGY", "cbn")
    tr = run(t, _state(c), _fuel(c, fuel), strategy, record=c.get("RULES") is not None)
    res = tr.outcome
    out.notes.append(tr.result_line())
    if c.get("OUTCOME"):
        label = res.name if not isinstance(res, Stuck) else f"Stuck:{res.reason}"
        out.expect(label == c.get("OUTCOME"), f"outcome {label}, expected {c.get('OUTCOME')}")
    if c.get("END-STATE"):
        out.expect(res.config.state == int(c.get("END-STATE")),
                   f"end state {res.config.state}, expected {c.get('END-STATE')}")
    if c.get("END-STATE-MIN"):
        out.expect(res.config.state >= int(c.get("END-STATE-MIN")),
                   f"end state {res.config.state} below {c.get('END-STATE-MIN')}")
    if c.get("END-TERM"):
        want = _term(c, c.get("END-TERM"))
        out.expect(alpha_eq(res.config.term, want),
                   f"end term {show(res.config.term)}, expected {show(want)}")
    if c.get("RULES") is not None:
        rules = [r for _, r in tr.steps]
        want = [r.strip() for r in c.get("RULES").split(",") if r.strip()]
        out.expect(rules == want, f"rules {','.join(rules)}, expected {','.join(want)}")
    if c.get("STEPS"):
        out.expect(tr.step_count == int(c.get("STEPS")), f"{tr.step_count} steps, expected {c.get('STEPS')}")


def _run_member(c: Claim, out: _Outcome, fuel: int | None) -> None:
    a = _formula(c.get("FORMULA"))
    t = _term(c, c.get("TERM"))
    cfg = _config(c, fuel)
    v = ck.member(a, _valuation(c), t, _state(c), cfg)
    out.notes.append(f"verdict {v}" + (f" ({v.reason})" if v.reason else ""))
    out.verdict("verdict", v, c.get("VERDICT"), c.get("FLAGS"))


def _run_universal(c: Claim, out: _Outcome, fuel: int | None) -> None:
    a = _formula(c.get("FORMULA"))
    t = _term(c, c.get("TERM"))
    cfg = _config(c, fuel)
    rep = ck.universal(a, _valuation(c), t, cfg)
    out.notes.append(f"verdict {rep.verdict}")
    out.verdict("universal verdict", rep.verdict, c.get("VERDICT"), c.get("FLAGS"))
    for decl in c.all("VERDICT-AT"):
        s, _, want = decl.partition(" ")
        out.verdict(f"verdict at {s}", rep.per_state[int(s)], want.strip())


def _run_extract(c: Claim, out: _Outcome, fuel: int | None) -> None:
    t = _term(c, c.get("TERM"))
    cfg = ck.CheckConfig(fuel=_fuel(c, fuel))
    try:
        w = ck.extract_witness(t, _state(c), cfg)
    except ck.ExtractionError as exc:
        out.notes.append(f"error: {exc}")
        if c.get("ERROR") is not None:
            out.expect(c.get("ERROR") in str(exc), f"error {exc!s}, expected {c.get('ERROR')!r}")
        elif exc.unknown:
            out.unknowns.append(str(exc))
        else:
            out.failures.append(f"extraction failed: {exc}")
        return
    out.notes.append(f"witness {w.value} payload {show(w.payload)} state {w.state}")
    out.expect(c.get("ERROR") is None, f"expected error {c.get('ERROR')!r}, extraction succeeded")
    if c.get("WITNESS"):
        out.expect(w.value == int(c.get("WITNESS")), f"witness {w.value}, expected {c.get('WITNESS')}")
    if c.get("END-STATE"):
        out.expect(w.state == int(c.get("END-STATE")), f"state {w.state}, expected {c.get('END-STATE')}")
    if c.get("PAYLOAD"):
        want = _term(c, c.get("PAYLOAD"))
        out.expect(alpha_eq(w.payload, want), f"payload {show(w.payload)}, expected {show(want)}")


@dataclass
class LlpoRun:
    state: int
    side: str | None
    payload: Term | None
    end_state: int | None
    payload_verdict: ck.Verdict | None = None


def run_llpo(premise: Term, left: Formula, right: Formula, states: range, cfg: ck.CheckConfig,
             realizer: Term | None = None, rho: Valuation | None = None) -> tuple[ck.UniversalReport, list[LlpoRun]]:
    """Check the premise, run the realizer under the case probe, check the chosen payload.

    left is A with free x, right is B with free y; the premise formula is
    fa_stbv x. fa_stbv y. A \\/ B.
    """
    rho = rho or default_valuation()
    realizer = realizer if realizer is not None else build("t_llpo")
    hyp = Abbrev("fa_stbv", "x", subs=(Abbrev("fa_stbv", "y", subs=(Or(left, right),)),))
    premise_report = ck.universal(hyp, rho, premise, cfg)
    runs = []
    for s in states:
        obs = ck.tag_observation(App(realizer, premise), s, cfg)
        if obs is None:
            runs.append(LlpoRun(s, None, None, None))
            continue
        side, payload, s2 = obs
        body = Abbrev("fa_stbv", "x", subs=(left,)) if side == "left" else Abbrev("fa_stbv", "y", subs=(right,))
        v = ck.member(body, rho, payload, s, cfg) if s2 == s else None
        runs.append(LlpoRun(s, side, payload, s2, v))
    return premise_report, runs


def _run_llpo(c: Claim, out: _Outcome, fuel: int | None) -> None:
    cfg = _config(c, fuel)
    left, right = _formula(c.get("LEFT")), _formula(c.get("RIGHT"))
    premise = _term(c, c.get("PREMISE"))
    realizer = _term(c, c.get("TERM", "t_llpo"))
    rep, runs = run_llpo(premise, left, right, cfg.states, cfg, realizer, _valuation(c))
    out.verdict("premise", rep.verdict, c.get("PREMISE-VERDICT"))
    sides = [r.side or "none" for r in runs]
    out.notes.append("sides " + ",".join(sides))
    if c.get("SIDE"):
        out.expect(all(x == c.get("SIDE") for x in sides), f"sides {','.join(sides)}, expected all {c.get('SIDE')}")
    if c.get("SIDES"):
        want = [x.strip() for x in c.get("SIDES").split(",")]
        out.expect(sides == want, f"sides {','.join(sides)}, expected {','.join(want)}")
    for r in runs:
        if r.side is not None:
            out.expect(r.end_state == r.state, f"state {r.state}: tag reached in state {r.end_state}")
    if c.get("PAYLOAD-VERDICT"):
        for r in runs:
            if r.payload_verdict is not None:
                out.verdict(f"payload at {r.state}", r.payload_verdict, c.get("PAYLOAD-VERDICT"))


def _run_idealize(c: Claim, out: _Outcome, fuel: int | None) -> None:
    rel = _formula(c.get("RELATION"))
    tau = parse_individual(c.get("TAU")) if c.get("TAU") else None
    cfg = _config(c, fuel, (tau,) if tau else ())
    rho = _valuation(c)
    premise = _term(c, c.get("PREMISE"))
    hyp = Abbrev("fa_stbv", "n", subs=(Abbrev("ex_bv", "x", subs=(Abbrev("fa_stbv", "y", subs=(
        Arrow(Rel("le", (FVar("y"), FVar("n"))), rel),)),)),))
    prem = ck.universal(hyp, rho, premise, cfg)
    out.verdict("premise", prem.verdict, c.get("PREMISE-VERDICT"))
    if prem.verdict.status is not Status.MEMBER:
        out.notes.append(f"premise {prem.verdict} ({prem.verdict.reason})")
        return
    ideal_u = App(build("ideal"), premise)
    max_m = int(c.get("MAX-M", "0"))
    for s in cfg.states:
        try:
            w = ck.extract_witness(ideal_u, s, cfg)
        except ck.ExtractionError as exc:
            out.failures.append(f"state {s}: extraction failed: {exc}")
            continue
        if tau is not None:
            out.expect(w.value == tau(s), f"state {s}: witness {w.value}, expected tau({s}) = {tau(s)}")
        out.expect(w.state == s, f"state {s}: extraction changed the state")
        # second component: apply to a standardness proof and m, check R at the post-set state
        for m in range(0, s + max_m + 1):
            tr = run(App(App(w.payload, DAGGER), numeral(m)), s, cfg.fuel)
            s2 = tr.outcome.config.state
            try:
                tau_s2 = ck.extract_witness(ideal_u, s2, cfg).value
            except ck.ExtractionError as exc:
                out.failures.append(f"state {s2}: extraction failed: {exc}")
                continue
            env = {"x": lambda _s, v=tau_s2: v, "y": lambda _s, v=m: v}
            holds = RELATIONS[rel.name].decide(*(eval_expr(e, env, s2) for e in rel.args))
            out.expect(holds, f"state {s}, m={m}: relation fails at post-set state {s2} with witness {tau_s2}")
    if c.get("CONCLUSION-VERDICT"):
        concl = Abbrev("ex_bv", "x", subs=(Abbrev("fa_stbv", "y", subs=(rel,)),))
        rep = ck.universal(Arrow(hyp, concl), rho, build("ideal"),
                           replace(cfg, generators=cfg.generators + (premise,)))
        out.notes.append(f"conclusion {rep.verdict}")
        out.verdict("conclusion", rep.verdict, c.get("CONCLUSION-VERDICT"), c.get("FLAGS"))


def _run_glueing(c: Claim, out: _Outcome, fuel: int | None) -> None:
    a = _formula(c.get("FORMULA"))
    t = _term(c, c.get("TERM"))
    cfg = _config(c, fuel)
    g = ck.glueing_check(a, _valuation(c), t, _state(c), cfg)
    out.notes.append(f"sliced {g.sliced}, truncated {g.truncated}")
    if g.inconclusive:
        out.unknowns.append("inconclusive (unknown verdict)")
    want = c.get("AGREE", "yes") == "yes"
    out.expect(g.agree == want, f"agreement {g.agree}, expected {want}")


_RUNNERS = {"reduce": _run_reduce, "member": _run_member, "universal": _run_universal,
            "extract": _run_extract, "llpo": _run_llpo, "idealize": _run_idealize,
            "glueing": _run_glueing}


def run_claim(c: Claim, fuel: int | None = None) -> ClaimResult:
    out = _Outcome()
    try:
        _RUNNERS[c.kind](c, out, fuel)
    except (ParseError, FormulaParseError, IndividualParseError, UnknownRealizer, ValueError,
            ck.UncheckableFormula, KeyError, TypeError) as exc:
        return ClaimResult(c.id, c.kind, "error", [f"{type(exc).__name__}: {exc}"], c.deviations)
    details = out.failures + out.unknowns + (out.notes if out.failures or out.unknowns else [])
    return ClaimResult(c.id, c.kind, out.status(), details, c.deviations)


@dataclass
class Report:
    results: list[ClaimResult]

    @property
    def totals(self) -> dict[str, int]:
        t = {"pass": 0, "fail": 0, "unknown": 0, "error": 0}
        for r in self.results:
            t[r.status] += 1
        return t

    @property
    def exit_code(self) -> int:
        t = self.totals
        if t["fail"] or t["error"]:
            return 1
        if t["unknown"]:
            return 2
        return 0

    def text(self, verbose: bool = False) -> str:
        lines = []
        for r in self.results:
            lines.append(r.line())
            if r.status != "pass" or verbose:
                lines += [f"        {d}" for d in r.details]
            if verbose:
                lines += [f"        deviation: {d}" for d in r.deviations]
        t = self.totals
        lines.append(f"TOTAL {len(self.results)} pass {t['pass']} fail {t['fail']} "
                     f"unknown {t['unknown']} error {t['error']}")
        return "\n".join(lines)

    def json_lines(self) -> str:
        lines = [json.dumps(r.json()) for r in self.results]
        lines.append(json.dumps({"total": len(self.results), **self.totals}))
        return "\n".join(lines)


def natural_key(cid: str) -> tuple:
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", cid))


def run_claims(paths: list[str] | None = None, fuel: int | None = None,
               select: str | None = None) -> Report:
    files = collect_paths(paths) if paths else shipped_corpus()
    claims: list[Claim] = []
    for f in files:
        claims += load_claims(f)
    if select:
        claims = [c for c in claims if select in c.id]
    claims.sort(key=lambda c: natural_key(c.id))
    return Report([run_claim(c, fuel) for c in claims])
