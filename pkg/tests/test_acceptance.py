"""Acceptance criteria, one test each. Every test prints a single ACCEPTANCE line."""

import contextlib
import time
from importlib import resources

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import closed_terms, glue_terms, internal_formulas
from nsr import checker as ck
from nsr.claims import load_claims, shipped_corpus, _config, _formula, _state, _term, _valuation
from nsr.formulas import Abbrev, Or, parse_formula
from nsr.individuals import Constant, Mod, Status, default_valuation, family_by_name
from nsr.machine import FuelExhausted, Normal, run
from nsr.realizers import build, frame_combinators, term
from nsr.terms import (
    DAGGER, SET, Abs, App, Case, Const, Inl, Inr, Pair, Proj1, Proj2, Var, alpha_eq, numeral, parse_term, spine,
)
from nsr.typecheck import check_derivation, parse_derivations, single_node_mutations


@contextlib.contextmanager
def criterion(capsys, n: int, title: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'} {title}")


def test_criterion_01_confluence(capsys):
    with criterion(capsys, 1, "confluence counterexample, call-by-name vs call-by-value"):
        t0 = time.perf_counter()
        t = build("confluence_example")
        cbn = run(t, 0, strategy="cbn").outcome
        cbv = run(t, 0, strategy="cbv").outcome
        assert isinstance(cbn, Normal) and cbn.config.term == numeral(2) and cbn.config.state == 2
        assert isinstance(cbv, Normal) and cbv.config.term == numeral(1) and cbv.config.state == 1
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_storage_grid(capsys):
    with criterion(capsys, 2, "storage operator grid"):
        t0 = time.perf_counter()
        T, k = build("T"), Const("k")
        for n in range(33):
            for s in range(9):
                out = run(App(App(T, k), numeral(n)), s).outcome
                assert isinstance(out, Normal)
                assert out.config == type(out.config)(App(k, numeral(n)), s), (n, s)
        for s in range(17):
            out = run(App(App(T, k), parse_term("get")), s).outcome
            assert out.config.term == App(k, numeral(s)) and out.config.state == s
        assert time.perf_counter() - t0 < 5.0


def test_criterion_03_diagonalization(capsys):
    with criterion(capsys, 3, "diagonalization ends at the maximum of bound and state"):
        wit = build("diag_wit")
        for n in range(17):
            for s in range(17):
                out = run(App(App(wit, DAGGER), numeral(n)), s).outcome
                assert isinstance(out, Normal) and out.config.state == max(n, s)


def test_criterion_04_idealization(capsys):
    with criterion(capsys, 4, "witness extraction through the idealization realizer"):
        t0 = time.perf_counter()
        u = term(r"\w n k. k n (\v m p. p)")
        ideal_u = App(build("ideal"), u)
        cfg = ck.CheckConfig()
        for s in range(9):
            w = ck.extract_witness(ideal_u, s, cfg)
            assert (w.value, w.state) == (s, s)
            for m in range(s + 1):
                out = run(App(App(w.payload, DAGGER), numeral(m)), s).outcome
                assert isinstance(out, Normal)
                s2 = out.config.state
                witness_after = ck.extract_witness(ideal_u, s2, cfg).value
                assert m <= witness_after  # R(x, y) = y <= x at the post-set state
        # the same through the checker: premise and conclusion of the principle
        hyp = parse_formula("fa_stbv n. ex_bv x. fa_stbv y. (le(y, n) -> le(y, x))")
        concl = parse_formula("ex_bv x. fa_stbv y. le(y, x)")
        rho = default_valuation()
        assert ck.universal(hyp, rho, u, cfg).status is Status.MEMBER
        sat = ck.CheckConfig(atoms="saturated")
        assert ck.universal(concl, rho, ideal_u, sat).status is Status.MEMBER
        assert time.perf_counter() - t0 < 10.0


def _llpo(premise_src: str, left: str, right: str):
    cfg = ck.CheckConfig()
    premise = term(premise_src)
    rho = default_valuation()
    A, B = parse_formula(left), parse_formula(right)
    hyp = Abbrev("fa_stbv", "x", subs=(Abbrev("fa_stbv", "y", subs=(Or(A, B),)),))
    assert ck.universal(hyp, rho, premise, cfg).status is Status.MEMBER
    t = App(build("t_llpo"), premise)
    sides = []
    for s in range(9):
        side, payload, s2 = ck.tag_observation(t, s, cfg)
        assert s2 == s
        body = Abbrev("fa_stbv", "x", subs=(A,)) if side == "left" else Abbrev("fa_stbv", "y", subs=(B,))
        assert ck.member(body, rho, payload, s, cfg).status is Status.MEMBER
        sides.append(side)
    return sides


def test_criterion_05_llpo(capsys):
    with criterion(capsys, 5, "LLPO end to end, both constant scenarios"):
        t0 = time.perf_counter()
        assert _llpo(r"\z x w y. inl dagger", "always", "never") == ["left"] * 9
        assert _llpo(r"\z x w y. inr dagger", "never", "always") == ["right"] * 9
        assert time.perf_counter() - t0 < 30.0


GLUE_SEEN = {"agree": 0, "disagree": []}


@settings(max_examples=200, database=None)
@given(internal_formulas, glue_terms, st.integers(0, 8),
       st.sampled_from([Constant(0), Constant(2), Constant(5), Mod(2), Mod(3)]))
def _glueing_property(a, t, s, x):
    g = ck.glueing_check(a, default_valuation(x=x), t, s, ck.CheckConfig(fuel=5000))
    if g.agree and not g.inconclusive:
        GLUE_SEEN["agree"] += 1
    else:
        GLUE_SEEN["disagree"].append((a, t, s, x, g))


def test_criterion_06_glueing(capsys):
    with criterion(capsys, 6, "glueing: sliced vs truncated membership on 200 random triples"):
        GLUE_SEEN["agree"], GLUE_SEEN["disagree"] = 0, []
        _glueing_property()
        assert not GLUE_SEEN["disagree"], GLUE_SEEN["disagree"][:3]
        assert GLUE_SEEN["agree"] >= 200


# anti-reduction: predecessors that reach the claim term in the same state


def _same_state_predecessors(t):
    k = Const("k")
    return [
        App(Abs("fresh_x", t), k),
        Proj1(Pair(t, k)),
        Proj2(Pair(k, t)),
        Case(Inl(t), "fresh_x", Var("fresh_x"), "fresh_y", k),
        App(Abs("fresh_x", Var("fresh_x")), t),
        App(App(App(parse_term("rec"), t), k), numeral(0)),
    ]


def _membership_cases():
    for path in shipped_corpus():
        for c in load_claims(path):
            if c.kind in ("member", "universal") and c.get("VERDICT") == "member":
                yield c


def test_criterion_07_anti_reduction(capsys):
    with criterion(capsys, 7, "anti-reduction on every corpus membership pass"):
        violations, checked = [], 0
        for c in _membership_cases():
            a, t, rho = _formula(c.get("FORMULA")), _term(c, c.get("TERM")), _valuation(c)
            cfg = _config(c, None)
            states = [_state(c)] if c.kind == "member" else list(cfg.states)
            for s in states:
                if ck.member(a, rho, t, s, cfg).status is not Status.MEMBER:
                    continue
                preds = list(_same_state_predecessors(t))
                # trace predecessors of the claim term itself
                tr = run(t, s, cfg.fuel, record=True)
                configs = tr.configs
                for i in range(len(configs) - 1, 0, -1):
                    if ck.member(a, rho, configs[i].term, configs[i].state, cfg).status is Status.MEMBER:
                        for j in range(i):
                            if configs[j].state == s or cfg.atoms == "saturated":
                                preds.append(configs[j].term)
                        break
                for p in preds:
                    checked += 1
                    if ck.member(a, rho, p, s, cfg).status is not Status.MEMBER:
                        violations.append((c.id, s, str(p)[:80]))
        # state-raising predecessors for atom claims read in saturated mode
        sat = ck.CheckConfig(atoms="saturated")
        rho = default_valuation(x=Constant(4))
        for atom in ("le(x, delta)", "lt(x, delta)", "le(delta, add(x, x))"):
            a = parse_formula(atom)
            for s in range(9):
                for k in range(9):
                    t = DAGGER
                    s2 = max(s, k)
                    if ck.member(a, rho, t, s2, sat).status is Status.MEMBER:
                        checked += 1
                        p = App(App(SET, numeral(k)), t)
                        if ck.member(a, rho, p, s, sat).status is not Status.MEMBER:
                            violations.append((atom, s, k))
        assert checked > 100
        assert not violations, violations[:5]


# evidenced-frame laws


class _Diverges(Exception):
    pass


def _tree(t, s, depth):
    """Observable shape of (t, s) to a bounded depth: weak-head results, then components.

    Functions are observed by applying them to a fresh inert constant.
    """
    out = run(t, s, 3000).outcome
    if isinstance(out, FuelExhausted):
        raise _Diverges
    v, s2 = out.config.term, out.config.state
    head = (type(out).__name__, getattr(out, "reason", None), s2)
    if depth == 0:
        return head
    match v:
        case Pair(l, r):
            return head + ("pair", _tree(l, s2, depth - 1), _tree(r, s2, depth - 1))
        case Inl(u) | Inr(u):
            return head + (type(v).__name__, _tree(u, s2, depth - 1))
        case Abs():
            return head + ("fun", _tree(App(v, Const(f"arg{depth}")), s2, depth - 1))
        case App() if isinstance(out, Normal):
            # inert constant or partially applied primitive: observe the arguments
            h, args = spine(v)
            if not isinstance(h, (Abs, Var)):
                return head + (str(h), *(_tree(u, s2, depth - 1) for u in args))
    return head + (str(v),) if isinstance(out, Normal) else head


def _same_outcome(lhs, rhs, s):
    try:
        a, b = _tree(lhs, s, 3), _tree(rhs, s, 3)
    except _Diverges:
        assume(False)
    return a == b


LAWS = {
    # name: (lhs builder, rhs builder) over args a, b, e1, e2
    "identity": (lambda f, a, b: App(f["e_id"], a), lambda f, a, b: a),
    "top": (lambda f, a, b: App(f["e_top"], a), lambda f, a, b: a),
    "compose": (lambda f, a, b: App(f["e_compose"], a), lambda f, a, b: App(Var("E2"), App(Var("E1"), a))),
    "pair-first": (lambda f, a, b: App(f["e_fst"], App(f["e_pair"], a)), lambda f, a, b: App(Var("E1"), a)),
    "pair-second": (lambda f, a, b: App(f["e_snd"], App(f["e_pair"], a)), lambda f, a, b: App(Var("E2"), a)),
    "lambda-eval": (lambda f, a, b: App(f["e_eval"], Pair(App(f["e_lambda"], a), b)),
                    lambda f, a, b: App(Var("E"), Pair(a, b))),
}


def _close_over(t, e1, e2, e):
    from nsr.terms import substitute
    for x, u in (("E1", e1), ("E2", e2), ("E", e)):
        t = substitute(t, x, u)
    return t


def _frame_law_check(law):
    seen, failures = [0], []

    @settings(max_examples=300, database=None)
    @given(a=closed_terms, b=closed_terms, e1=closed_terms, e2=closed_terms, s=st.integers(0, 4))
    def prop(a, b, e1, e2, s):
        if seen[0] >= 100:
            return
        f = frame_combinators(e=e1, e1=e1, e2=e2)
        lhs_b, rhs_b = LAWS[law]
        lhs, rhs = lhs_b(f, a, b), _close_over(rhs_b(f, a, b), e1, e2, e1)
        if not _same_outcome(lhs, rhs, s):
            failures.append((law, str(a), str(b), str(e1), str(e2), s))
        seen[0] += 1

    prop()
    return seen[0], failures


def test_criterion_08_frame_laws(capsys):
    with criterion(capsys, 8, "evidenced-frame laws on 100 generated arguments each"):
        for law in LAWS:
            count, failures = _frame_law_check(law)
            assert not failures, failures[:3]
            assert count >= 100, (law, count)


def _corpus_text(name):
    return (resources.files("nsr") / "corpus" / name).read_text()


def test_criterion_09_typing_corpus(capsys):
    with criterion(capsys, 9, "typing corpus: accepted derivations, rejected mutations, external guard"):
        entries = parse_derivations(_corpus_text("derivations.txt"))
        assert len(entries) == 15
        for e in entries:
            assert check_derivation(e.derivation, e.mode).ok, e.name
        per_entry = [list(single_node_mutations(e.derivation)) for e in entries]
        chosen, depth = [], 0
        while len(chosen) < 30:
            for e, muts in zip(entries, per_entry):
                if depth < len(muts) and len(chosen) < 30:
                    chosen.append((e, *muts[depth]))
            depth += 1
        assert len(chosen) == 30
        for e, desc, m in chosen:
            assert not check_derivation(m, e.mode).ok, (e.name, desc)
        guard = {x.name: x for x in parse_derivations(_corpus_text("derivations_rejected.txt"))}
        ext = guard["external-substitution"]
        rep = check_derivation(ext.derivation, "stateful")
        assert not rep.ok and any("external" in str(d) for d in rep.diagnostics)
        assert check_derivation(ext.derivation, "effect-free").ok


def test_criterion_10_state_sensitivity(capsys):
    with criterion(capsys, 10, "state-dependent behaviour of the rec/get term and the next_odd setter"):
        t = term(r"rec (\x. p1 x) (\x y z. p2 z) get")
        # reduction: the term reads the first component in state 0 and the second in state 1
        probe = Pair(Const("a"), Const("b"))
        assert run(App(t, probe), 0).outcome.config.term == Const("a")
        assert run(App(t, probe), 1).outcome.config.term == Const("b")
        # membership in state 0, non-membership in state 1, for an internal propositional formula
        a = parse_formula(r"(Z /\ W) -> Z")
        rho = default_valuation().bind_so("Z", family_by_name("nf0")).bind_so("W", family_by_name("nf1"))
        cfg = ck.CheckConfig()
        v0, v1 = ck.member(a, rho, t, 0, cfg), ck.member(a, rho, t, 1, cfg)
        assert v0.status is Status.MEMBER and ck.VACUOUS not in v0.flags
        assert v1.status is Status.NONMEMBER
        # next_odd: always lands in an odd state, where the identity no longer realizes x = 0
        setter = term(r"set (next_odd get) (\x. x)")
        eq0 = parse_formula("eq(x, 0)")
        rho = default_valuation(x=Mod(2))
        ident = parse_term(r"\x. x")
        for s in range(33):
            out = run(setter, s).outcome
            assert isinstance(out, Normal) and alpha_eq(out.config.term, ident)
            assert out.config.state % 2 == 1 and out.config.state in (s, s + 1)
            assert ck.member(eq0, rho, ident, out.config.state, cfg).status is Status.NONMEMBER
            if s % 2 == 0:
                assert ck.member(eq0, rho, ident, s, cfg).status is Status.MEMBER
