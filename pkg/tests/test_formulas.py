import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import internal_formulas
from nsr.formulas import (
    Abbrev, Arrow, FNum, FVar, FormulaParseError, Nat, Rel, St, alpha_eq, eval_expr, expand,
    expand_once, fo_free, internal, parse_expr, parse_formula, show, so_free, subst_fo, subst_so,
    truncate,
)
from nsr.individuals import Constant, Diagonal, Mod

external = st.recursive(
    st.one_of(internal_formulas, st.sampled_from([St(FVar("x")), St(FVar("delta"))])),
    lambda c: st.one_of(
        st.builds(Arrow, c, c),
        st.builds(lambda k, b: Abbrev(k, "z", subs=(b,)),
                  st.sampled_from(["fa_st", "ex_st", "fa_stbv", "ex_bv", "fa_N"]), c),
    ),
    max_leaves=4,
)


@given(external)
def test_print_parse_round_trip(a):
    assert alpha_eq(parse_formula(show(a)), a)
    assert show(parse_formula(show(a))) == show(a)


@given(internal_formulas)
def test_generated_fragment_is_internal(a):
    assert internal(a)


@given(external)
def test_expansion_removes_abbreviations_and_keeps_free_variables(a):
    e = expand(a)
    assert "fa_st" not in show(e) and "ex_bv" not in show(e)
    assert fo_free(e) == fo_free(a)


@given(internal_formulas, st.integers(0, 12))
def test_truncation_closes_free_variables(a, s):
    env = {"x": Mod(3), "delta": Diagonal()}
    t = truncate(a, s, env)
    assert not fo_free(t)
    assert internal(t)


@given(internal_formulas, st.integers(0, 9))
def test_substituting_a_constant_removes_the_variable(a, n):
    b = subst_fo(a, "x", FNum(n) if n else parse_expr("0"))
    assert "x" not in fo_free(b)


def test_substitution_avoids_capture():
    a = parse_formula("forall y. le(x, y)")
    b = subst_fo(a, "x", FVar("y"))
    assert fo_free(b) == {"y"}
    assert alpha_eq(b, parse_formula("forall z. le(y, z)"))


def test_second_order_substitution():
    a = parse_formula("forall2 Z:1. X(0) -> Z(0)")
    b = subst_so(a, "X", ("n",), parse_formula("le(n, n)"))
    assert alpha_eq(b, parse_formula("forall2 Z:1. le(0, 0) -> Z(0)"))
    assert so_free(a) == {"X": 1}


def test_internal_classification():
    assert internal(parse_formula("forall x. Nat(x) -> le(x, delta)"))
    assert not internal(parse_formula("fa_st x. le(x, delta)"))
    assert not internal(parse_formula("st(x)"))


def test_standard_bounded_quantifier_expansion():
    got = expand_once(parse_formula("fa_stbv x. le(x, delta)"))
    want = parse_formula("forall x. st(x) -> Nat(x) |-> le(x, delta)")
    assert alpha_eq(got, want)


def test_expression_evaluation():
    env = {"x": Constant(3), "delta": Diagonal()}
    assert eval_expr(parse_expr("add(x, S(delta))"), env, 4) == 8
    assert eval_expr(parse_expr("pred(fact(delta))"), env, 4) == 23


def test_restriction_kinds():
    a = parse_formula("Nat(x) |-> le(x, x)")
    assert type(a).__name__ == "NatRestr"
    b = parse_formula("le(x, x) |-> le(x, x)")
    assert type(b).__name__ == "ValRestr"


def test_nullary_relation():
    assert parse_formula("always") == Rel("always", ())
    assert parse_formula("Nat(0)") == Nat(parse_expr("0"))


@pytest.mark.parametrize("src", ["le(x", "forall . A", r"le(x, y) /\\", "A ->", "le(x, y, z)"])
def test_parse_errors(src):
    with pytest.raises(FormulaParseError):
        parse_formula(src)
