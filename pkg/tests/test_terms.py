import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import closed_terms, terms
from nsr.terms import (
    Abs, App, Const, ParseError, Var, alpha_eq, is_value, numeral, numeral_value, parse_term, show,
    substitute,
)


@given(terms)
def test_print_parse_round_trip(t):
    assert parse_term(show(t)) == t


@given(terms)
def test_show_is_stable(t):
    assert show(parse_term(show(t))) == show(t)


@given(st.integers(0, 200))
def test_numerals(n):
    assert numeral_value(numeral(n)) == n
    assert parse_term(f"#{n}") == numeral(n)


@given(terms, st.sampled_from("xyzf"), closed_terms)
def test_substituting_closed_term_removes_variable(t, x, u):
    r = substitute(t, x, u)
    assert x not in r.free_vars
    assert r.free_vars == t.free_vars - {x}


@given(terms, st.sampled_from("xyzf"))
def test_substituting_variable_for_itself_is_identity(t, x):
    assert alpha_eq(substitute(t, x, Var(x)), t)


def test_substitution_avoids_capture():
    t = parse_term(r"\y. x y")
    r = substitute(t, "x", Var("y"))
    assert r.free_vars == {"y"}
    assert isinstance(r, Abs) and r.binder != "y"
    assert alpha_eq(r, parse_term(r"\z. y z"))


def test_alpha_equivalence():
    assert alpha_eq(parse_term(r"\x y. x"), parse_term(r"\a b. a"))
    assert not alpha_eq(parse_term(r"\x y. x"), parse_term(r"\a b. b"))
    assert alpha_eq(parse_term("case d { inl a -> a | inr b -> b }"),
                    parse_term("case d { inl p -> p | inr q -> q }"))


def test_values():
    for src in [r"\x. x", "0", "#3", "(0, dagger)", "inl #2", "inr (\\x. x)", "dagger"]:
        assert is_value(parse_term(src)), src
    for src in ["get", "(get, 0)", "inl get", "p1 (0, 0)", r"(\x. x) 0", "set #1 0", "'k"]:
        assert not is_value(parse_term(src)), src


def test_constants_parse():
    assert parse_term("'k #2") == App(Const("k"), numeral(2))


@pytest.mark.parametrize("src", ["(", r"\. x", "case x { inl a -> a }", "x )", "#", "p1"])
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse_term(src)
