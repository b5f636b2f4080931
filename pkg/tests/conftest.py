import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nsr.formulas import And, Arrow, FFun, FNum, FVar, FZero, ForallFO, Nat, Rel
from nsr.terms import (
    DAGGER, GET, REC, SET, SUCC, ZERO, Abs, App, Case, Const, Inl, Inr, Pair, Proj1, Proj2, Var,
    numeral,
)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

NAMES = ("x", "y", "z", "f")

atoms = st.one_of(
    st.sampled_from(NAMES).map(Var),
    st.sampled_from([ZERO, SUCC, REC, GET, SET, DAGGER]),
    st.sampled_from(["a", "b", "TAGL"]).map(Const),
    st.integers(0, 6).map(numeral),
)


def _compound(children):
    return st.one_of(
        st.builds(Abs, st.sampled_from(NAMES), children),
        st.builds(App, children, children),
        st.builds(Pair, children, children),
        st.builds(Proj1, children),
        st.builds(Proj2, children),
        st.builds(Inl, children),
        st.builds(Inr, children),
        st.builds(Case, children, st.sampled_from(NAMES), children, st.sampled_from(NAMES), children),
    )


terms = st.recursive(atoms, _compound, max_leaves=12)


def closed(t):
    for x in sorted(t.free_vars):
        t = Abs(x, t)
    return t


closed_terms = terms.map(closed)

# internal first-order fragment used for glueing

fo_exprs = st.one_of(
    st.sampled_from([FVar("x"), FVar("delta"), FZero()]),
    st.integers(1, 9).map(FNum),
)
fo_exprs = st.one_of(fo_exprs, st.builds(lambda a, b: FFun("add", (a, b)), fo_exprs, fo_exprs))

internal_atoms = st.one_of(
    st.builds(lambda r, a, b: Rel(r, (a, b)), st.sampled_from(["le", "lt", "equal"]), fo_exprs, fo_exprs),
    fo_exprs.map(Nat),
)


def _internal_compound(children):
    return st.one_of(
        st.builds(Arrow, children, children),
        st.builds(And, children, children),
        children.map(lambda b: ForallFO("y", b)),
    )


internal_formulas = st.recursive(internal_atoms, _internal_compound, max_leaves=4)

glue_terms = st.one_of(
    st.sampled_from([DAGGER, GET, Abs("x", Var("x")), Abs("x", DAGGER), Pair(DAGGER, GET),
                     Abs("x", Pair(Var("x"), DAGGER)), App(App(SET, numeral(3)), DAGGER),
                     Abs("x", App(App(SET, numeral(5)), Var("x")))]),
    st.integers(0, 9).map(numeral),
)
