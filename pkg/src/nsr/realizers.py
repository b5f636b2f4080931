"""Named realizers and arithmetic macros, built as closed terms.

Each entry is written in the concrete term syntax. Free identifiers that name other
entries are replaced by those entries, so every built term is closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .terms import Term, parse_term, show, substitute


@dataclass(frozen=True)
class NamedRealizer:
    name: str
    source: str
    anchor: str
    formula: str | None = None
    notes: tuple[str, ...] = field(default=())


_ENTRIES: list[NamedRealizer] = []


def _def(name: str, source: str, anchor: str, formula: str | None = None, *notes: str) -> None:
    _ENTRIES.append(NamedRealizer(name, source, anchor, formula, tuple(notes)))


# probes and storage

_def("P", r"\x y. (x, y)", "pairing probe for witness extraction")
_def("T", r"\z x. (rec (\y. y 0) (\x y z. y (\x. z (S x))) x) z", "storage operator")
_def("Y", r"\f. (\x. f (x x)) (\x. f (x x))", "call-by-name fixed point (Curry)")

# arithmetic macros (booleans are selectors \a b. a / \a b. b)

_def("plus", r"\x y. rec x (\n r. S r) y", "addition by recursion on the right argument")
_def("mul", r"\x y. rec 0 (\n r. plus r x) y", "multiplication by repeated addition")
_def("pred", r"\n. rec 0 (\m r. m) n", "predecessor")
_def("fact", r"\n. rec #1 (\m r. mul (S m) r) n", "factorial")
_def("true", r"\a b. a", "boolean selector")
_def("false", r"\a b. b", "boolean selector")
_def("neg", r"\r a b. r b a", "boolean negation")
_def("iszero", r"\n. rec true (\m r. false) n", "zero test")
_def("even", r"\n. rec true (\m r. neg r) n", "parity test")
_def("eqnat", r"\m. rec (\k. iszero k) (\q r k. rec false (\j d. r j) k) m",
     "numeral equality")
_def("ifeq", r"\m k a b. eqnat m k a b", "branch on numeral equality")
_def("next_odd", r"\n. even n (S n) n", "least odd number above or equal to the argument")

# state

_def("incr", r"\x. set (S get) x", "increment the state, then continue")
_def("incr0", r"set (S get) 0", "increment the state and return 0")
_def("loop_plus", r"Y incr", "diverges while raising the state forever")
_def("confluence_example", r"(\x. plus (plus get x) x) incr0",
     "same term, different results under call-by-name and call-by-value")

# nonstandard principles

_def("ens0", r"\x. T x get", "the diagonal is a natural number", "natp(delta)")
_def("ens0_exists", r"\x. T x get dagger", "a nonstandard bounded witness exists",
     "ex_bv x. not st(x)")
_def("diag_wit", r"\x y. set y dagger", "raise the state to a given standard bound",
     "fa_stbv y. le(y, delta)")
_def("diag", r"\z. T z get diag_wit", "diagonalization",
     "ex_bv x. fa_stbv y. le(y, x)")
_def("ideal", r"\x y. T y (p1 (T (x dagger) get P)) (\y z. set z y)", "idealization")
_def("transfer_to_st", r"\x y. x", "transfer, universal to standard universal")
_def("transfer_from_st", r"\x. x dagger", "transfer, standard universal to universal")
_def("exists_to_st", r"\x. (dagger, x)", "transfer, existential to standard existential")
_def("exists_from_st", r"\x. p2 x", "transfer, standard existential to existential")
_def("overspill", r"\x. (dagger, x dagger)", "overspill")
_def("underspill", r"\x y. (\z. y (dagger, z)) (x dagger)", "underspill")
_def("natp_zero", r"\x. x 0", "zero is a natural number", "natp(0)")
_def("natp_succ", r"\x y. y (S x)", "successor of a natural number, value-restricted",
     "forall x. Nat(x) |-> natp(S(x))")
_def("rec_st", r"\u0 uS w. rec u0 (\x d. uS dagger x d)", "external induction",
     None, "takes the standardness argument explicitly and discards it before recursing")

# relativization to value-restricted quantifiers

_def("rel_nat", r"T", "relativized natural-number storage")
_def("rel_id", r"\x. x", "relativized identity")
_def("rel_exists_intro", r"\z. z P", "relativized existential introduction")
_def("rel_exists_elim", r"\x y. T y (p1 x) (p2 x)", "relativized existential elimination")

# lesser limited principle of omniscience, relativized to standard bounded quantifiers.
# Hypothesis realizers h take (w, x, w', y): two standardness proofs and two numerals.

_def("t_le0", r"\x n y. x", "base case of bounded quantification")
_def("t_leS", r"\n x y m z. ifeq m (S n) y (x m z)", "extend a bounded quantification by one",
     None, "the conditional is the numeral equality test ifeq")
_def("t_or", r"\h z x w y. case h w y z x { inl h1 -> inr h1 | inr h2 -> inl h2 }",
     "commute the two disjuncts of the hypothesis", None,
     "the two bound arguments are exchanged as well as the disjuncts")
_def("t_swap", r"\d. case d { inl a -> inr a | inr b -> inl b }", "swap a disjunction")
_def("t_0", r"\h w x. case h dagger x dagger 0 { inl a -> inl a | inr b -> inr (t_le0 b) }",
     "inner induction, base", None, "right branch wrapped with inr")
_def("t_S", r"""\h w x z y q. case q { inl q1 -> inl q1
                                     | inr q2 -> case h dagger x dagger (S y)
                                                 { inl a -> inl a | inr b -> inr (t_leS y q2 b) } }""",
     "inner induction, step", None,
     "the second branch matches inr, not inl", "t_leS receives the bound y explicitly")
_def("t_Phi", r"\h w x. rec_st (t_0 h w x) (t_S h w x)", "inner induction", None,
     "uses rec_st so the standardness argument is discarded before recursing")
_def("t_Delta", r"""\h w x v. case t_Phi h dagger (S x) dagger (S x)
                               { inl c1 -> inl (t_leS x v c1) | inr c2 -> inr c2 }""",
     "one outer step", None, "t_leS receives the bound x explicitly")
_def("u_0", r"\h. case h dagger 0 dagger 0 { inl a -> inl (t_le0 a) | inr b -> inr (t_le0 b) }",
     "outer induction, base", None, "right branch wrapped with inr")
_def("u_S", r"""\h w x d. case d { inl d1 -> t_Delta h w x d1
                                 | inr d2 -> t_swap (t_Delta (t_or h) w x d2) }""",
     "outer induction, step", None,
     "the swapped call returns its disjuncts in swapped order and is swapped back")
_def("t_aux", r"\h. rec_st (u_0 h) (u_S h)", "outer induction", None,
     "uses rec_st so the standardness argument is discarded before recursing")
_def("t_delta", r"\x w y. x y (inr loop_plus)", "instantiate a bound at the diagonal", None,
     "takes the standardness argument w of the conclusion")
_def("t_llpo", r"""\h. case t_aux h dagger get
                       { inl x1 -> inl (t_delta x1) | inr x2 -> inr (t_delta x2) }""",
     "lesser limited principle of omniscience, standard bounded form", None,
     "right branch produces inr")

# the printed forms that the corrections above replace; kept for regression checks

_def("t_llpo_printed", r"""\h. case t_aux h dagger get
                           { inl x1 -> inl (t_delta x1) | inr x2 -> inl (t_delta x2) }""",
     "printed form: right branch produces inl")
_def("u_0_printed", r"\h. case h dagger 0 dagger 0 { inl a -> inl (t_le0 a) | inr b -> t_le0 b }",
     "printed form: right branch not wrapped")
_def("t_0_printed", r"\h w x. case h dagger x dagger 0 { inl a -> inl a | inr b -> t_le0 b }",
     "printed form: right branch not wrapped")
_def("t_or_printed", r"\h z x w y. case h z x w y { inl h1 -> inr h1 | inr h2 -> inl h2 }",
     "printed form: disjuncts swapped, bound arguments not exchanged")
_def("u_S_printed", r"""\h w x d. case d { inl d1 -> t_Delta h w x d1
                                         | inr d2 -> t_Delta (t_or h) w x d2 }""",
     "printed form: swapped call not swapped back")

# evidenced-frame combinators; e, e1, e2 are parameters

FRAME_TEMPLATES: dict[str, str] = {
    "e_id": r"\x. x",
    "e_compose": r"\x. e2 (e1 x)",
    "e_top": r"\x. x",
    "e_pair": r"\x. (e1 x, e2 x)",
    "e_fst": r"\x. p1 x",
    "e_snd": r"\x. p2 x",
    "e_lambda": r"\x y. e (x, y)",
    "e_eval": r"\x. (p1 x) (p2 x)",
}

LIBRARY: dict[str, NamedRealizer] = {r.name: r for r in _ENTRIES}


class UnknownRealizer(KeyError):
    pass


def resolve(t: Term, overrides: tuple[tuple[str, str], ...] = ()) -> Term:
    """Replace free identifiers naming library entries by their (closed) terms."""
    for x in sorted(t.free_vars):
        if x in LIBRARY:
            t = substitute(t, x, build(x, overrides))
    return t


@lru_cache(maxsize=None)
def _build(name: str, overrides: tuple[tuple[str, str], ...]) -> Term:
    target = dict(overrides).get(name, name)
    if target not in LIBRARY:
        raise UnknownRealizer(name)
    return resolve(parse_term(LIBRARY[target].source), overrides)


def build(name: str, overrides: tuple[tuple[str, str], ...] | dict[str, str] = ()) -> Term:
    """The closed term for a library name.

    overrides maps entry names to replacement entry names, e.g. {"u_S": "u_S_printed"}.
    """
    if isinstance(overrides, dict):
        overrides = tuple(sorted(overrides.items()))
    return _build(name, overrides)


def term(src: str, overrides: tuple[tuple[str, str], ...] | dict[str, str] = ()) -> Term:
    """Parse src and resolve library names in it."""
    if isinstance(overrides, dict):
        overrides = tuple(sorted(overrides.items()))
    return resolve(parse_term(src), overrides)


def storage_T() -> Term:
    return build("T")


def frame_combinators(**params: Term) -> dict[str, Term]:
    """The frame combinators, with parameters e, e1, e2 substituted when supplied."""
    out = {}
    for name, src in FRAME_TEMPLATES.items():
        t = parse_term(src)
        for x, u in params.items():
            t = substitute(t, x, u)
        out[name] = t
    return out


def describe(name: str) -> str:
    r = LIBRARY[name]
    lines = [f"{r.name}: {r.anchor}", f"  source: {' '.join(r.source.split())}",
             f"  term:   {show(build(name))}"]
    if r.formula:
        lines.append(f"  claims: {r.formula}")
    for n in r.notes:
        lines.append(f"  note:   {n}")
    return "\n".join(lines)
