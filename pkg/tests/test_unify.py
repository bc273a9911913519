import random

import pytest
from hypothesis import given, strategies as st

from conftest import terms
from oracles import match, robinson, variables
from unets.errors import ResourceLimit
from unets.syntax import App, Var
from unets.text import parse_term as T
from unets.unify import (
    EXISTENTIAL, FREE, UNIVERSAL, Equation, EquationSet, NotUnifiable, TermStore,
    apply_mgu, expanded_sizes, mgu_size, precedences, unify, unify_terms,
)

KINDS = {"u": UNIVERSAL, "x": UNIVERSAL, "v": EXISTENTIAL, "w": EXISTENTIAL,
         "y": EXISTENTIAL, "z": FREE}


def _prec(s):
    return sorted(str(p) for p in precedences(s))


def test_worked_example():
    pairs = [(T("g(u)"), T("w")), (T("f(v)"), T("f(x)")), (T("a"), T("a")), (T("h(z,a)"), T("y"))]
    s = unify_terms(pairs, KINDS, ["w", "v", "y"])
    assert not isinstance(s, NotUnifiable)
    assert s.explicit() == {"w": T("g(u)"), "v": T("x"), "y": T("h(z,a)")}
    assert _prec(s) == ["v^x", "w^u"]


def test_clash_and_occurs_failures():
    r = unify_terms([(T("f(y)"), T("g(y, y)"))], {"y": EXISTENTIAL}, ["y"])
    assert isinstance(r, NotUnifiable) and r.reason == "clash"
    r = unify_terms([(T("y"), T("f(y)"))], {"y": EXISTENTIAL}, ["y"])
    assert isinstance(r, NotUnifiable) and r.reason == "occurs-cycle"
    # universals are rigid: two distinct ones never unify
    r = unify_terms([(T("u"), T("x"))], KINDS)
    assert isinstance(r, NotUnifiable)
    # a free variable is rigid too
    r = unify_terms([(T("z"), T("a"))], KINDS)
    assert isinstance(r, NotUnifiable)


def test_occurs_cycle_through_several_equations():
    k = {"v": EXISTENTIAL, "w": EXISTENTIAL, "y": EXISTENTIAL}
    r = unify_terms([(T("v"), T("f(w)")), (T("w"), T("g(y, a)")), (T("y"), T("f(v)"))], k, ["v", "w", "y"])
    assert isinstance(r, NotUnifiable) and r.reason == "occurs-cycle"


def test_unconstrained_unknowns_are_reported():
    s = unify_terms([(T("v"), T("w"))], {"v": EXISTENTIAL, "w": EXISTENTIAL}, ["v", "w", "y"])
    assert len(s) == 1
    assert "y" in s.unconstrained


def _chain(n):
    """x_i = g(x_{i-1}, x_{i-1}) with x_0 universal: the mgu doubles at each step."""
    kinds = {"x0": UNIVERSAL}
    eqs = []
    for i in range(1, n + 1):
        kinds["x%d" % i] = EXISTENTIAL
        prev = Var("x%d" % (i - 1))
        eqs.append(Equation(Var("x%d" % i), App("g", (prev, prev))))
    return EquationSet(tuple(eqs), kinds, tuple("x%d" % i for i in range(1, n + 1)))


def test_chain_stays_small_while_its_expansion_explodes():
    store = TermStore()
    s = unify(_chain(24), store)
    assert len(precedences(s)) == 24
    assert store.allocated == 49
    assert expanded_sizes(s)["x24"] == 2 ** 25 - 1
    assert mgu_size(s, Var("x24")) == 2 ** 25 - 1
    with pytest.raises(ResourceLimit):
        apply_mgu(s, Var("x24"), cap=10 ** 6)
    small = unify(_chain(3))
    assert apply_mgu(small, Var("x2")) == T("g(g(x0,x0),g(x0,x0))")


def _instance_of(general, special, unknowns):
    """Is ``special`` an instance of ``general`` on the given unknowns?"""
    pat = App("tuple", tuple(general.get(x, Var(x)) for x in unknowns))
    tgt = App("tuple", tuple(special.get(x, Var(x)) for x in unknowns))
    return match(pat, tgt, {})


UNKNOWNS = ("x", "y", "z")
MIXED = {"x": EXISTENTIAL, "y": EXISTENTIAL, "z": EXISTENTIAL, "u": UNIVERSAL, "v": FREE}


@given(st.lists(st.tuples(terms(2), terms(2)), min_size=1, max_size=4))
def test_agrees_with_robinson(pairs):
    ours = unify_terms(pairs, MIXED, UNKNOWNS)
    theirs = robinson(pairs, set(UNKNOWNS))
    assert (theirs is None) == isinstance(ours, NotUnifiable)
    if theirs is None:
        return
    explicit = {x: apply_mgu(ours, Var(x)) for x in UNKNOWNS}
    for a, b in pairs:
        assert apply_mgu(ours, a) == apply_mgu(ours, b)
    # each is an instance of the other: equal up to renaming
    assert _instance_of(theirs, explicit, UNKNOWNS)
    assert _instance_of(explicit, theirs, UNKNOWNS)
    expected = {(x, y) for x, t in theirs.items() for y in variables(t) if MIXED.get(y) == UNIVERSAL}
    assert {(p.x, p.y) for p in precedences(ours)} == expected


def test_random_deep_instances_against_robinson():
    rng = random.Random(7)

    def term(d):
        r = rng.random()
        if d == 0 or r < 0.3:
            return Var(rng.choice("xyzu")) if rng.random() < 0.7 else App("a")
        if r < 0.65:
            return App("f", (term(d - 1),))
        return App("g", (term(d - 1), term(d - 1)))

    agree = 0
    for _ in range(400):
        pairs = [(term(4), term(4)) for _ in range(rng.randint(1, 3))]
        ours = unify_terms(pairs, MIXED, UNKNOWNS)
        theirs = robinson(pairs, set(UNKNOWNS))
        assert (theirs is None) == isinstance(ours, NotUnifiable)
        agree += 1
    assert agree == 400
