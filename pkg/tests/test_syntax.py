import random

import pytest
from hypothesis import given

from conftest import formulas, terms
from unets.errors import ArityError, MalformedCutError, ParseError
from unets.generators import random_correct_net, random_cut_net, random_linking
from unets.syntax import (
    App, Atom, CutSequent, Exists, Forall, LeafId, Par, Tensor, Var,
    alpha_equal, cleanse, count_symbol, dual, encode_cut, encode_cuts, format_formula,
    formula_leaves, free_vars, is_clean, subst_formula, term_size,
)
from unets.text import format_sequent, format_term, parse_formula, parse_sequent, parse_term


def test_term_parsing_and_constants():
    t = parse_term("g(f(x), a)")
    assert t == App("g", (App("f", (Var("x"),)), App("a")))
    assert parse_term("e") == App("e")
    assert parse_term("k()") == App("k")
    assert parse_term("w") == Var("w")
    assert term_size(t) == 4
    assert count_symbol(parse_term("dot(c, dot(x, c))"), "c") == 2


def test_binding_strength():
    f = parse_formula("P * Q | R")
    assert f == Par(Tensor(Atom("P"), Atom("Q")), Atom("R"))
    g = parse_formula("P | all x. Q(x) * R")
    assert g == Par(Atom("P"), Forall("x", Tensor(Atom("Q", (Var("x"),)), Atom("R"))))
    h = parse_formula("ex x. (P(x) | Q(x,x))")
    assert isinstance(h, Exists) and isinstance(h.body, Par)


def test_dual_pushes_negation_to_atoms():
    f = parse_formula("all x. ex y. (P(x,y) * ~Q | R(f(x)))")
    assert format_formula(dual(f)) == "ex x. all y. (~P(x,y) | Q) * ~R(f(x))"


@given(formulas())
def test_dual_is_an_involution(f):
    assert dual(dual(f)) == f


@given(formulas())
def test_formula_round_trip(f):
    assert parse_formula(format_formula(f)) == f


@given(terms(3))
def test_term_round_trip(t):
    assert parse_term(format_term(t)) == t


def _corpus():
    rng = random.Random(2024)
    out = []
    for _ in range(60):
        out.append(random_correct_net(rng).host)
    for _ in range(30):
        out.append(random_cut_net(rng).host)
    for _ in range(30):
        out.append(random_linking(rng).host)
    return out


def test_sequent_round_trip_corpus():
    corpus = _corpus()
    assert len(corpus) >= 100
    for s in corpus:
        text = format_sequent(s)
        assert parse_sequent(text) == s, text


def test_cut_sequent_parsing_order():
    s = parse_sequent("P(a), cut{ ex y. P(y) ; all y. ~P(y) }, ~P(a)")
    assert len(s.formulas) == 2 and len(s.cuts) == 1
    assert [l.member for l in s.leaves()] == [0, 1, 2, 3]
    assert s.cut_member(0, 0) == 2 and s.cut_member(0, 1) == 3


def test_cleanse_renames_clashes():
    s = parse_sequent("all x. P(x) | ex x. ~P(x), Q(x), cut{ ex y. P(y) ; all y. ~P(y) }")
    assert not is_clean(s)
    c, renames = cleanse(s)
    assert is_clean(c)
    assert format_sequent(c) == "all x1. P(x1) | (ex x2. ~P(x2)), Q(x), cut{ ex y. P(y) ; all y1. ~P(y1) }"
    assert set(renames.values()) == {"x1", "x2", "y1"}
    # the free variable keeps its name
    assert free_vars(c.formulas[1]) == ["x"]


def test_encode_cut_closes_free_variables():
    cut = (parse_formula("P(x, y)"), parse_formula("~P(x, y)"))
    enc = encode_cut(cut)
    assert isinstance(enc, Exists) and isinstance(enc.body, Exists)
    assert free_vars(enc) == []
    assert isinstance(enc.body.body, Tensor)


def test_encode_cuts_leaf_map():
    s = parse_sequent("P(a), cut{ ex y. P(y) ; all y. ~P(y) }, ~P(a)")
    enc, leaf_map = encode_cuts(s)
    assert enc.cuts == () and len(enc.formulas) == 3
    assert leaf_map[LeafId(2, (0,))] == LeafId(2, (0, 0))
    assert leaf_map[LeafId(3, (0,))] == LeafId(2, (1, 0))
    assert leaf_map[LeafId(1, ())] == LeafId(1, ())


def test_alpha_equality():
    assert alpha_equal(parse_formula("all x. P(x)"), parse_formula("all y. P(y)"))
    assert not alpha_equal(parse_formula("all x. P(x)"), parse_formula("all y. P(x)"))
    assert alpha_equal(parse_formula("ex x. all y. Q(x,y)"), parse_formula("ex y. all x. Q(y,x)"))


def test_substitution_avoids_capture():
    f = parse_formula("all y. P(x, y)")
    g = subst_formula(f, {"x": Var("y")})
    assert isinstance(g, Forall) and g.var != "y"
    assert free_vars(g) == ["y"]


def test_leaves_in_order():
    f = parse_formula("(P * ~Q) | all x. R")
    assert [p for p, _ in formula_leaves(f)] == [(0, 0), (0, 1), (1, 0)]


@pytest.mark.parametrize("text, error", [
    ("P(x", ParseError),
    ("P(x), P(x, y)", ArityError),
    ("all . P", ParseError),
    ("P(a) *", ParseError),
    ("P(f(x)), Q(f(x, y))", ArityError),
    ("cut{ P ; P }", MalformedCutError),
    ("cut{ ex x. P(x) ; ex x. ~P(x) }", MalformedCutError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_sequent(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_sequent("P(a),\n  Q(b")
    assert "line 2" in str(info.value)


def test_empty_sequent():
    assert parse_sequent("") == CutSequent()


def _shape(f):
    """Tree shape with quantifier kinds, ignoring variable names."""
    if isinstance(f, Atom):
        return ("atom", f.pred, f.negated, len(f.args))
    if isinstance(f, (Tensor, Par)):
        return (type(f).__name__, _shape(f.left), _shape(f.right))
    return (type(f).__name__, _shape(f.body))


@given(formulas(), formulas())
def test_cleanse_invariants(f, g):
    s = CutSequent((f, g))
    c, _ = cleanse(s)
    assert is_clean(c)
    assert [_shape(x) for x in c.formulas] == [_shape(x) for x in s.formulas]
    assert [alpha_equal(x, y) for x, y in zip(c.formulas, s.formulas)] == [True, True]


@given(formulas(), formulas())
def test_encode_cuts_preserves_leaves(f, g):
    s = CutSequent((f,), ((g, dual(g)),))
    enc, leaf_map = encode_cuts(s)
    for leaf in s.leaves():
        assert enc.atom(leaf_map[leaf]) == s.atom(leaf)
