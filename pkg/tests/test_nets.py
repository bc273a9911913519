import random

import pytest

from oracles import oracle_correct, oracle_precedences, switching_total
from unets.errors import IllFormedError, ResourceLimit
from unets.generators import mutate, random_correct_net, random_linking
from unets.nets import (
    Linking, build_graph, check_correct, check_mll, contract, enumerate_switchings, frame,
    mll_graph, switching_is_tree,
)
from unets.syntax import Var, alpha_equal
from unets.text import parse_sequent

THETA = "ex y. (~P * ~Q(y)), P | all x. Q(x)\nlinks: (0 2) (1 3)"
THETA_BAD = "ex y. (~P | ~Q(y)), P * all x. Q(x)\nlinks: (0 2) (1 3)"
IDENTITY = "(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)"


def test_prenex_pair():
    v = check_correct(Linking.parse(THETA))
    assert v.correct
    assert v.graph.mgu.explicit() == {"y": Var("x")}
    assert [str(p) for p in v.graph.precedences] == ["y^x"]
    assert len(v.graph.leaps()) == 1
    w = check_correct(Linking.parse(THETA_BAD))
    assert w.status == "switching-failure"
    assert w.witness is not None
    assert not switching_is_tree(w.graph, w.witness)


def test_identity_switchings_and_frame():
    l = Linking.parse(IDENTITY)
    v = check_correct(l)
    assert v.correct and v.graph.switching_count() == 4
    assert all(switching_is_tree(v.graph, s) for s in enumerate_switchings(v.graph))
    f = frame(l)
    assert alpha_equal(f.host.formulas[0], parse_sequent("(#0 * ~P) | (~#0 | P)").formulas[0])
    assert f.index_pairs() == [(0, 2), (1, 3)]
    assert check_mll(f)
    assert mll_graph(f).switching_count() == 4


def test_frame_rejects_terms_in_mll_check():
    with pytest.raises(IllFormedError):
        check_mll(Linking.parse(IDENTITY))


def test_not_unifiable():
    v = check_correct(Linking.parse("P(a), ~P(b)\nlinks: (0 1)"))
    assert v.status == "not-unifiable"
    v = check_correct(Linking.parse("all x. P(x), all y. ~P(y)\nlinks: (0 1)"))
    assert v.status == "not-unifiable"


def test_disconnected_and_cyclic():
    # two separate axioms without a tensor: disconnected
    v = check_correct(Linking.parse("P, ~P, Q, ~Q\nlinks: (0 1) (2 3)"))
    assert v.status == "switching-failure"
    # tensor of both sides of one axiom: cycle
    v = check_correct(Linking.parse("P * ~P\nlinks: (0 1)"))
    assert v.status == "switching-failure"
    v = check_correct(Linking.parse("P | ~P\nlinks: (0 1)"))
    assert v.correct


def test_ill_formed_linkings_are_rejected():
    with pytest.raises(IllFormedError):
        Linking.parse("P, ~P\nlinks: (0 0)")
    with pytest.raises(IllFormedError):
        Linking.parse("P, P\nlinks: (0 1)")
    with pytest.raises(IllFormedError):
        Linking.parse("P, ~P, Q, ~Q\nlinks: (0 1)")
    with pytest.raises(IllFormedError):
        Linking.parse("P, ~P\nlinks: (0 5)")


def test_leap_into_universal_breaks_switching():
    # without the leap this would be a plain axiom under a par
    l = Linking.parse("ex y. ~P(y) | all x. P(x)\nlinks: (0 1)")
    assert not check_correct(l).correct
    l = Linking.parse("ex y. ~P(y), all x. P(x)\nlinks: (0 1)")
    assert check_correct(l).correct


def test_switching_cap():
    l = Linking.parse(" * ".join(["(P%d | ~P%d)" % (i, i) for i in range(15)]) + "\nlinks: "
                      + " ".join("(%d %d)" % (2 * i, 2 * i + 1) for i in range(15)))
    g = build_graph(l)
    with pytest.raises(ResourceLimit):
        list(enumerate_switchings(g, cap=10 ** 4))
    # the contraction verdict does not enumerate
    assert check_correct(l).correct


def test_contract_small_graphs():
    # triangle of kept edges
    assert not contract(3, [(0, 0, 1), (1, 1, 2), (2, 2, 0)], {}).ok
    # par vertex 2 with incoming edges from 0 and 1, plus link 0-1
    assert contract(3, [(0, 0, 2), (1, 1, 2), (2, 0, 1)], {2: [0, 1]}).ok
    # tensor instead: both edges kept, cycle
    assert not contract(3, [(0, 0, 2), (1, 1, 2), (2, 0, 1)], {}).ok
    assert not contract(2, [], {}).ok
    assert contract(1, [], {}).ok


def test_dot_output():
    g = build_graph(Linking.parse(THETA))
    dot = g.to_dot()
    assert dot.startswith("digraph net {")
    assert dot.count('kind="leap"') == 1
    assert dot.count('kind="link"') == 2


def test_precedences_match_explicit_mgu():
    rng = random.Random(11)
    checked = 0
    for _ in range(300):
        l = random_linking(rng)
        theirs = oracle_precedences(l)
        g = build_graph(l)
        if theirs is None:
            assert g.__class__.__name__ == "NotUnifiable"
            continue
        assert {(p.x, p.y) for p in g.precedences} == theirs
        checked += 1
    assert checked > 50


def test_switching_count_matches_oracle():
    rng = random.Random(3)
    for _ in range(100):
        l = random_correct_net(rng)
        assert build_graph(l).switching_count() == switching_total(l)


def test_verdict_matches_brute_force():
    rng = random.Random(19)
    seen = {True: 0, False: 0}
    for i in range(300):
        if i % 3 == 0:
            l = random_linking(rng)
        elif i % 3 == 1:
            l = random_correct_net(rng)
        else:
            l = mutate(random_correct_net(rng), rng)
            if l is None:
                continue
        expected = oracle_correct(l)
        if expected is None:
            continue
        assert check_correct(l, witness=False).correct == expected, l.to_text()
        seen[expected] += 1
    assert seen[True] > 50 and seen[False] > 50


def test_failure_witness_is_a_bad_switching():
    rng = random.Random(23)
    found = 0
    for _ in range(200):
        l = random_linking(rng)
        v = check_correct(l)
        if v.status == "switching-failure" and v.graph.switching_count() <= 10 ** 4:
            assert v.witness is not None
            assert not switching_is_tree(v.graph, v.witness)
            found += 1
    assert found > 20


def test_frames_of_random_nets_agree_with_the_verdict():
    rng = random.Random(41)
    for _ in range(150):
        l = random_correct_net(rng, 5)
        assert check_mll(frame(l))
    seen_bad = 0
    for _ in range(300):
        l = random_linking(rng, 4)
        rep = check_correct(l, witness=False)
        try:
            f = frame(l)
        except IllFormedError:
            continue
        assert check_mll(f) == rep.correct, l.to_text()
        seen_bad += not rep.correct
    assert seen_bad > 10
