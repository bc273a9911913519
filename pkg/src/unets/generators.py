"""Random proofs, nets and mutations for property tests and benchmarks.

Proofs are grown from axioms downwards: each step either joins two proofs
with a tensor (or a cut) or applies a unary rule whose side condition holds.
Every bound variable gets a fresh name, so conclusions are clean up to free
variables being reused by later binders, which :func:`clean_linking` fixes.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, List, Optional, Sequence, Tuple

from .calculus import (
    Ax, CutRule, ExistsRule, ForallRule, ParRule, Perm, Proof, TensorRule, check_proof,
    infer, translate,
)
from .nets import Linking
from .syntax import (
    App, Atom, CutSequent, Exists, Forall, Formula, LeafId, Par, Tensor, Term, Var,
    cleanse, dual, formula_leaves, free_vars, iter_nodes, subst_formula, term_vars,
)

PREDICATES = (("P", 1), ("Q", 2), ("R", 0))
FUNCTIONS = (("f", 1), ("g", 2))
CONSTANTS = ("a", "b")
FREE_POOL = ("u", "v", "w")


class ProofGenerator:
    """Random valid proofs; ``cuts`` is the probability of a cut at each join."""

    def __init__(self, rng: random.Random, max_axioms: int = 4, cuts: float = 0.0,
                 term_depth: int = 2, quantifier_rate: float = 0.5, var_rate: float = 0.6):
        self.rng = rng
        self.max_axioms = max_axioms
        self.cuts = cuts
        self.term_depth = term_depth
        self.qrate = quantifier_rate
        self.var_rate = var_rate
        self.counter = itertools.count(1)

    # -- names and terms

    def fresh(self, base: str) -> str:
        return "%s%d" % (base, next(self.counter))

    def term(self, depth: int) -> Term:
        r = self.rng.random()
        if depth <= 0 or r < 0.45:
            if self.rng.random() < self.var_rate:
                return Var(self.rng.choice(FREE_POOL))
            return App(self.rng.choice(CONSTANTS))
        fn, k = self.rng.choice(FUNCTIONS)
        return App(fn, tuple(self.term(depth - 1) for _ in range(k)))

    def atom(self) -> Atom:
        pred, k = self.rng.choice(PREDICATES)
        return Atom(pred, tuple(self.term(self.term_depth) for _ in range(k)), self.rng.random() < 0.5)

    # -- proofs

    def proof(self, axioms: Optional[int] = None) -> Proof:
        n = axioms if axioms is not None else self.rng.randint(1, self.max_axioms)
        p = self.grow(Ax(self.atom()))
        for _ in range(n - 1):
            q = self.grow(Ax(self.atom()))
            if self.rng.random() < 0.5:
                p, q = q, p
            p = self.grow(self.join(p, q))
        return self.finish(p)

    def join(self, p: Proof, q: Proof) -> Proof:
        # Move a random formula of each side into the tensor position.
        t = TensorRule(self.move(p, last=True), self.move(q, last=False))
        if self.rng.random() < self.cuts:
            return self.cut_against(t)
        return t

    def move(self, p: Proof, last: bool) -> Proof:
        n = len(infer(p).formulas)
        k = self.rng.randrange(n)
        rest = [i for i in range(n) if i != k]
        order = tuple(rest + [k]) if last else tuple([k] + rest)
        return p if order == tuple(range(n)) else Perm(order, p)

    def cut_against(self, p: Proof) -> Proof:
        """Cut a formula of ``p`` against a random proof of its dual."""
        p = self.move(p, last=True)
        a = infer(p).formulas[-1]
        return CutRule(p, self.coproof(dual(a)))

    def coproof(self, f: Formula) -> Proof:
        """A proof of ``f, Delta`` for some random nonempty ``Delta``."""
        if isinstance(f, Atom):
            p: Proof = Ax(f)
            if self.rng.random() < 0.3:
                # f, ~f * B, Delta' from an axiom and a random proof of B, Delta'
                p = TensorRule(p, self.move(self.grow(Ax(self.atom())), last=False))
            return p
        if isinstance(f, Par):
            # L, Dl and R, Dr joined by a tensor between the last of Dl and the
            # first of Dr, then L and R brought together for the par.
            pl, pr = self.coproof(f.left), self.coproof(f.right)
            nl, nr = len(infer(pl).formulas), len(infer(pr).formulas)
            t = TensorRule(pl, Perm((1, 0) + tuple(range(2, nr)), pr))
            m = len(infer(t).formulas)
            order = (0, nl) + tuple(i for i in range(1, m) if i != nl)
            return ParRule(0, Perm(order, t))
        if isinstance(f, Tensor):
            pl, pr = self.coproof(f.left), self.coproof(f.right)
            nl = len(infer(pl).formulas)
            t = TensorRule(Perm(tuple(range(1, nl)) + (0,), pl), pr)
            m = len(infer(t).formulas)
            k = nl - 1
            return Perm((k,) + tuple(i for i in range(m) if i != k), t)
        if isinstance(f, Forall):
            p = self.coproof(f.body)
            concl = infer(p).formulas
            # Hide the eigenvariable in the other formulas with existentials.
            for k in range(1, len(concl)):
                g = concl[k]
                if f.var in free_vars(g):
                    z = self.fresh("z")
                    body = subst_formula(g, {f.var: Var(z)})
                    p = ExistsRule(k, z, Var(f.var), body, p)
            return ForallRule(0, f.var, p)
        # Existential: instantiate with a random term.
        t = self.term(1)
        p = self.coproof(subst_formula(f.body, {f.var: t}))
        return ExistsRule(0, f.var, t if f.var in free_vars(f.body) else None, f.body, p)

    def grow(self, p: Proof) -> Proof:
        """Apply a few random unary rules."""
        for _ in range(self.rng.randint(0, 4)):
            concl = infer(p).formulas
            r = self.rng.random()
            if r < 0.35 and len(concl) >= 2:
                k = self.rng.randrange(len(concl) - 1)
                p = ParRule(k, p)
            elif r < 0.35 + 0.35 * self.qrate:
                p = self.exists(p, concl)
            elif r < 0.35 + 0.7 * self.qrate:
                p = self.forall(p, concl)
        return p

    def exists(self, p: Proof, concl: Sequence[Formula]) -> Proof:
        k = self.rng.randrange(len(concl))
        f = concl[k]
        fv = set(free_vars(f))
        cands = []
        for _, g in iter_nodes(f):
            if isinstance(g, Atom):
                for t in g.args:
                    cands.extend(s for s in _subterms(t) if set(term_vars(s)) <= fv)
        z = self.fresh("x")
        if not cands or self.rng.random() < 0.1:
            return ExistsRule(k, z, None, f, p)
        # Prefer terms with variables: they are what universals later capture.
        with_vars = [s for s in cands if term_vars(s)]
        t = self.rng.choice(with_vars if with_vars and self.rng.random() < 0.8 else cands)
        body = _abstract(f, t, Var(z), self.rng)
        return ExistsRule(k, z, t if z in free_vars(body) else None, body, p)

    def forall(self, p: Proof, concl: Sequence[Formula]) -> Proof:
        k = self.rng.randrange(len(concl))
        others = set()
        for i, g in enumerate(concl):
            if i != k:
                others |= set(free_vars(g))
        cands = [x for x in free_vars(concl[k]) if x not in others]
        if not cands:
            # A vacuous universal is always allowed with a fresh variable.
            return ForallRule(k, self.fresh("y"), p) if self.rng.random() < 0.3 else p
        return ForallRule(k, self.rng.choice(cands), p)

    def finish(self, p: Proof) -> Proof:
        rep = check_proof(p)
        if not rep.ok:
            raise AssertionError("generator produced an invalid proof: %s" % rep)
        return p


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _subterms(a)


def _abstract(f: Formula, t: Term, z: Var, rng: random.Random) -> Formula:
    """Replace a random nonempty subset of the free occurrences of ``t`` by ``z``.

    Occurrences under a binder of one of ``t``'s variables are not free and
    are left alone.
    """
    tv = set(term_vars(t))
    occ = [0]

    def on_term(s: Term, flags) -> Term:
        if s == t:
            i = occ[0]
            occ[0] += 1
            return z if flags[i] else s
        if isinstance(s, App):
            return App(s.fn, tuple(on_term(a, flags) for a in s.args))
        return s

    def walk(g: Formula, flags) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(on_term(a, flags) for a in g.args), g.negated)
        if isinstance(g, Tensor):
            return Tensor(walk(g.left, flags), walk(g.right, flags))
        if isinstance(g, Par):
            return Par(walk(g.left, flags), walk(g.right, flags))
        if g.var in tv:
            return g
        return type(g)(g.var, walk(g.body, flags))

    walk(f, _Always())
    total = occ[0]
    flags = [rng.random() < 0.7 for _ in range(total)]
    if total and not any(flags):
        flags[rng.randrange(total)] = True
    occ[0] = 0
    return walk(f, flags)


class _Always:
    def __getitem__(self, i: int) -> bool:
        return False


def clean_linking(l: Linking) -> Linking:
    """The same links on the cleansed host (leaf positions do not move)."""
    host, _ = cleanse(l.host)
    return Linking(host, l.links)


def random_proof(rng: random.Random, max_axioms: int = 4, cuts: float = 0.0) -> Proof:
    return ProofGenerator(rng, max_axioms=max_axioms, cuts=cuts).proof()


def random_correct_net(rng: random.Random, max_axioms: int = 4, cuts: float = 0.0) -> Linking:
    """The (cleansed) translation of a random proof."""
    return clean_linking(translate(random_proof(rng, max_axioms, cuts)))


def random_cut_net(rng: random.Random, max_axioms: int = 4, min_cuts: int = 1) -> Linking:
    """A correct net with at least ``min_cuts`` cuts."""
    while True:
        l = random_correct_net(rng, max_axioms, cuts=0.7)
        if len(l.host.cuts) >= min_cuts:
            return l


# --------------------------------------------------------------------------
# Arbitrary (often incorrect) linkings


def random_linking(rng: random.Random, max_pairs: int = 4, quantifier_rate: float = 0.5,
                   relink: bool = True) -> Linking:
    """A random sequent made of dual atom pairs, with a random linking.

    The pairs share predicate symbols but carry independent terms, and
    quantifiers are wrapped around random subformulas, so the result may be
    correct, non-unifiable or fail the switching condition.
    """
    gen = ProofGenerator(rng, term_depth=1, var_rate=0.75)
    atoms: List[Formula] = []
    for _ in range(rng.randint(1, max_pairs)):
        a = gen.atom()
        b = Atom(a.pred, tuple(_perturb(t, gen, rng) for t in a.args), not a.negated)
        atoms.extend((a, b))
    rng.shuffle(atoms)

    def wrap(f: Formula) -> Formula:
        fv = free_vars(f)
        while fv and rng.random() < quantifier_rate:
            x = rng.choice(fv)
            f = Forall(x, f) if rng.random() < 0.4 else Exists(x, f)
            fv = free_vars(f)
        return f

    items = [wrap(a) for a in atoms]
    n_formulas = rng.randint(1, min(3, len(items)))
    while len(items) > n_formulas:
        i = rng.randrange(len(items) - 1)
        op = Tensor if rng.random() < 0.5 else Par
        items[i:i + 2] = [wrap(op(items[i], items[i + 1]))]
    host, _ = cleanse(CutSequent(tuple(items)))
    if relink:
        return random_link_host(rng, host)
    return Linking(host, [])


def _perturb(t: Term, gen: ProofGenerator, rng: random.Random) -> Term:
    """``t`` with some subterms generalized to variables or replaced outright."""
    r = rng.random()
    if r < 0.2:
        return Var(rng.choice(FREE_POOL))
    if r < 0.3:
        return gen.term(1)
    if isinstance(t, App):
        return App(t.fn, tuple(_perturb(a, gen, rng) for a in t.args))
    return t


def random_link_host(rng: random.Random, host: CutSequent) -> Optional[Linking]:
    """Pair up the leaves of ``host`` randomly respecting base-name duality."""
    groups = {}
    for leaf in host.leaves():
        a = host.atom(leaf)
        groups.setdefault((a.pred, len(a.args)), ([], []))[1 if a.negated else 0].append(leaf)
    links = []
    for pos, neg in groups.values():
        if len(pos) != len(neg):
            return None
        rng.shuffle(neg)
        links.extend(zip(pos, neg))
    return Linking(host, links)


def mutate(l: Linking, rng: random.Random) -> Optional[Linking]:
    """Swap the endpoints of two links with the same predicate symbol."""
    links = sorted(l.links)
    host = l.host
    by_symbol = {}
    for a, b in links:
        x = host.atom(a)
        by_symbol.setdefault((x.pred, len(x.args)), []).append((a, b))
    choices = [v for v in by_symbol.values() if len(v) >= 2]
    if not choices:
        return None
    group = rng.choice(choices)
    (a1, b1), (a2, b2) = rng.sample(group, 2)
    # Orient each link as (positive, negative).
    if host.atom(a1).negated:
        a1, b1 = b1, a1
    if host.atom(a2).negated:
        a2, b2 = b2, a2
    rest = [x for x in links if x not in ((min(a1, b1), max(a1, b1)), (min(a2, b2), max(a2, b2)))]
    return Linking(host, rest + [(a1, b2), (a2, b1)])
