"""Sequent-calculus proofs with explicit witnesses and extended cuts.

Rules are positional.  Every node concludes a :class:`CutSequent` that is
computed bottom-up from its premises:

* ``Ax(A)`` concludes ``A, ~A``; with an explicit second atom it is a
  unification-calculus axiom whose atoms need only be base-name dual.
* ``ParRule(k)`` joins formulas ``k`` and ``k+1`` into ``A | B`` at ``k``.
* ``TensorRule`` joins the last formula of the first premise with the first
  formula of the second.
* ``ExistsRule(k, x, t, A)`` turns formula ``k`` (which must be ``A[t/x]``)
  into ``ex x. A``; ``t`` is ``None`` for a vacuous quantifier.
* ``ForallRule(k, x)`` turns formula ``k`` into ``all x. A`` provided ``x``
  is not free in the other formulas.
* ``CutRule`` cuts the last formula of the first premise against the first
  of the second and keeps the pair in the conclusion's cut list.
* ``XCutRule(sigma, A)`` is the extended cut: premises end/start with
  ``A sigma`` and ``~A sigma`` and the conclusion keeps ``cut{A ; ~A}``.
* ``Perm(order, cut_order)`` reorders formulas (and cuts); it is pure
  bookkeeping and ignored by every semantic operation.

Nodes are addressed by child-index tuples from the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import IllFormedError, ParseError
from .syntax import (
    App, Atom, CutSequent, Exists, Forall, Formula, LeafId, Par, Term, Tensor, Var,
    alpha_equal, dual, format_formula, format_term, formula_leaves, free_vars,
    subst_formula, subst_term, term_vars,
)
from .text import Parser, Signature, describe

Address = Tuple[int, ...]


# --------------------------------------------------------------------------
# Rule nodes


@dataclass(frozen=True)
class Ax:
    left: Atom
    right: Optional[Atom] = None

    @property
    def premises(self) -> tuple:
        return ()

    @property
    def atoms(self) -> Tuple[Atom, Atom]:
        return self.left, self.right if self.right is not None else dual(self.left)


@dataclass(frozen=True)
class ParRule:
    k: int
    premise: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.premise,)


@dataclass(frozen=True)
class TensorRule:
    left: "Proof"
    right: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class ExistsRule:
    k: int
    var: str
    witness: Optional[Term]
    body: Formula
    premise: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.premise,)


@dataclass(frozen=True)
class ForallRule:
    k: int
    var: str
    premise: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.premise,)


@dataclass(frozen=True)
class CutRule:
    left: "Proof"
    right: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class XCutRule:
    sigma: Tuple[Tuple[str, Term], ...]
    cut: Optional[Formula]
    left: "Proof"
    right: "Proof"

    @property
    def premises(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class Perm:
    order: Tuple[int, ...]
    premise: "Proof"
    cut_order: Optional[Tuple[int, ...]] = None

    @property
    def premises(self) -> tuple:
        return (self.premise,)


Proof = Union[Ax, ParRule, TensorRule, ExistsRule, ForallRule, CutRule, XCutRule, Perm]

RULE_NAMES = {Ax: "ax", ParRule: "par", TensorRule: "tensor", ExistsRule: "exists",
              ForallRule: "forall", CutRule: "cut", XCutRule: "xcut", Perm: "perm"}


def rule_name(p: Proof) -> str:
    return RULE_NAMES[type(p)]


def with_premises(p: Proof, premises: Sequence[Proof]) -> Proof:
    """Copy of ``p`` with its premises replaced."""
    if isinstance(p, Ax):
        return p
    if isinstance(p, ParRule):
        return ParRule(p.k, premises[0])
    if isinstance(p, TensorRule):
        return TensorRule(premises[0], premises[1])
    if isinstance(p, ExistsRule):
        return ExistsRule(p.k, p.var, p.witness, p.body, premises[0])
    if isinstance(p, ForallRule):
        return ForallRule(p.k, p.var, premises[0])
    if isinstance(p, CutRule):
        return CutRule(premises[0], premises[1])
    if isinstance(p, XCutRule):
        return XCutRule(p.sigma, p.cut, premises[0], premises[1])
    return Perm(p.order, premises[0], p.cut_order)


def subproof(p: Proof, at: Address) -> Proof:
    for i in at:
        p = p.premises[i]
    return p


def replace_subproof(p: Proof, at: Address, new: Proof) -> Proof:
    if not at:
        return new
    prem = list(p.premises)
    prem[at[0]] = replace_subproof(prem[at[0]], at[1:], new)
    return with_premises(p, prem)


def iter_nodes(p: Proof, at: Address = ()) -> Iterator[Tuple[Address, Proof]]:
    stack = [(at, p)]
    while stack:
        a, q = stack.pop()
        yield a, q
        prem = q.premises
        for i in reversed(range(len(prem))):
            stack.append((a + (i,), prem[i]))


def proof_size(p: Proof) -> int:
    return sum(1 for _ in iter_nodes(p))


def is_cut_free(p: Proof) -> bool:
    return not any(isinstance(q, (CutRule, XCutRule)) for _, q in iter_nodes(p))


# --------------------------------------------------------------------------
# Checking


class ProofError(IllFormedError):
    def __init__(self, address: Address, rule: str, reason: str):
        self.address = address
        self.rule = rule
        self.reason = reason
        super().__init__("%s rule at %s: %s" % (rule, _fmt_addr(address), reason))


def _fmt_addr(a: Address) -> str:
    return "root" if not a else "/".join(map(str, a))


@dataclass(frozen=True)
class Report:
    ok: bool
    address: Optional[Address] = None
    rule: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "%s rule at %s: %s" % (self.rule, _fmt_addr(self.address), self.reason)


def _sigma(p: XCutRule) -> Dict[str, Term]:
    return dict(p.sigma)


def infer(p: Proof, relaxed: bool = False, memo: Optional[dict] = None) -> CutSequent:
    """Conclusion of ``p``; raises :class:`ProofError` at the first bad rule.

    With ``relaxed`` the axioms only need base-name dual atoms of equal
    arity (unification-calculus axioms).
    """
    memo = {} if memo is None else memo
    # Memo keys are addresses, so shared subproof objects are harmless.
    # Post-order without recursion: proofs of the benchmark families are deep.
    order: List[Tuple[Address, Proof]] = list(iter_nodes(p))
    for at, q in reversed(order):
        memo[at] = _infer_node(q, at, relaxed, memo)
    return memo[()]


def _infer_node(q: Proof, at: Address, relaxed: bool, memo: dict) -> CutSequent:
    name = rule_name(q)

    def fail(reason: str):
        raise ProofError(at, name, reason)

    if isinstance(q, Ax):
        a, b = q.atoms
        if not isinstance(a, Atom) or not isinstance(b, Atom):
            fail("axiom formulas must be atoms")
        if relaxed:
            if a.pred != b.pred or a.negated == b.negated or len(a.args) != len(b.args):
                fail("%s and %s are not base-name dual" % (format_formula(a), format_formula(b)))
        elif b != dual(a):
            fail("non-dual axiom %s, %s" % (format_formula(a), format_formula(b)))
        return CutSequent((a, b))
    prem = [memo[at + (i,)] for i in range(len(q.premises))]
    if isinstance(q, ParRule):
        s = prem[0]
        if not 0 <= q.k < len(s.formulas) - 1:
            fail("position %d out of range" % q.k)
        fs = list(s.formulas)
        fs[q.k:q.k + 2] = [Par(fs[q.k], fs[q.k + 1])]
        return CutSequent(tuple(fs), s.cuts)
    if isinstance(q, TensorRule):
        l, r = prem
        if not l.formulas or not r.formulas:
            fail("premise with no formula")
        fs = l.formulas[:-1] + (Tensor(l.formulas[-1], r.formulas[0]),) + r.formulas[1:]
        return CutSequent(fs, l.cuts + r.cuts)
    if isinstance(q, ExistsRule):
        s = prem[0]
        if not 0 <= q.k < len(s.formulas):
            fail("position %d out of range" % q.k)
        actual = s.formulas[q.k]
        if q.witness is None:
            if q.var in free_vars(q.body):
                fail("no witness given for non-vacuous %s" % q.var)
            expected = q.body
        else:
            expected = subst_formula(q.body, {q.var: q.witness})
        if not alpha_equal(actual, expected):
            fail("witness mismatch: premise has %s, expected %s"
                 % (format_formula(actual), format_formula(expected)))
        fs = list(s.formulas)
        fs[q.k] = Exists(q.var, q.body)
        return CutSequent(tuple(fs), s.cuts)
    if isinstance(q, ForallRule):
        s = prem[0]
        if not 0 <= q.k < len(s.formulas):
            fail("position %d out of range" % q.k)
        for i, f in enumerate(s.formulas):
            if i != q.k and q.var in free_vars(f):
                fail("eigenvariable %s is free in %s" % (q.var, format_formula(f)))
        fs = list(s.formulas)
        fs[q.k] = Forall(q.var, fs[q.k])
        return CutSequent(tuple(fs), s.cuts)
    if isinstance(q, (CutRule, XCutRule)):
        l, r = prem
        if not l.formulas or not r.formulas:
            fail("premise with no formula")
        if isinstance(q, CutRule) or q.cut is None:
            if isinstance(q, XCutRule) and q.sigma:
                fail("extended cut with a substitution needs its cut formula")
            a = l.formulas[-1]
            if not alpha_equal(r.formulas[0], dual(a)):
                fail("cut formulas %s and %s are not dual"
                     % (format_formula(a), format_formula(r.formulas[0])))
            pair = (a, r.formulas[0])
        else:
            a = q.cut
            sigma = _sigma(q)
            fa = free_vars(a)
            for v in sigma:
                if v not in fa:
                    fail("substitution variable %s is not free in the cut formula" % v)
            want_l, want_r = subst_formula(a, sigma), subst_formula(dual(a), sigma)
            if not alpha_equal(l.formulas[-1], want_l):
                fail("left premise ends with %s, expected %s"
                     % (format_formula(l.formulas[-1]), format_formula(want_l)))
            if not alpha_equal(r.formulas[0], want_r):
                fail("right premise starts with %s, expected %s"
                     % (format_formula(r.formulas[0]), format_formula(want_r)))
            pair = (a, dual(a))
        return CutSequent(l.formulas[:-1] + r.formulas[1:], l.cuts + (pair,) + r.cuts)
    # Perm
    s = prem[0]
    if sorted(q.order) != list(range(len(s.formulas))):
        fail("%s is not a permutation of %d formulas" % (list(q.order), len(s.formulas)))
    cut_order = q.cut_order if q.cut_order is not None else tuple(range(len(s.cuts)))
    if sorted(cut_order) != list(range(len(s.cuts))):
        fail("%s is not a permutation of %d cuts" % (list(cut_order), len(s.cuts)))
    return CutSequent(tuple(s.formulas[i] for i in q.order), tuple(s.cuts[i] for i in cut_order))


def check_proof(p: Proof, relaxed: bool = False) -> Report:
    try:
        infer(p, relaxed)
    except ProofError as e:
        return Report(False, e.address, e.rule, e.reason)
    return Report(True)


def conclusion(p: Proof, relaxed: bool = False) -> CutSequent:
    return infer(p, relaxed)


# --------------------------------------------------------------------------
# Translation to linkings


def _tracked(p: Proof) -> Tuple[List[List[Tuple[tuple, int]]], List[Tuple[list, list]]]:
    """For each formula and each cut side of the conclusion, its (path, axiom number) leaves."""
    counter = 0
    track: Dict[Address, tuple] = {}
    for at, q in reversed(list(iter_nodes(p))):
        if isinstance(q, Ax):
            track[at] = ([[((), counter)], [((), counter)]], [])
            counter += 1
            continue
        prem = [track.pop(at + (i,)) for i in range(len(q.premises))]
        if isinstance(q, ParRule):
            fs, cs = prem[0]
            merged = [((0,) + p_, a) for p_, a in fs[q.k]] + [((1,) + p_, a) for p_, a in fs[q.k + 1]]
            fs[q.k:q.k + 2] = [merged]
            track[at] = (fs, cs)
        elif isinstance(q, (ExistsRule, ForallRule)):
            fs, cs = prem[0]
            fs[q.k] = [((0,) + p_, a) for p_, a in fs[q.k]]
            track[at] = (fs, cs)
        elif isinstance(q, TensorRule):
            (lf, lc), (rf, rc) = prem
            merged = [((0,) + p_, a) for p_, a in lf[-1]] + [((1,) + p_, a) for p_, a in rf[0]]
            track[at] = (lf[:-1] + [merged] + rf[1:], lc + rc)
        elif isinstance(q, (CutRule, XCutRule)):
            (lf, lc), (rf, rc) = prem
            track[at] = (lf[:-1] + rf[1:], lc + [(lf[-1], rf[0])] + rc)
        else:
            fs, cs = prem[0]
            order = q.cut_order if q.cut_order is not None else range(len(cs))
            track[at] = ([fs[i] for i in q.order], [cs[i] for i in order])
    return track[()]


def translate(p: Proof):
    """The linking of ``p``: one link per axiom, tracked down to the conclusion."""
    from .nets import Linking
    concl = infer(p)
    fs, cs = _tracked(p)
    ends: Dict[int, List[LeafId]] = {}
    for m, leaves in enumerate(fs):
        for path, ax in leaves:
            ends.setdefault(ax, []).append(LeafId(m, path))
    n = len(fs)
    for c, (left, right) in enumerate(cs):
        for side, leaves in enumerate((left, right)):
            for path, ax in leaves:
                ends.setdefault(ax, []).append(LeafId(n + 2 * c + side, path))
    return Linking(concl, [tuple(v) for v in ends.values()])


# --------------------------------------------------------------------------
# Witnesses, templates and skeletons


def witnesses(p: Proof) -> Dict[str, Optional[Term]]:
    """Witness of each existential rule, keyed by its variable."""
    return {q.var: q.witness for _, q in iter_nodes(p) if isinstance(q, ExistsRule)}


def _templates(p: Proof) -> Dict[Address, CutSequent]:
    """Each node's conclusion with every witness replaced by its variable.

    Computed top-down from the root conclusion: below an existential rule
    for ``x`` the premise formula is the rule's body with ``x`` free.
    """
    memo: Dict[Address, CutSequent] = {}
    out: Dict[Address, CutSequent] = {(): infer(p, memo=memo)}
    for at, q in iter_nodes(p):
        s = out[at]
        if isinstance(q, Ax):
            continue
        fs = list(s.formulas)
        if isinstance(q, ParRule):
            f = fs[q.k]
            fs[q.k:q.k + 1] = [f.left, f.right]
            out[at + (0,)] = CutSequent(tuple(fs), s.cuts)
        elif isinstance(q, (ExistsRule, ForallRule)):
            fs[q.k] = fs[q.k].body
            out[at + (0,)] = CutSequent(tuple(fs), s.cuts)
        elif isinstance(q, TensorRule):
            nl = len(memo[at + (0,)].formulas)
            t = fs[nl - 1]
            out[at + (0,)] = CutSequent(tuple(fs[:nl - 1]) + (t.left,), ())
            out[at + (1,)] = CutSequent((t.right,) + tuple(fs[nl:]), ())
        elif isinstance(q, Perm):
            inv = [0] * len(q.order)
            for new, old in enumerate(q.order):
                inv[old] = new
            out[at + (0,)] = CutSequent(tuple(fs[inv[i]] for i in range(len(fs))), s.cuts)
        else:
            raise IllFormedError("templates are defined for cut-free proofs only")
    return out


def _instantiate(p: Proof, templates: Dict[Address, CutSequent],
                 witness_of: Callable[[ExistsRule], Optional[Term]]) -> Proof:
    """Rebuild ``p`` with every formula read off its template under new witnesses."""
    sigma: Dict[str, Term] = {}
    for _, q in iter_nodes(p):
        if isinstance(q, ExistsRule):
            w = witness_of(q)
            if w is not None:
                sigma[q.var] = w

    def build(q: Proof, at: Address) -> Proof:
        if isinstance(q, Ax):
            a, b = templates[at].formulas
            return Ax(subst_formula(a, sigma), subst_formula(b, sigma))
        prem = [build(x, at + (i,)) for i, x in enumerate(q.premises)]
        if isinstance(q, ExistsRule):
            ex = subst_formula(templates[at].formulas[q.k], sigma)
            # A binder renamed to avoid capture keeps its witness.
            return ExistsRule(q.k, ex.var, witness_of(q), ex.body, prem[0])
        return with_premises(q, prem)

    return build(p, ())


@dataclass(frozen=True)
class Rewitnessed:
    """Outcome of :func:`rewitness`: a proof, or the reason it is ill-formed."""

    proof: Optional[Proof]
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok

    def __bool__(self) -> bool:
        return self.ok


def rewitness(p: Proof, assignment: Mapping[str, Term]) -> Rewitnessed:
    """Replace the witnesses of the given variables throughout their scopes."""
    if not assignment:
        return Rewitnessed(p, check_proof(p))
    templates = _templates(p)
    known = witnesses(p)
    for x in assignment:
        if x not in known:
            raise IllFormedError("%s is not an existential variable of the proof" % x)

    def witness_of(q: ExistsRule) -> Optional[Term]:
        if q.var in assignment:
            return assignment[q.var]
        return q.witness

    new = _instantiate(p, templates, witness_of)
    rep = check_proof(new)
    if not rep.ok:
        return Rewitnessed(None, rep)
    return Rewitnessed(new, rep)


def skeleton(p: Proof) -> Proof:
    """Erase witnesses: each non-vacuous existential rule is witnessed by its own variable."""
    templates = _templates(p)

    def build(q: Proof, at: Address) -> Proof:
        if isinstance(q, Ax):
            return Ax(*templates[at].formulas)
        prem = [build(x, at + (i,)) for i, x in enumerate(q.premises)]
        if isinstance(q, ExistsRule):
            body = templates[at].formulas[q.k].body
            w = None if q.var not in free_vars(body) else Var(q.var)
            return ExistsRule(q.k, q.var, w, body, prem[0])
        return with_premises(q, prem)

    return build(p, ())


@dataclass(frozen=True)
class UnificationVerdict:
    ok: bool
    reason: str = ""
    mgu: object = None

    def __bool__(self) -> bool:
        return self.ok


def verify_unification_proof(u: Proof) -> UnificationVerdict:
    """Decide whether a skeleton becomes a proof under the mgu of its axioms.

    The axiom atoms give equations over the existential variables of the
    proof.  After unification, every rule is checked lazily: a universal
    rule on ``y`` fails if some existential variable occurring free in its
    context has a precedence on ``y``, and an existential rule on ``x``
    fails if the mgu gives ``x`` a term mentioning a universal variable
    bound inside its body.  No substituted term is ever built.
    """
    from .unify import EXISTENTIAL, FREE, UNIVERSAL, EquationSet, Equation, precedences, unify
    rep = check_proof(u, relaxed=True)
    if not rep.ok:
        return UnificationVerdict(False, str(rep))
    if not is_cut_free(u):
        return UnificationVerdict(False, "unification proofs with cuts are not supported")
    clash = _name_clash(u)
    if clash:
        return UnificationVerdict(False, "variable names clash: " + clash)
    kinds: Dict[str, str] = {}
    exist: List[str] = []
    for _, q in iter_nodes(u):
        if isinstance(q, ExistsRule) and q.witness is not None:
            if q.witness != Var(q.var):
                return UnificationVerdict(False, "existential rule on %s carries a witness" % q.var)
            kinds[q.var] = EXISTENTIAL
            exist.append(q.var)
        elif isinstance(q, ForallRule):
            kinds[q.var] = UNIVERSAL
    eqs = []
    for _, q in iter_nodes(u):
        if isinstance(q, Ax):
            a, b = q.atoms
            eqs.extend(Equation(s, t) for s, t in zip(a.args, b.args))
    mgu = unify(EquationSet(tuple(eqs), kinds, tuple(exist)))
    if not mgu:
        return UnificationVerdict(False, str(mgu))
    prec: Dict[str, set] = {}
    for pr in precedences(mgu):
        prec.setdefault(pr.x, set()).add(pr.y)
    memo: dict = {}
    infer(u, relaxed=True, memo=memo)
    for at, q in iter_nodes(u):
        if isinstance(q, ForallRule):
            s = memo[at + (0,)]
            for i, f in enumerate(s.formulas):
                if i == q.k:
                    continue
                for v in free_vars(f):
                    if v == q.var or q.var in prec.get(v, ()):
                        return UnificationVerdict(
                            False, "universal rule on %s at %s: %s is free in the context after unification"
                            % (q.var, _fmt_addr(at), q.var), mgu)
        elif isinstance(q, ExistsRule) and q.witness is not None:
            inner = {g.var for _, g in _formula_nodes(q.body) if isinstance(g, Forall)}
            bad = inner & prec.get(q.var, set())
            if bad:
                return UnificationVerdict(
                    False, "existential rule on %s at %s: witness captures %s"
                    % (q.var, _fmt_addr(at), ", ".join(sorted(bad))), mgu)
    return UnificationVerdict(True, "", mgu)


def _name_clash(u: Proof) -> str:
    """Why the rule variables of ``u`` cannot be told apart by name ("" if they can).

    Each existential and universal rule must bind its own name, and an
    eigenvariable may not occur in an axiom outside its rule's premise.
    """
    bound: Dict[str, Address] = {}
    for at, q in iter_nodes(u):
        if isinstance(q, ForallRule) or (isinstance(q, ExistsRule) and q.witness is not None):
            if q.var in bound:
                return "%s is bound by two rules" % q.var
            bound[q.var] = at
    for at, q in iter_nodes(u):
        if not isinstance(q, ForallRule):
            continue
        for ax_at, ax in iter_nodes(u):
            if isinstance(ax, Ax) and ax_at[:len(at)] != at:
                if any(q.var in term_vars(t) for a in ax.atoms for t in a.args):
                    return "eigenvariable %s occurs outside its rule" % q.var
    return ""


def _formula_nodes(f: Formula):
    from .syntax import iter_nodes as formula_iter
    return formula_iter(f)


# --------------------------------------------------------------------------
# Rule commutations


class NotApplicable(Exception):
    """The requested commutation does not apply."""


class _Tok:
    __slots__ = ("name",)

    def __init__(self, name: str = ""):
        self.name = name

    def __repr__(self) -> str:
        return "tok" + self.name


def _strip_perms(p: Proof, toks: List[_Tok]) -> Tuple[Proof, List[_Tok]]:
    """Look through Perm nodes: returns the first logical rule below ``p``.

    ``toks`` label the conclusion of ``p``; the result's tokens label the
    conclusion of the returned node so that identities are preserved.
    """
    while isinstance(p, Perm):
        inv = [None] * len(p.order)
        for new, old in enumerate(p.order):
            inv[old] = toks[new]
        toks = inv
        p = p.premise
    return p, toks


def _arrange(p: Proof, have: List[_Tok], want: List[_Tok]) -> Proof:
    if have == want:
        return p
    pos = {id(t): i for i, t in enumerate(have)}
    return Perm(tuple(pos[id(t)] for t in want), p)


class _Builder:
    """Builds proofs while tracking formulas by token instead of position."""

    @staticmethod
    def unary(rule: Proof, p: Proof, toks: List[_Tok], active: List[_Tok], result: _Tok):
        if isinstance(rule, ParRule):
            a, b = active
            rest = [t for t in toks if t is not a and t is not b]
            want = rest + [a, b]
            q = ParRule(len(rest), _arrange(p, toks, want))
            return q, rest + [result]
        (a,) = active
        k = next(i for i, t in enumerate(toks) if t is a)
        new_toks = list(toks)
        new_toks[k] = result
        if isinstance(rule, ExistsRule):
            return ExistsRule(k, rule.var, rule.witness, rule.body, p), new_toks
        return ForallRule(k, rule.var, p), new_toks

    @staticmethod
    def tensor(p1: Proof, t1: List[_Tok], a: _Tok, p2: Proof, t2: List[_Tok], b: _Tok, result: _Tok):
        r1 = [t for t in t1 if t is not a]
        r2 = [t for t in t2 if t is not b]
        q = TensorRule(_arrange(p1, t1, r1 + [a]), _arrange(p2, t2, [b] + r2))
        return q, r1 + [result] + r2


def _rule_shape(q: Proof, prem_toks: List[List[_Tok]]):
    """Active tokens, result token and conclusion tokens of a logical rule."""
    r = _Tok("r")
    if isinstance(q, ParRule):
        ts = prem_toks[0]
        active = [ts[q.k], ts[q.k + 1]]
        return active, r, ts[:q.k] + [r] + ts[q.k + 2:]
    if isinstance(q, (ExistsRule, ForallRule)):
        ts = prem_toks[0]
        active = [ts[q.k]]
        return active, r, ts[:q.k] + [r] + ts[q.k + 1:]
    if isinstance(q, TensorRule):
        l, rr = prem_toks
        return [l[-1], rr[0]], r, l[:-1] + [r] + rr[1:]
    raise NotApplicable("%s rules do not commute" % rule_name(q))


def _fresh_toks(p: Proof) -> List[_Tok]:
    return [_Tok(str(i)) for i in range(len(infer(p).formulas))]


def apply_commutation(p: Proof, at: Address, premise: int = 0) -> Proof:
    """Swap the rule at ``at`` with the logical rule above its given premise.

    Intervening Perm nodes are looked through.  Raises
    :class:`NotApplicable` when the two rules act on a common formula, when
    a side condition fails after the swap, or when either node is not a
    logical rule.  The conclusion is preserved exactly (a Perm is added at
    the bottom when positions move).
    """
    if not is_cut_free(p):
        raise NotApplicable("commutations are defined for cut-free proofs")
    lower = subproof(p, at)
    if isinstance(lower, (Ax, Perm, CutRule, XCutRule)) or premise >= len(lower.premises):
        raise NotApplicable("no logical rule with that premise at %s" % _fmt_addr(at))
    # Tokens for every premise of the lower rule, looking through perms.
    lower_prem_toks: List[List[_Tok]] = []
    upper, upper_toks = None, None
    for i, q in enumerate(lower.premises):
        ts = _fresh_toks(q)
        lower_prem_toks.append(ts)
        if i == premise:
            upper, upper_toks = _strip_perms(q, ts)
    if isinstance(upper, (Ax, Perm, CutRule, XCutRule)):
        raise NotApplicable("the premise is not introduced by a logical rule")
    # Tokens for the premises of the upper rule.
    up_prem_toks = [_fresh_toks(q) for q in upper.premises]
    u_active, u_res, u_concl = _rule_shape(upper, up_prem_toks)
    # Identify the upper conclusion's tokens with the lower premise tokens.
    ident = {id(a): b for a, b in zip(u_concl, upper_toks)}
    l_active, l_res, l_concl = _rule_shape(lower, lower_prem_toks)
    if any(t is upper_toks[u_concl.index(u_res)] for t in l_active):
        raise NotApplicable("the upper rule's principal formula is active in the lower rule")

    def real(t: _Tok) -> _Tok:
        return ident.get(id(t), t)

    # Re-express the upper premises' tokens in terms of the lower's tokens.
    up_prem_real = [[real(t) for t in ts] for ts in up_prem_toks]
    up_active_real = [real(t) for t in u_active]
    final_res_upper = upper_toks[u_concl.index(u_res)]

    if len(lower.premises) == 1:
        # Lower rule unary: its active formulas must all sit in one upper premise.
        holders = [j for j, ts in enumerate(up_prem_real)
                   if all(any(a is t for t in ts) for a in l_active)]
        if not holders:
            raise NotApplicable("the lower rule's active formulas come from different premises")
        j = holders[0]
        new_prem, new_toks = _Builder.unary(lower, upper.premises[j], up_prem_real[j], l_active, l_res)
        prem_list = list(upper.premises)
        tok_list = list(up_prem_real)
        prem_list[j], tok_list[j] = new_prem, new_toks
        if isinstance(upper, TensorRule):
            a, b = up_active_real
            result, toks = _Builder.tensor(prem_list[0], tok_list[0], a, prem_list[1], tok_list[1], b,
                                           final_res_upper)
        else:
            result, toks = _Builder.unary(upper, prem_list[0], tok_list[0], up_active_real, final_res_upper)
    else:
        # Lower rule is a tensor; the upper rule sits above premise ``premise``.
        other = 1 - premise
        la = l_active[premise]
        holders = [j for j, ts in enumerate(up_prem_real) if any(la is t for t in ts)]
        if not holders:
            raise NotApplicable("the lower rule's active formula is the upper principal formula")
        j = holders[0]
        parts = [None, None]
        parts[premise] = (upper.premises[j], up_prem_real[j])
        parts[other] = (lower.premises[other], lower_prem_toks[other])
        new_prem, new_toks = _Builder.tensor(parts[0][0], parts[0][1], l_active[0],
                                             parts[1][0], parts[1][1], l_active[1], l_res)
        if isinstance(upper, TensorRule):
            prem_list = list(upper.premises)
            tok_list = list(up_prem_real)
            prem_list[j], tok_list[j] = new_prem, new_toks
            a, b = up_active_real
            result, toks = _Builder.tensor(prem_list[0], tok_list[0], a, prem_list[1], tok_list[1], b,
                                           final_res_upper)
        else:
            result, toks = _Builder.unary(upper, new_prem, new_toks, up_active_real, final_res_upper)
    result = _arrange(result, toks, l_concl)
    new = replace_subproof(p, at, result)
    rep = check_proof(new)
    if not rep.ok:
        raise NotApplicable("side condition fails after the swap: %s" % rep)
    return new


def commutation_sites(p: Proof) -> List[Tuple[Address, int]]:
    """All (address, premise) pairs where a logical rule sits on a logical rule."""
    out = []
    for at, q in iter_nodes(p):
        if isinstance(q, (ParRule, TensorRule, ExistsRule, ForallRule)):
            for i, x in enumerate(q.premises):
                while isinstance(x, Perm):
                    x = x.premise
                if isinstance(x, (ParRule, TensorRule, ExistsRule, ForallRule)):
                    out.append((at, i))
    return out


def equivalent(p: Proof, q: Proof) -> bool:
    """Equal up to rule commutations and re-witnessing, decided by comparing linkings."""
    cp, cq = infer(p), infer(q)
    if cp != cq:
        raise IllFormedError("proofs have different conclusions: %s vs %s" % (cp, cq))
    return translate(p).links == translate(q).links


# --------------------------------------------------------------------------
# S-expression format


HEADS = ("ax", "par", "tensor", "exists", "forall", "cut", "xcut", "perm")


class _ProofParser:
    def __init__(self, text: str, signature: Optional[Signature] = None):
        self.p = Parser(text, signature)

    def number(self) -> int:
        tok = self.p.peek
        if tok.kind != "name" or not tok.value.isdigit():
            self.p.fail("expected a number, found %s" % describe(tok))
        self.p.advance()
        return int(tok.value)

    def numbers(self) -> Tuple[int, ...]:
        self.p.expect("(")
        out = []
        while not self.p.at(")"):
            out.append(self.number())
        self.p.expect(")")
        return tuple(out)

    def variable(self) -> str:
        return self.p.name("variable").value

    def proof(self) -> Proof:
        p = self.p
        p.expect("(")
        head_tok = p.peek
        head = head_tok.value
        if head_tok.kind != "name" or head not in HEADS:
            p.fail("expected a rule name, found %s" % describe(head_tok))
        p.advance()
        if head == "ax":
            a = p.atom()
            b = p.atom() if not p.at(")") else None
            node: Proof = Ax(a, b)
        elif head == "par":
            node = ParRule(self.number(), self.proof())
        elif head == "tensor":
            node = TensorRule(self.proof(), self.proof())
        elif head == "exists":
            k = self.number()
            x = self.variable()
            if p.peek.kind == "name" and p.peek.value == "_":
                p.advance()
                t = None
            else:
                t = p.term(adjacent=True)
            p.expect("(")
            body = p.formula()
            p.expect(")")
            node = ExistsRule(k, x, t, body, self.proof())
        elif head == "forall":
            k = self.number()
            node = ForallRule(k, self.variable(), self.proof())
        elif head == "cut":
            node = CutRule(self.proof(), self.proof())
        elif head == "xcut":
            p.expect("(")
            sigma = []
            while p.at("("):
                p.advance()
                x = self.variable()
                t = p.term()
                p.expect(")")
                sigma.append((x, t))
            p.expect(")")
            cut = None
            if p.at("(") and not (p.peek_at(1).kind == "name" and p.peek_at(1).value in HEADS):
                p.advance()
                cut = p.formula()
                p.expect(")")
            node = XCutRule(tuple(sigma), cut, self.proof(), self.proof())
        else:
            order = self.numbers()
            nxt = p.peek_at(1).value
            cut_order = self.numbers() if p.at("(") and (nxt.isdigit() or nxt == ")") else None
            node = Perm(order, self.proof(), cut_order)
        p.expect(")")
        return node


def parse_proof(text: str, signature: Optional[Signature] = None) -> Proof:
    pp = _ProofParser(text, signature)
    node = pp.proof()
    pp.p.expect_eof()
    return node


def format_proof(p: Proof, indent: Optional[int] = None) -> str:
    """Render as an s-expression; with ``indent`` each premise gets its own line."""

    def go(q: Proof, depth: int) -> str:
        pad = "" if indent is None else "\n" + " " * (indent * (depth + 1))
        sub = lambda x: pad + go(x, depth + 1) if indent is not None else " " + go(x, depth + 1)
        if isinstance(q, Ax):
            a, b = q.left, q.right
            if b is None or b == dual(a):
                return "(ax %s)" % format_formula(a)
            return "(ax %s %s)" % (format_formula(a), format_formula(b))
        if isinstance(q, ParRule):
            return "(par %d%s)" % (q.k, sub(q.premise))
        if isinstance(q, TensorRule):
            return "(tensor%s%s)" % (sub(q.left), sub(q.right))
        if isinstance(q, ExistsRule):
            w = "_" if q.witness is None else format_term(q.witness)
            return "(exists %d %s %s (%s)%s)" % (q.k, q.var, w, format_formula(q.body), sub(q.premise))
        if isinstance(q, ForallRule):
            return "(forall %d %s%s)" % (q.k, q.var, sub(q.premise))
        if isinstance(q, CutRule):
            return "(cut%s%s)" % (sub(q.left), sub(q.right))
        if isinstance(q, XCutRule):
            sig = " ".join("(%s %s)" % (x, format_term(t)) for x, t in q.sigma)
            cut = "" if q.cut is None else " (%s)" % format_formula(q.cut)
            return "(xcut (%s)%s%s%s)" % (sig, cut, sub(q.left), sub(q.right))
        orders = "(%s)" % " ".join(map(str, q.order))
        if q.cut_order is not None:
            orders += " (%s)" % " ".join(map(str, q.cut_order))
        return "(perm %s%s)" % (orders, sub(q.premise))

    return go(p, 0)
