"""Girard-style proof nets with explicit existential witnesses.

A :class:`GirardNet` is a forest of typed links.  Each node carries the
concrete formula it concludes: an existential link ``ex x. A`` with witness
``t`` has the hypothesis ``A[t/x]`` as its only child, and a universal link
``all x. A`` has its premise ``A`` (with eigenvariable ``x``) as child.
Axiom links join leaves with *identical* term sequences; they are stored as
pairs of leaf ``uid`` numbers so that they survive rewriting.

The module also carries the global-substitution cut eliminator used to
exhibit the exponential growth of witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import IllFormedError, ResourceLimit
from .nets import Linking, NotUnifiable, contract, encoded, graph_contraction, graph_of_clean
from .syntax import (
    Atom, CutSequent, Exists, Forall, Formula, LeafId, Par, Path, Tensor, Term, Var,
    all_var_names, alpha_equal, count_symbol, fresh_names, dual, free_vars, subst_formula, subst_term, term_size, term_vars,
)

_KINDS = {Atom: "atom", Tensor: "tensor", Par: "par", Forall: "forall", Exists: "exists"}


@dataclass(frozen=True)
class GNode:
    kind: str
    formula: Formula
    children: Tuple["GNode", ...] = ()
    var: Optional[str] = None
    witness: Optional[Term] = None
    uid: int = -1  # leaves only

    def iter(self, path: Path = ()) -> Iterator[Tuple[Path, "GNode"]]:
        stack = [(path, self)]
        while stack:
            p, n = stack.pop()
            yield p, n
            for i in reversed(range(len(n.children))):
                stack.append((p + (i,), n.children[i]))


@dataclass(frozen=True)
class GirardNet:
    conclusions: Tuple[GNode, ...]
    cuts: Tuple[Tuple[GNode, GNode], ...] = ()
    axioms: FrozenSet[Tuple[int, int]] = frozenset()

    @property
    def members(self) -> Tuple[GNode, ...]:
        out = list(self.conclusions)
        for a, b in self.cuts:
            out.extend((a, b))
        return tuple(out)

    def leaves(self) -> Dict[int, Tuple[LeafId, GNode]]:
        out = {}
        for m, root in enumerate(self.members):
            for p, n in root.iter():
                if n.kind == "atom":
                    out[n.uid] = (LeafId(m, p), n)
        return out

    def axiom_atoms(self) -> List[Tuple[Atom, Atom]]:
        leaves = self.leaves()
        return [(leaves[a][1].formula, leaves[b][1].formula) for a, b in sorted(self.axioms)]

    def nodes(self) -> Iterator[GNode]:
        for root in self.members:
            for _, n in root.iter():
                yield n

    def terms(self) -> Iterator[Term]:
        """Every term occurrence on a leaf atom or as a witness."""
        for n in self.nodes():
            if n.kind == "atom":
                yield from n.formula.args
            elif n.kind == "exists" and n.witness is not None:
                yield n.witness

    def size(self) -> int:
        """Total number of link nodes plus term symbols on leaves and witnesses."""
        return sum(1 for _ in self.nodes()) + sum(term_size(t) for t in self.terms())

    @property
    def is_cut_free(self) -> bool:
        return not self.cuts

    def describe(self) -> str:
        lines = ["conclusions: " + ", ".join(str(r.formula) for r in self.conclusions)]
        for a, b in self.cuts:
            lines.append("cut: %s ; %s" % (a.formula, b.formula))
        for n in self.nodes():
            if n.kind == "exists":
                lines.append("witness %s := %s" % (n.var, "_" if n.witness is None else n.witness))
        for a, b in self.axiom_atoms():
            lines.append("axiom: %s -- %s" % (a, b))
        return "\n".join(lines)


def _uids() -> Iterator[int]:
    return itertools.count()


# --------------------------------------------------------------------------
# Unfolding a unification net


def girard_of(u: Linking, cap: Optional[int] = 10 ** 6) -> GirardNet:
    """Unfold a correct cut-free unification net into a Girard net.

    Existential links are witnessed by the mgu; the host is cleansed first
    so eigenvariables are distinct.  Raises :class:`ResourceLimit` when the
    expanded witnesses exceed ``cap`` nodes.
    """
    from .sequentialize import mgu_witnesses
    if u.host.cuts:
        raise IllFormedError("girard_of expects a cut-free net")
    enc, _ = encoded(u)
    g = graph_of_clean(enc)
    if isinstance(g, NotUnifiable):
        raise IllFormedError("net is not unifiable: %s" % g)
    if not graph_contraction(g).ok:
        raise IllFormedError("net is not correct")
    sigma = mgu_witnesses(g, cap)
    uid_of: Dict[LeafId, int] = {}
    counter = _uids()

    def build(f: Formula, m: int, path: Path) -> GNode:
        # ``f`` is the host subformula; its concrete formula is f under sigma.
        concrete = subst_formula(f, sigma)
        if isinstance(f, Atom):
            uid = next(counter)
            uid_of[LeafId(m, path)] = uid
            return GNode("atom", concrete, uid=uid)
        if isinstance(f, (Tensor, Par)):
            return GNode(_KINDS[type(f)], concrete,
                         (build(f.left, m, path + (0,)), build(f.right, m, path + (1,))))
        child = build(f.body, m, path + (0,))
        if isinstance(f, Forall):
            return GNode("forall", concrete, (child,), f.var)
        w = sigma.get(f.var) if f.var in free_vars(f.body) else None
        return GNode("exists", concrete, (child,), f.var, w)

    roots = tuple(build(f, m, ()) for m, f in enumerate(enc.host.formulas))
    axioms = frozenset(tuple(sorted((uid_of[a], uid_of[b]))) for a, b in enc.links)
    return GirardNet(roots, (), axioms)


def unet_of_girard(g: GirardNet) -> Linking:
    """Forget witnesses: the linking traced onto the conclusions (and cuts)."""
    host = CutSequent(tuple(r.formula for r in g.conclusions),
                      tuple((a.formula, b.formula) for a, b in g.cuts))
    leaves = g.leaves()
    missing = [u for pair in g.axioms for u in pair if u not in leaves]
    if missing:
        raise IllFormedError("axioms refer to unknown leaves %s" % missing)
    return Linking(host, [(leaves[a][0], leaves[b][0]) for a, b in g.axioms])


# --------------------------------------------------------------------------
# From proofs


def girard_of_proof(p) -> GirardNet:
    """The Girard net of a sequent proof (witnesses taken from its rules).

    An extended cut ``A sigma`` / ``~A sigma`` becomes an ordinary Girard cut
    between the instantiated formulas.  Every eigenvariable is renamed to a
    name that occurs nowhere in the proof.
    """
    from .calculus import (Ax, CutRule, ExistsRule, ForallRule, ParRule, Perm,
                           TensorRule, XCutRule, infer, iter_nodes)
    memo: Dict = {}
    infer(p, memo=memo)
    # Eigenvariables must be pairwise distinct and must not occur outside
    # their scope, so each one gets a name used nowhere in the proof.
    taken: Set[str] = set()
    for seq in memo.values():
        for f in seq.members:
            taken |= all_var_names(f)
    counter = _uids()
    axioms = []
    built: Dict[tuple, Tuple[List[GNode], List[Tuple[GNode, GNode]]]] = {}
    for at, q in reversed(list(iter_nodes(p))):
        concl = memo[at]
        if isinstance(q, Ax):
            a, b = concl.formulas
            ua, ub = next(counter), next(counter)
            axioms.append((ua, ub))
            built[at] = ([GNode("atom", a, uid=ua), GNode("atom", b, uid=ub)], [])
            continue
        prem = [built.pop(at + (i,)) for i in range(len(q.premises))]
        if isinstance(q, ParRule):
            fs, cs = prem[0]
            fs[q.k:q.k + 2] = [GNode("par", concl.formulas[q.k], (fs[q.k], fs[q.k + 1]))]
            built[at] = (fs, cs)
        elif isinstance(q, ExistsRule):
            fs, cs = prem[0]
            fs[q.k] = GNode("exists", concl.formulas[q.k], (fs[q.k],), q.var, q.witness)
            built[at] = (fs, cs)
        elif isinstance(q, ForallRule):
            fs, cs = prem[0]
            eigen = next(fresh_names(q.var, taken))
            taken.add(eigen)
            s = {q.var: Var(eigen)}
            fs = [_substitute(n, s) for n in fs]
            cs = [(_substitute(a, s), _substitute(b, s)) for a, b in cs]
            fs[q.k] = GNode("forall", concl.formulas[q.k], (fs[q.k],), eigen)
            built[at] = (fs, cs)
        elif isinstance(q, TensorRule):
            (lf, lc), (rf, rc) = prem
            nl = len(lf)
            node = GNode("tensor", concl.formulas[nl - 1], (lf[-1], rf[0]))
            built[at] = (lf[:-1] + [node] + rf[1:], lc + rc)
        elif isinstance(q, (CutRule, XCutRule)):
            (lf, lc), (rf, rc) = prem
            built[at] = (lf[:-1] + rf[1:], lc + [(lf[-1], rf[0])] + rc)
        else:
            fs, cs = prem[0]
            order = q.cut_order if q.cut_order is not None else range(len(cs))
            built[at] = ([fs[i] for i in q.order], [cs[i] for i in order])
    fs, cs = built[()]
    return GirardNet(tuple(fs), tuple(cs), frozenset(tuple(sorted(a)) for a in axioms))


# --------------------------------------------------------------------------
# Checking


@dataclass(frozen=True)
class GirardReport:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_girard(g: GirardNet) -> GirardReport:
    """Typing, strict axioms and cuts, eigenvariable discipline and switchings.

    Jumps run from the hypothesis of every existential link whose witness
    mentions an eigenvariable ``y`` to the universal link of ``y``; they are
    switched together with that link's premise edge.
    """
    members = g.members
    eigen: Dict[str, GNode] = {}
    for n in g.nodes():
        bad = _typing_problem(n)
        if bad:
            return GirardReport(False, bad)
        if n.kind == "forall":
            if n.var in eigen:
                return GirardReport(False, "eigenvariable %s is used by two universal links" % n.var)
            eigen[n.var] = n
    for r in g.conclusions:
        esc = set(free_vars(r.formula)) & set(eigen)
        if esc:
            return GirardReport(False, "eigenvariable %s is free in conclusion %s"
                                % (", ".join(sorted(esc)), r.formula))
    for a, b in g.cuts:
        if not alpha_equal(b.formula, dual(a.formula)):
            return GirardReport(False, "cut %s ; %s is not strictly dual" % (a.formula, b.formula))
    leaves = g.leaves()
    seen: Set[int] = set()
    for a, b in g.axioms:
        for u in (a, b):
            if u not in leaves or u in seen:
                return GirardReport(False, "axiom endpoint %d missing or reused" % u)
            seen.add(u)
        x, y = leaves[a][1].formula, leaves[b][1].formula
        if y != dual(x):
            return GirardReport(False, "axiom %s -- %s is not strictly dual" % (x, y))
    if seen != set(leaves):
        return GirardReport(False, "%d leaves are not covered by axioms" % len(set(leaves) - seen))

    # Switching graph.
    ids: Dict[int, int] = {}
    nodes: List[GNode] = []
    edges: List[Tuple[int, int, int]] = []
    groups: Dict[int, List[int]] = {}

    def vid(n: GNode) -> int:
        k = id(n)
        if k not in ids:
            ids[k] = len(nodes)
            nodes.append(n)
        return ids[k]

    def add(u: int, v: int) -> int:
        edges.append((len(edges), u, v))
        return len(edges) - 1

    for root in members:
        for _, n in root.iter():
            v = vid(n)
            for c in n.children:
                eid = add(vid(c), v)
                if n.kind in ("par", "forall"):
                    groups.setdefault(v, []).append(eid)
    for a, b in g.cuts:
        cv = len(nodes)
        nodes.append(None)
        add(vid(a), cv)
        add(vid(b), cv)
    for a, b in g.axioms:
        add(vid(leaves[a][1]), vid(leaves[b][1]))
    for root in members:
        for _, n in root.iter():
            if n.kind == "exists" and n.witness is not None:
                for y in term_vars(n.witness):
                    if y in eigen:
                        target = vid(eigen[y])
                        groups[target].append(add(vid(n.children[0]), target))
    c = contract(len(nodes), edges, groups)
    if not c.ok:
        return GirardReport(False, "switching condition fails: " + c.reason)
    return GirardReport(True)


def _typing_problem(n: GNode) -> str:
    f = n.formula
    if n.kind == "atom":
        return "" if isinstance(f, Atom) and not n.children else "bad atom node %s" % f
    if n.kind in ("tensor", "par"):
        want = Tensor if n.kind == "tensor" else Par
        if not isinstance(f, want) or len(n.children) != 2:
            return "bad %s link for %s" % (n.kind, f)
        if not (alpha_equal(f.left, n.children[0].formula) and alpha_equal(f.right, n.children[1].formula)):
            return "%s link %s does not match its premises" % (n.kind, f)
        return ""
    if len(n.children) != 1:
        return "quantifier link %s needs one premise" % f
    hyp = n.children[0].formula
    if n.kind == "forall":
        if not isinstance(f, Forall):
            return "bad universal link %s" % f
        if not alpha_equal(f, Forall(n.var, hyp)):
            return "universal link %s does not match premise %s" % (f, hyp)
        return ""
    if not isinstance(f, Exists):
        return "bad existential link %s" % f
    if n.witness is None:
        if f.var in free_vars(f.body) or not alpha_equal(f.body, hyp):
            return "existential link %s lacks a witness" % f
        return ""
    if not alpha_equal(subst_formula(f.body, {f.var: n.witness}), hyp):
        return "existential link %s: hypothesis %s is not the body at %s" % (f, hyp, n.witness)
    return ""


# --------------------------------------------------------------------------
# Cut elimination with global substitution


@dataclass(frozen=True)
class GirardNormalization:
    net: GirardNet
    steps: int
    peak_size: int
    peak_term_size: int
    largest_term: Optional[Term]

    def occurrences(self, name: str) -> int:
        """Occurrences of ``name`` in the largest term of the normal form."""
        return 0 if self.largest_term is None else count_symbol(self.largest_term, name)


def _substitute(n: GNode, s: Dict[str, Term]) -> GNode:
    return GNode(n.kind, subst_formula(n.formula, s),
                 tuple(_substitute(c, s) for c in n.children), n.var,
                 None if n.witness is None else subst_term(n.witness, s), n.uid)


def _largest(g: GirardNet) -> Optional[Term]:
    best, size = None, -1
    for t in g.terms():
        s = term_size(t)
        if s > size:
            best, size = t, s
    return best


def girard_normalize(g: GirardNet, cap: Optional[int] = 10 ** 6) -> GirardNormalization:
    """Eliminate all cuts, leftmost first.

    A quantifier cut against ``all y`` substitutes the existential witness
    for ``y`` throughout the whole net.  ``cap`` bounds the net size.
    """
    steps = 0
    peak = g.size()
    peak_term = max((term_size(t) for t in g.terms()), default=0)
    while g.cuts:
        a, b = g.cuts[0]
        rest = list(g.cuts[1:])
        if a.kind == "atom":
            partner = {}
            for x, y in g.axioms:
                partner[x], partner[y] = y, x
            p, q = partner[a.uid], partner[b.uid]
            axioms = set(g.axioms) - {tuple(sorted((p, a.uid))), tuple(sorted((q, b.uid)))}
            axioms.add(tuple(sorted((p, q))))
            g = GirardNet(g.conclusions, tuple(rest), frozenset(axioms))
        elif a.kind in ("tensor", "par"):
            new = [(a.children[0], b.children[0]), (a.children[1], b.children[1])]
            g = GirardNet(g.conclusions, tuple(new + rest), g.axioms)
        else:
            e, u = (a, b) if a.kind == "exists" else (b, a)
            s = {u.var: e.witness} if e.witness is not None else {}
            if a is e:
                pair = (e.children[0], u.children[0])
            else:
                pair = (u.children[0], e.children[0])
            if s:
                sub = lambda n: _substitute(n, s)
                g = GirardNet(tuple(sub(r) for r in g.conclusions),
                              tuple((sub(x), sub(y)) for x, y in [pair] + rest), g.axioms)
            else:
                g = GirardNet(g.conclusions, tuple([pair] + rest), g.axioms)
        steps += 1
        size = g.size()
        if cap is not None and size > cap:
            raise ResourceLimit("Girard net grew to %d nodes, cap is %d" % (size, cap), size, cap)
        peak = max(peak, size)
        peak_term = max(peak_term, max((term_size(t) for t in g.terms()), default=0))
    return GirardNormalization(g, steps, peak, peak_term, _largest(g))
