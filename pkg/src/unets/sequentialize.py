"""Reading a sequent proof back from a correct linking.

The proof is built from the conclusion upwards.  At each step the first
applicable move is taken:

1. the leftmost root par is split;
2. the leftmost root universal is stripped;
3. the leftmost root existential with no leap to a universal still present
   is stripped, witnessed by the mgu's (expanded) value for its variable;
4. two linked atoms close the branch with an axiom;
5. the leftmost root tensor whose removal disconnects the graph is split.

Cuts are handled through their encoding ``ex xs. (A * ~A)``: the closure
quantifiers are stripped silently (their witnesses become the extended
cut's substitution) and the encoded tensor becomes an extended cut when it
splits.  Cut formulas are never sequent positions, so no commutation of
existential rules is needed afterwards.
"""

from __future__ import annotations

import sys
from collections import deque
from typing import Dict, List, Optional, Set, Tuple

from .calculus import Ax, ExistsRule, ForallRule, ParRule, Perm, Proof, TensorRule, XCutRule
from .errors import IllFormedError, UnetsError
from .nets import Linking, NetGraph, encoded, graph_contraction, graph_of_clean
from .syntax import (
    Atom, CutSequent, Exists, Forall, Formula, Par, Path, Tensor, Term, Var,
    cut_vars, dual, fresh_names, free_vars, subst_formula, subst_term,
)
from .unify import NotUnifiable, apply_mgu, expanded_sizes

Ref = Tuple[int, Path]


class SequentializationError(UnetsError):
    """Raised when the input is not a correct net (or on an internal failure)."""


def mgu_witnesses(g: NetGraph, cap: Optional[int] = None) -> Dict[str, Term]:
    """Expanded mgu value of every existential variable of the graph's host.

    Variables the mgu leaves unconstrained get fresh free variables whose
    names clash with nothing in the host.
    """
    mgu = g.mgu
    taken: Set[str] = set()
    for f in g.host.formulas:
        from .syntax import all_var_names
        taken |= all_var_names(f)
    ren: Dict[str, Term] = {}
    for z in mgu.unconstrained:
        new = next(fresh_names("_" + z + "0", taken))
        taken.add(new)
        ren[z] = Var(new)
    if cap is not None:
        total = sum(expanded_sizes(mgu).values())
        if total > cap:
            from .errors import ResourceLimit
            raise ResourceLimit("mgu expands to %d nodes, cap is %d" % (total, cap), total, cap)
    out: Dict[str, Term] = dict(ren)
    for x, _ in mgu.bindings:
        out[x] = subst_term(apply_mgu(mgu, Var(x)), ren)
    return out


class _Sequentializer:
    def __init__(self, l: Linking, cap: Optional[int], check_lemma: bool = True):
        enc, _ = encoded(l)
        g = graph_of_clean(enc)
        if isinstance(g, NotUnifiable):
            raise SequentializationError("linking is not unifiable: %s" % g)
        if not graph_contraction(g).ok:
            raise SequentializationError("linking is not correct")
        self.orig = l.host
        self.n = len(l.host.formulas)
        self.host = enc.host
        self.g = g
        self.check_lemma = check_lemma
        self.sigma = mgu_witnesses(g, cap)
        self.adj: List[List[Tuple[int, int]]] = [[] for _ in g.vertices]
        self.parent: Dict[int, int] = {}
        self.leaps_from: Dict[int, List[Tuple[int, int]]] = {}
        for e in g.edges:
            self.adj[e.src].append((e.dst, e.id))
            self.adj[e.dst].append((e.src, e.id))
            if e.kind == "forest":
                self.parent[e.src] = e.dst
            elif e.kind == "leap":
                self.leaps_from.setdefault(e.src, []).append((e.dst, e.id))
        self.links = {}
        for a, b in enc.links:
            self.links[(a.member, a.path)] = (b.member, b.path)
            self.links[(b.member, b.path)] = (a.member, a.path)

    # -- helpers

    def node(self, r: Ref) -> Formula:
        return self.host.node(r[0], r[1])

    def vid(self, r: Ref) -> int:
        return self.g.index[r]

    def formula(self, r: Ref) -> Formula:
        return subst_formula(self.node(r), self.sigma)

    def present(self, v: int, roots: Set[int]) -> bool:
        while True:
            if v in roots:
                return True
            p = self.parent.get(v)
            if p is None:
                return False
            v = p

    def blocked(self, r: Ref, roots: Set[int]) -> bool:
        return any(self.present(t, roots) for t, _ in self.leaps_from.get(self.vid(r), ()))

    def reach(self, start: int, removed: int, allowed, skip_edge: Optional[int] = None) -> Set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, eid in self.adj[v]:
                if w == removed or w in seen or eid == skip_edge or not allowed(w):
                    continue
                seen.add(w)
                queue.append(w)
        return seen

    # -- main recursion

    def run(self) -> Proof:
        F = [(m, ()) for m in range(self.n)]
        C = [(c, (self.n + c, ())) for c in range(len(self.orig.cuts))]
        return self.seq(F, C)

    def seq(self, F: List[Ref], C: List[Tuple[int, Ref]]) -> Proof:
        # 1. par
        for k, r in enumerate(F):
            f = self.node(r)
            if isinstance(f, Par):
                F2 = F[:k] + [(r[0], r[1] + (0,)), (r[0], r[1] + (1,))] + F[k + 1:]
                return ParRule(k, self.seq(F2, C))
        # 2. universal
        for k, r in enumerate(F):
            f = self.node(r)
            if isinstance(f, Forall):
                F2 = F[:k] + [(r[0], r[1] + (0,))] + F[k + 1:]
                return ForallRule(k, f.var, self.seq(F2, C))
        # 3. existential without a leap to a present universal
        roots = {self.vid(r) for r in F} | {self.vid(r) for _, r in C}
        for k, r in enumerate(F):
            f = self.node(r)
            if isinstance(f, Exists) and not self.blocked(r, roots):
                body = (r[0], r[1] + (0,))
                concl = self.formula(r)
                witness = self.sigma.get(f.var) if f.var in free_vars(f.body) else None
                F2 = F[:k] + [body] + F[k + 1:]
                return ExistsRule(k, concl.var, witness, concl.body, self.seq(F2, C))
        for j, (c, r) in enumerate(C):
            f = self.node(r)
            if isinstance(f, Exists) and not self.blocked(r, roots):
                C2 = C[:j] + [(c, (r[0], r[1] + (0,)))] + C[j + 1:]
                return self.seq(F, C2)
        # 4. axiom
        if len(F) == 2 and not C and all(isinstance(self.node(r), Atom) for r in F):
            if self.links.get(F[0]) != F[1]:
                raise SequentializationError("internal: unlinked atoms %s, %s" % (F[0], F[1]))
            a, b = self.formula(F[0]), self.formula(F[1])
            if b != dual(a):
                raise SequentializationError("internal: atoms %s, %s not equalised by the mgu" % (a, b))
            return Ax(a)
        # 5. splitting tensor
        if self.check_lemma:
            self.assert_wrappers_do_not_split(F, C, roots)
        candidates = [("formula", k, r) for k, r in enumerate(F) if isinstance(self.node(r), Tensor)]
        candidates += [("cut", j, r) for j, (c, r) in enumerate(C) if isinstance(self.node(r), Tensor)]
        for kind, k, r in candidates:
            res = self.try_split(kind, k, r, F, C, roots)
            if res is not None:
                return res
        raise SequentializationError("internal: no splitting tensor among %d candidates" % len(candidates))

    def allowed_fn(self, roots: Set[int]):
        cache: Dict[int, bool] = {}

        def allowed(v: int) -> bool:
            got = cache.get(v)
            if got is None:
                got = cache[v] = self.present(v, roots)
            return got

        return allowed

    def try_split(self, kind, k, r, F, C, roots) -> Optional[Proof]:
        t = self.vid(r)
        lref, rref = (r[0], r[1] + (0,)), (r[0], r[1] + (1,))
        allowed = self.allowed_fn(roots)
        left = self.reach(self.vid(lref), t, allowed)
        if self.vid(rref) in left:
            return None
        right = self.reach(self.vid(rref), t, allowed)
        FL, FR, CL, CR = [], [], [], []
        for i, q in enumerate(F):
            if kind == "formula" and i == k:
                continue
            v = self.vid(q)
            if v in left:
                FL.append(q)
            elif v in right:
                FR.append(q)
            else:
                raise SequentializationError("internal: disconnected formula")
        for j, (c, q) in enumerate(C):
            if kind == "cut" and j == k:
                continue
            v = self.vid(q)
            if v in left:
                CL.append((c, q))
            elif v in right:
                CR.append((c, q))
            else:
                raise SequentializationError("internal: disconnected cut")
        p1 = self.seq(FL + [lref], CL)
        p2 = self.seq([rref] + FR, CR)
        if kind == "formula":
            node: Proof = TensorRule(p1, p2)
            got_f = FL + [r] + FR
            got_c = CL + CR
        else:
            c = C[k][0]
            node = XCutRule(self.cut_sigma(c), self.orig.cuts[c][0], p1, p2)
            got_f = FL + FR
            got_c = CL + [C[k]] + CR
        order = tuple(got_f.index(q) for q in F)
        got_ids = [c for c, _ in got_c]
        cut_order = tuple(got_ids.index(c) for c, _ in C)
        if order != tuple(range(len(F))) or cut_order != tuple(range(len(C))):
            node = Perm(order, node, cut_order if cut_order != tuple(range(len(C))) else None)
        return node

    def cut_sigma(self, c: int) -> Tuple[Tuple[str, Term], ...]:
        names = cut_vars(self.orig.cuts[c])
        f = self.host.formulas[self.n + c]
        out = []
        for orig in names:
            out.append((orig, self.sigma[f.var]))
            f = f.body
        return tuple(out)

    def assert_wrappers_do_not_split(self, F, C, roots) -> None:
        """A root existential's leaps never disconnect the graph.

        These leaps are exactly the tensors the frame construction adds at
        the roots, and such tensors never split a correct net.
        """
        allowed = self.allowed_fn(roots)
        for r in list(F) + [q for _, q in C]:
            v = self.vid(r)
            for target, eid in self.leaps_from.get(v, ()):
                if not allowed(target):
                    continue
                if target not in self.reach(v, -1, allowed, skip_edge=eid):
                    raise SequentializationError("internal: a frame tensor splits the net")


def sequentialize(l: Linking, cap: Optional[int] = None, check_lemma: bool = True) -> Proof:
    """A cut-free proof whose translation is ``l`` (``l`` must be correct and cut-free)."""
    if l.host.cuts:
        raise IllFormedError("sequentialize expects a cut-free net; use sequentialize_cuts")
    return sequentialize_cuts(l, cap, check_lemma)


def sequentialize_cuts(l: Linking, cap: Optional[int] = None, check_lemma: bool = True) -> Proof:
    """A proof with extended cuts whose translation is ``l``.

    When the host is not clean the proof concludes its cleansed form.
    """
    l.validate()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        return _Sequentializer(l, cap, check_lemma).run()
    finally:
        sys.setrecursionlimit(limit)
