"""Unification of the equations induced by a linking.

Terms are interned into a hash-consed :class:`TermStore`; unification is a
union-find over store nodes with the occurs check deferred to one final
cycle pass.  The result is a :class:`TriangularSubstitution`: an ordered
list of bindings ``x_i <- t_i`` where ``t_i`` may mention variables bound
earlier.  Composing the bindings in order yields the mgu, but nothing in
this module expands it unless :func:`apply_mgu` is asked to, because the
expansion can be exponentially large.

Universal and free variables behave like constants during unification.
Existential variables (including cut variables) are the unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .errors import ResourceLimit
from .syntax import (
    App, Atom, CutSequent, Exists, Forall, Term, Var, format_term, iter_nodes,
    subformula, term_vars,
)

EXISTENTIAL = "existential"
UNIVERSAL = "universal"
FREE = "free"


# --------------------------------------------------------------------------
# Equations


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return "%s = %s" % (format_term(self.lhs), format_term(self.rhs))


@dataclass(frozen=True, eq=False)
class EquationSet:
    """Equations plus the classification of every variable that may occur.

    ``existentials`` lists the unknowns in a fixed order; it may contain
    variables that occur in no equation (they end up unconstrained).
    Variables missing from ``kinds`` are treated as free.
    """

    equations: Tuple[Equation, ...]
    kinds: Mapping[str, str]
    existentials: Tuple[str, ...] = ()

    def kind(self, v: str) -> str:
        return self.kinds.get(v, FREE)

    def __len__(self) -> int:
        return len(self.equations)


def variable_kinds(host: CutSequent) -> Tuple[Dict[str, str], List[str]]:
    """Kinds of the variables of a clean, cut-free sequent.

    Returns the kind map and the non-vacuous existential variables in
    left-to-right order of their binders.
    """
    kinds: Dict[str, str] = {v: FREE for v in host.free_vars()}
    existentials: List[str] = []
    for f in host.formulas:
        for _, g in iter_nodes(f):
            if isinstance(g, Exists):
                kinds[g.var] = EXISTENTIAL
                if _binds(g):
                    existentials.append(g.var)
            elif isinstance(g, Forall):
                kinds[g.var] = UNIVERSAL
    return kinds, existentials


def _binds(q) -> bool:
    from .syntax import free_vars
    return q.var in free_vars(q.body)


def equations_of(host: CutSequent, links: Iterable[Tuple]) -> EquationSet:
    """The equation set of a linking on a clean cut-free sequent.

    ``links`` holds pairs of :class:`~unets.syntax.LeafId`.  Each link
    between ``P(s1..sn)`` and ``~P(t1..tn)`` contributes ``si = ti``.
    """
    kinds, existentials = variable_kinds(host)
    eqs: List[Equation] = []
    for a, b in links:
        x, y = host.atom(a), host.atom(b)
        if x.pred != y.pred or len(x.args) != len(y.args) or x.negated == y.negated:
            raise ValueError("link %r-%r joins non-dual predicates %s / %s" % (a, b, x, y))
        for s, t in zip(x.args, y.args):
            eqs.append(Equation(s, t))
    return EquationSet(tuple(eqs), kinds, tuple(existentials))


# --------------------------------------------------------------------------
# Term store


class TermStore:
    """Hash-consed term DAG.  Node ids are indices into ``self.nodes``.

    A node is ``(name, children)``; variables are ``(name, None)``.
    """

    def __init__(self) -> None:
        self.nodes: List[Tuple[str, Optional[Tuple[int, ...]]]] = []
        self._index: Dict[Tuple[str, Optional[Tuple[int, ...]]], int] = {}

    @property
    def allocated(self) -> int:
        return len(self.nodes)

    def node(self, name: str, children: Optional[Tuple[int, ...]]) -> int:
        key = (name, children)
        nid = self._index.get(key)
        if nid is None:
            nid = len(self.nodes)
            self.nodes.append(key)
            self._index[key] = nid
        return nid

    def var(self, name: str) -> int:
        return self.node(name, None)

    def intern(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.var(t.name)
        return self.node(t.fn, tuple(self.intern(a) for a in t.args))

    def is_var(self, nid: int) -> bool:
        return self.nodes[nid][1] is None

    def name(self, nid: int) -> str:
        return self.nodes[nid][0]

    def children(self, nid: int) -> Tuple[int, ...]:
        return self.nodes[nid][1] or ()

    def to_term(self, nid: int) -> Term:
        """Expand a node into a :class:`Term` (sharing Python objects)."""
        memo: Dict[int, Term] = {}

        def go(i: int) -> Term:
            t = memo.get(i)
            if t is None:
                name, kids = self.nodes[i]
                t = Var(name) if kids is None else App(name, tuple(go(k) for k in kids))
                memo[i] = t
            return t

        return go(nid)


# --------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class NotUnifiable:
    """Failure verdict: ``reason`` is ``"clash"`` or ``"occurs-cycle"``."""

    reason: str
    detail: str
    variables: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return "not unifiable (%s): %s" % (self.reason, self.detail)


@dataclass(frozen=True)
class Precedence:
    """The mgu assigns existential ``x`` a term containing universal ``y``."""

    x: str
    y: str

    def __str__(self) -> str:
        return "%s^%s" % (self.x, self.y)


@dataclass(frozen=True, eq=False)
class TriangularSubstitution:
    """Ordered bindings over a shared store, plus unconstrained unknowns."""

    store: TermStore
    bindings: Tuple[Tuple[str, int], ...]
    unconstrained: Tuple[str, ...]
    kinds: Mapping[str, str] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return True

    def __len__(self) -> int:
        return len(self.bindings)

    @property
    def domain(self) -> Tuple[str, ...]:
        return tuple(x for x, _ in self.bindings)

    def binding_terms(self) -> List[Tuple[str, Term]]:
        """Each ``t_i`` as written, still mentioning earlier ``x_j``."""
        return [(x, self.store.to_term(n)) for x, n in self.bindings]

    def dump(self) -> str:
        """One ``x <- t`` line per binding, in binding order."""
        return "\n".join("%s <- %s" % (x, format_term(t)) for x, t in self.binding_terms())

    def explicit(self, cap: Optional[int] = None) -> Dict[str, Term]:
        """The fully expanded mgu on its bound variables (may be huge)."""
        return {x: apply_mgu(self, Var(x), cap) for x, _ in self.bindings}


Unifier = Union[TriangularSubstitution, NotUnifiable]


# --------------------------------------------------------------------------
# Unification


class _Classes:
    """Union-find over store nodes with per-class schema information."""

    def __init__(self, store: TermStore, rigid: Set[str]):
        self.store = store
        self.rigid = rigid
        self.parent: Dict[int, int] = {}
        self.size: Dict[int, int] = {}
        self.schema: Dict[int, Optional[int]] = {}   # an application node
        self.const: Dict[int, Optional[str]] = {}    # a rigid variable
        self.flex: Dict[int, List[str]] = {}         # existential variables

    def add(self, nid: int) -> None:
        if nid in self.parent:
            return
        self.parent[nid] = nid
        self.size[nid] = 1
        if self.store.is_var(nid):
            name = self.store.name(nid)
            self.schema[nid] = None
            if name in self.rigid:
                self.const[nid], self.flex[nid] = name, []
            else:
                self.const[nid], self.flex[nid] = None, [name]
        else:
            self.schema[nid], self.const[nid], self.flex[nid] = nid, None, []
            for k in self.store.children(nid):
                self.add(k)

    def find(self, nid: int) -> int:
        root = nid
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[nid] != root:
            parent[nid], nid = root, parent[nid]
        return root

    def union(self, a: int, b: int) -> Optional[Tuple[int, int]]:
        """Merge two roots.  Returns the schema pair still to be unified, if any."""
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        ca, cb = self.const[a], self.const[b]
        sa, sb = self.schema[a], self.schema[b]
        if ca is not None and cb is not None and ca != cb:
            raise _Clash("%s = %s" % (ca, cb), (ca, cb))
        if (ca or cb) is not None and (sa if sa is not None else sb) is not None:
            s = sa if sa is not None else sb
            raise _Clash("%s = %s" % (ca or cb, format_term(self.store.to_term(s))),
                         tuple(v for v in (ca, cb) if v))
        self.const[a] = ca if ca is not None else cb
        fa, fb = self.flex[a], self.flex[b]
        if len(fa) < len(fb):
            fb.extend(fa)
            fa = fb
        else:
            fa.extend(fb)
        self.flex[a] = fa
        self.flex[b] = []
        self.schema[a] = sa if sa is not None else sb
        if sa is not None and sb is not None:
            return sa, sb
        return None


class _Clash(Exception):
    def __init__(self, detail: str, variables: Tuple[str, ...] = ()):
        self.detail = detail
        self.variables = variables


def unify(e: EquationSet, store: Optional[TermStore] = None) -> Unifier:
    """Solve ``e`` for its existential variables.

    Returns a :class:`TriangularSubstitution` or a :class:`NotUnifiable`
    verdict.  Runs in near-linear time in the size of the equations and
    never expands a substituted term.
    """
    store = store if store is not None else TermStore()
    rigid = {v for v, k in e.kinds.items() if k != EXISTENTIAL}
    # Variables occurring but not classified are free, hence rigid.
    pairs = []
    first_seen: Dict[str, int] = {}
    for eq in e.equations:
        for side in (eq.lhs, eq.rhs):
            for v in term_vars(side):
                if v not in first_seen:
                    first_seen[v] = len(first_seen)
                    if v not in e.kinds:
                        rigid.add(v)
        pairs.append((store.intern(eq.lhs), store.intern(eq.rhs)))
    uf = _Classes(store, rigid)
    for a, b in pairs:
        uf.add(a)
        uf.add(b)
    try:
        for a, b in pairs:
            stack = [(a, b)]
            while stack:
                x, y = stack.pop()
                rx, ry = uf.find(x), uf.find(y)
                if rx == ry:
                    continue
                pending = uf.union(rx, ry)
                if pending is not None:
                    sx, sy = pending
                    if store.name(sx) != store.name(sy) or \
                            len(store.children(sx)) != len(store.children(sy)):
                        raise _Clash("%s = %s" % (format_term(store.to_term(sx)),
                                                  format_term(store.to_term(sy))))
                    stack.extend(zip(store.children(sx), store.children(sy)))
    except _Clash as c:
        return NotUnifiable("clash", c.detail, c.variables)
    return _triangulate(e, store, uf, first_seen)


def _triangulate(e: EquationSet, store: TermStore, uf: _Classes,
                 first_seen: Dict[str, int]) -> Unifier:
    roots = sorted({uf.find(n) for n in uf.parent}, key=lambda r: r)

    def order_key(v: str) -> int:
        return first_seen.get(v, len(first_seen))

    # Dependencies between classes through their schemas; detect cycles.
    deps: Dict[int, Tuple[int, ...]] = {}
    for r in roots:
        s = uf.schema[r]
        deps[r] = tuple(uf.find(k) for k in store.children(s)) if s is not None else ()
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {r: WHITE for r in roots}
    topo: List[int] = []

    # Visit classes in sweep order of their earliest variable so that the
    # binding order is reproducible.
    def class_key(r: int) -> int:
        vs = uf.flex[r]
        return min((order_key(v) for v in vs), default=len(first_seen) + r)

    for start in sorted(roots, key=class_key):
        if colour[start] != WHITE:
            continue
        colour[start] = GREY
        stack = [(start, 0)]
        while stack:
            node, i = stack[-1]
            kids = deps[node]
            if i < len(kids):
                stack[-1] = (node, i + 1)
                k = kids[i]
                if colour[k] == GREY:
                    cycle = [n for n, _ in stack[[n for n, _ in stack].index(k):]]
                    names = tuple(v for c in cycle for v in sorted(uf.flex[c], key=order_key))
                    return NotUnifiable("occurs-cycle",
                                        "variables %s occur in their own solution" % ", ".join(names),
                                        names)
                if colour[k] == WHITE:
                    colour[k] = GREY
                    stack.append((k, 0))
            else:
                colour[node] = BLACK
                topo.append(node)
                stack.pop()

    # Representative node of every class, children first.
    rep: Dict[int, int] = {}
    head: Dict[int, Optional[str]] = {}
    for r in topo:
        flex = sorted(uf.flex[r], key=order_key)
        if uf.const[r] is not None:
            rep[r] = store.var(uf.const[r])
            head[r] = None
        elif flex:
            head[r] = flex[-1]
            rep[r] = store.var(flex[-1])
        else:
            s = uf.schema[r]
            rep[r] = store.node(store.name(s), tuple(rep[k] for k in deps[r]))
            head[r] = None

    bindings: List[Tuple[str, int]] = []
    unconstrained: List[str] = []
    for r in topo:
        flex = sorted(uf.flex[r], key=order_key)
        if not flex:
            continue
        if uf.const[r] is not None:
            for v in flex:
                bindings.append((v, rep[r]))
            continue
        h = head[r]
        if uf.schema[r] is not None:
            s = uf.schema[r]
            bindings.append((h, store.node(store.name(s), tuple(rep[k] for k in deps[r]))))
        else:
            unconstrained.append(h)
        for v in flex:
            if v != h:
                bindings.append((v, rep[r]))
    seen = {x for x, _ in bindings} | set(unconstrained)
    for v in e.existentials:
        if v not in seen:
            unconstrained.append(v)
            seen.add(v)
    return TriangularSubstitution(store, tuple(bindings), tuple(unconstrained), dict(e.kinds))


# --------------------------------------------------------------------------
# Precedences


def precedences(s: TriangularSubstitution) -> Set[Precedence]:
    """All ``x^y`` with the mgu assigning ``x`` a term containing universal ``y``.

    Each binding is flattened to the set of universal variables reachable
    through it, composing with the sets of earlier bindings.  This costs
    O(n^2) and never expands the mgu.
    """
    store = s.store
    kinds = s.kinds
    var_memo: Dict[int, FrozenSet[str]] = {}

    def node_vars(nid: int) -> FrozenSet[str]:
        # Variables of a store node, memoised per node (the store is a DAG).
        got = var_memo.get(nid)
        if got is not None:
            return got
        order = []
        stack = [nid]
        while stack:
            i = stack[-1]
            if i in var_memo:
                stack.pop()
                continue
            kids = store.children(i)
            missing = [k for k in kids if k not in var_memo]
            if store.is_var(i):
                var_memo[i] = frozenset((store.name(i),))
                stack.pop()
            elif missing:
                stack.extend(missing)
            else:
                acc: Set[str] = set()
                for k in kids:
                    acc |= var_memo[k]
                var_memo[i] = frozenset(acc)
                stack.pop()
        return var_memo[nid]

    reach: Dict[str, FrozenSet[str]] = {}
    out: Set[Precedence] = set()
    for x, nid in s.bindings:
        acc: Set[str] = set()
        for v in node_vars(nid):
            if kinds.get(v) == UNIVERSAL:
                acc.add(v)
            elif v in reach:
                acc |= reach[v]
        reach[x] = frozenset(acc)
        out.update(Precedence(x, y) for y in acc)
    return out


# --------------------------------------------------------------------------
# Expansion


def expanded_sizes(s: TriangularSubstitution) -> Dict[str, int]:
    """Size (node count) of the fully expanded term assigned to each bound variable."""
    store = s.store
    sizes: Dict[str, int] = {}
    memo: Dict[int, int] = {}

    def size(nid: int) -> int:
        if nid in memo:
            return memo[nid]
        stack = [nid]
        while stack:
            i = stack[-1]
            if i in memo:
                stack.pop()
                continue
            if store.is_var(i):
                memo[i] = sizes.get(store.name(i), 1)
                stack.pop()
                continue
            kids = store.children(i)
            missing = [k for k in kids if k not in memo]
            if missing:
                stack.extend(missing)
            else:
                memo[i] = 1 + sum(memo[k] for k in kids)
                stack.pop()
        return memo[nid]

    for x, nid in s.bindings:
        # Memo entries for variable nodes must reflect the binding of x
        # only after x is bound, and x never occurs in earlier terms.
        sizes[x] = size(nid)
        memo[store.var(x)] = sizes[x]
    return sizes


def mgu_size(s: TriangularSubstitution, t: Optional[Term] = None) -> int:
    """Expanded size of ``t`` under the mgu (of the whole mgu if ``t`` is None)."""
    sizes = expanded_sizes(s)
    if t is None:
        return sum(sizes.values())

    def go(u: Term) -> int:
        if isinstance(u, Var):
            return sizes.get(u.name, 1)
        return 1 + sum(go(a) for a in u.args)

    return go(t)


def apply_mgu(s: TriangularSubstitution, t: Term, cap: Optional[int] = None) -> Term:
    """The mgu applied to ``t``, fully expanded.

    Raises :class:`ResourceLimit` when the expansion would have more than
    ``cap`` nodes; the size is computed exactly beforehand without
    building anything.
    """
    if cap is not None:
        need = mgu_size(s, t)
        if need > cap:
            raise ResourceLimit("expanded term needs %d nodes, cap is %d" % (need, cap), need, cap)
    if not s.bindings:
        return t
    store = s.store
    value: Dict[str, Term] = {}
    memo: Dict[int, Term] = {}

    def expand(nid: int) -> Term:
        got = memo.get(nid)
        if got is not None:
            return got
        name, kids = store.nodes[nid]
        if kids is None:
            res = value.get(name, Var(name))
        else:
            res = App(name, tuple(expand(k) for k in kids))
        memo[nid] = res
        return res

    for x, nid in s.bindings:
        value[x] = expand(nid)
        memo[store.var(x)] = value[x]

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return value.get(u.name, u)
        if not u.args:
            return u
        return App(u.fn, tuple(go(a) for a in u.args))

    return go(t)


def unify_terms(pairs: Sequence[Tuple[Term, Term]], kinds: Mapping[str, str],
                existentials: Sequence[str] = ()) -> Unifier:
    """Convenience wrapper: unify a list of term pairs."""
    eqs = tuple(Equation(a, b) for a, b in pairs)
    return unify(EquationSet(eqs, dict(kinds), tuple(existentials)))
