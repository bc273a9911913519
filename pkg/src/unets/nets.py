"""Linkings, their graphs, switching correctness and frames.

A :class:`Linking` pairs up the leaves of a (cut) sequent.  Its graph is
built on the cleansed encoding of the sequent: the formula forest with
edges directed child to parent, an undirected edge per link, and a leap
``ex x -> all y`` for every precedence of the mgu.  The linking is correct
when it is unifiable and every switching (one incoming edge kept at each
par and each universal vertex, leaps counting as incoming) is a tree.

Correctness is decided by contraction rather than by enumerating
switchings; :func:`enumerate_switchings` is kept as a small-scale oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import IllFormedError, ResourceLimit
from .syntax import (
    Atom, CutSequent, Exists, Forall, Formula, LeafId, Par, Path, Tensor,
    alpha_equal, children, cleanse, encode_cut, encode_cuts, formula_leaves, iter_nodes, subformula,
)
from .text import Signature, format_net_text, format_sequent, parse_net_text
from .unify import (
    EquationSet, NotUnifiable, Precedence, TermStore, TriangularSubstitution,
    equations_of, precedences, unify,
)

Link = Tuple[LeafId, LeafId]


def _norm(a: LeafId, b: LeafId) -> Link:
    return (a, b) if a <= b else (b, a)


# --------------------------------------------------------------------------
# Linkings


@dataclass(frozen=True)
class Linking:
    """A set of links on a host cut sequent."""

    host: CutSequent
    links: FrozenSet[Link]

    def __init__(self, host: CutSequent, links: Iterable[Tuple[LeafId, LeafId]]):
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "links", frozenset(_norm(LeafId(*a), LeafId(*b)) for a, b in links))

    # -- construction

    @classmethod
    def from_indices(cls, host: CutSequent, pairs: Iterable[Tuple[int, int]]) -> "Linking":
        leaves = host.leaves()
        out = []
        for i, j in pairs:
            if not (0 <= i < len(leaves) and 0 <= j < len(leaves)):
                raise IllFormedError("leaf index out of range in link (%d %d)" % (i, j))
            out.append((leaves[i], leaves[j]))
        return cls(host, out)

    @classmethod
    def parse(cls, text: str, signature: Optional[Signature] = None,
              validate: bool = True) -> "Linking":
        host, pairs = parse_net_text(text, signature)
        lk = cls.from_indices(host, pairs)
        if validate:
            lk.validate()
        return lk

    # -- views

    def index_pairs(self) -> List[Tuple[int, int]]:
        index = {leaf: i for i, leaf in enumerate(self.host.leaves())}
        return sorted(tuple(sorted((index[a], index[b]))) for a, b in self.links)

    def partner(self) -> Dict[LeafId, LeafId]:
        out = {}
        for a, b in self.links:
            out[a], out[b] = b, a
        return out

    def to_text(self) -> str:
        return format_net_text(self.host, self.index_pairs())

    def __str__(self) -> str:
        return self.to_text()

    # -- well-formedness

    def problems(self) -> List[str]:
        leaves = set(self.host.leaves())
        seen: Set[LeafId] = set()
        out = []
        for a, b in sorted(self.links):
            for l in (a, b):
                if l not in leaves:
                    out.append("link endpoint %r is not a leaf" % (l,))
                elif l in seen:
                    out.append("leaf %r is linked twice" % (l,))
                seen.add(l)
            if a == b:
                out.append("leaf %r is linked to itself" % (a,))
            if a in leaves and b in leaves:
                x, y = self.host.atom(a), self.host.atom(b)
                if x.pred != y.pred or x.negated == y.negated:
                    out.append("link joins %s and %s, which are not dual" % (x, y))
                elif len(x.args) != len(y.args):
                    out.append("link joins %s and %s of different arity" % (x, y))
        for l in sorted(leaves - seen):
            out.append("leaf %r is not linked" % (l,))
        return out

    def validate(self) -> "Linking":
        probs = self.problems()
        if probs:
            raise IllFormedError("; ".join(probs))
        return self

    @property
    def is_cut_free(self) -> bool:
        return not self.host.cuts

    def same_as(self, other: "Linking") -> bool:
        """Equal links on hosts that agree up to renaming of bound and cut variables."""
        return self.links == other.links and hosts_alpha_equal(self.host, other.host)


def hosts_alpha_equal(s: CutSequent, t: CutSequent) -> bool:
    if len(s.formulas) != len(t.formulas) or len(s.cuts) != len(t.cuts):
        return False
    if any(a != b for a, b in zip(s.formulas, t.formulas)):
        return False
    for (a, b), (c, d) in zip(s.cuts, t.cuts):
        # Cut variables are bound by the cut: compare the closed encodings.
        if not alpha_equal(encode_cut((a, b)), encode_cut((c, d))):
            return False
    return True


def encoded(l: Linking) -> Tuple[Linking, Dict[LeafId, LeafId]]:
    """The linking carried over to the cleansed cut encoding of its host."""
    enc, leaf_map = encode_cuts(l.host)
    clean, _ = cleanse(enc)
    return Linking(clean, [(leaf_map[a], leaf_map[b]) for a, b in l.links]), leaf_map


# --------------------------------------------------------------------------
# Graphs


SWITCHED = frozenset({"par", "forall"})
_KIND = {Atom: "atom", Tensor: "tensor", Par: "par", Forall: "forall", Exists: "exists"}


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str
    member: int
    path: Path
    label: str


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    kind: str  # "forest" (child to parent), "link" or "leap" (exists to forall)


@dataclass(eq=False)
class NetGraph:
    host: CutSequent
    vertices: List[Vertex]
    edges: List[Edge]
    index: Dict[Tuple[int, Path], int]
    mgu: Optional[TriangularSubstitution] = None
    precedences: FrozenSet[Precedence] = frozenset()
    binder: Dict[str, int] = field(default_factory=dict)

    def vertex(self, member: int, path: Path) -> Vertex:
        return self.vertices[self.index[(member, path)]]

    def incoming(self) -> Dict[int, List[int]]:
        """Edge ids entering each switched vertex."""
        out: Dict[int, List[int]] = {v.id: [] for v in self.vertices if v.kind in SWITCHED}
        for e in self.edges:
            if e.kind != "link" and e.dst in out:
                out[e.dst].append(e.id)
        return out

    def leaps(self) -> List[Edge]:
        return [e for e in self.edges if e.kind == "leap"]

    def switching_count(self) -> int:
        n = 1
        for ids in self.incoming().values():
            n *= len(ids)
        return n

    def to_dot(self) -> str:
        """Graphviz rendering: vertices with kinds, edges with kinds."""
        lines = ["digraph net {"]
        for v in self.vertices:
            lines.append('  v%d [label="%s", kind="%s"];' % (v.id, v.label.replace('"', r'\"'), v.kind))
        for e in self.edges:
            style = {"forest": "solid", "link": "dashed", "leap": "dotted"}[e.kind]
            arrow = ', dir="none"' if e.kind == "link" else ""
            lines.append('  v%d -> v%d [kind="%s", style="%s"%s];' % (e.src, e.dst, e.kind, style, arrow))
        lines.append("}")
        return "\n".join(lines)


def _label(f: Formula) -> str:
    if isinstance(f, Atom):
        from .syntax import format_formula
        return format_formula(f)
    if isinstance(f, Forall):
        return "all " + f.var
    if isinstance(f, Exists):
        return "ex " + f.var
    return "*" if isinstance(f, Tensor) else "|"


def forest_graph(host: CutSequent, links: Iterable[Link]) -> NetGraph:
    """Forest plus link edges (no leaps) for a cut-free host."""
    vertices: List[Vertex] = []
    edges: List[Edge] = []
    index: Dict[Tuple[int, Path], int] = {}
    binder: Dict[str, int] = {}
    for m, f in enumerate(host.formulas):
        for p, g in iter_nodes(f):
            vid = len(vertices)
            vertices.append(Vertex(vid, _KIND[type(g)], m, p, _label(g)))
            index[(m, p)] = vid
            if isinstance(g, (Forall, Exists)):
                binder[g.var] = vid
            if p:
                edges.append(Edge(len(edges), vid, index[(m, p[:-1])], "forest"))
    for a, b in sorted(links):
        edges.append(Edge(len(edges), index[(a.member, a.path)], index[(b.member, b.path)], "link"))
    return NetGraph(host, vertices, edges, index, binder=binder)


def build_graph(l: Linking, store: Optional[TermStore] = None):
    """The graph of a linking, or :class:`NotUnifiable`.

    The graph lives on the cleansed encoding of the host; use
    :func:`encoded` to map leaves of ``l`` onto it.
    """
    enc, _ = encoded(l)
    return graph_of_clean(enc, store)


def graph_of_clean(enc: Linking, store: Optional[TermStore] = None):
    """Graph of a linking whose host is already clean and cut-free."""
    mgu = unify(equations_of(enc.host, enc.links), store)
    if isinstance(mgu, NotUnifiable):
        return mgu
    g = forest_graph(enc.host, enc.links)
    precs = precedences(mgu)
    for pr in sorted(precs, key=lambda q: (g.binder[q.x], g.binder[q.y])):
        g.edges.append(Edge(len(g.edges), g.binder[pr.x], g.binder[pr.y], "leap"))
    g.mgu = mgu
    g.precedences = frozenset(precs)
    return g


# --------------------------------------------------------------------------
# Switchings


@dataclass(frozen=True)
class Switching:
    """For every switched vertex, the id of the incoming edge that is kept."""

    choice: Tuple[Tuple[int, int], ...]

    def kept_edges(self, g: NetGraph) -> List[Edge]:
        incoming = g.incoming()
        dropped = set()
        chosen = dict(self.choice)
        for v, ids in incoming.items():
            dropped.update(i for i in ids if i != chosen[v])
        return [e for e in g.edges if e.id not in dropped]

    def describe(self, g: NetGraph) -> str:
        parts = []
        for v, eid in self.choice:
            e = g.edges[eid]
            parts.append("%s<-%s" % (_vname(g, v), _vname(g, e.src)))
        return ", ".join(parts)


def _vname(g: NetGraph, vid: int) -> str:
    v = g.vertices[vid]
    return "%s@%d%s" % (v.label, v.member, "".join("." + str(i) for i in v.path))


def enumerate_switchings(g: NetGraph, cap: Optional[int] = 10 ** 4) -> Iterator[Switching]:
    """Every switching of ``g`` (there are prod of in-degrees of them)."""
    incoming = sorted(g.incoming().items())
    total = 1
    for _, ids in incoming:
        total *= len(ids)
    if cap is not None and total > cap:
        raise ResourceLimit("%d switchings exceed the cap of %d" % (total, cap), total, cap)
    verts = [v for v, _ in incoming]
    for combo in itertools.product(*[ids for _, ids in incoming]):
        yield Switching(tuple(zip(verts, combo)))


def is_tree(n_vertices: int, edges: Sequence[Tuple[int, int]]) -> bool:
    if len(edges) != n_vertices - 1:
        return False
    uf = list(range(n_vertices))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        uf[ra] = rb
    return True


def switching_is_tree(g: NetGraph, s: Switching) -> bool:
    return is_tree(len(g.vertices), [(e.src, e.dst) for e in s.kept_edges(g)])


# --------------------------------------------------------------------------
# Contraction


@dataclass(frozen=True)
class Contraction:
    ok: bool
    reason: str = ""
    loop_edge: Optional[int] = None


def contract(n_vertices: int, edges: Sequence[Tuple[int, int, int]],
             groups: Mapping[int, Sequence[int]]) -> Contraction:
    """Decide whether every switching is a tree.

    ``edges`` are ``(id, u, v)`` triples; ``groups`` maps each switched
    vertex to the ids of its incoming edges, exactly one of which a
    switching keeps.  Ungrouped edges are kept by every switching.  Edges
    are contracted while they join distinct classes: ungrouped edges one at
    a time and a group once all of its edges join the same two classes.
    """
    if n_vertices == 0:
        return Contraction(True)
    grouped = {eid for ids in groups.values() for eid in ids}
    ends = {eid: (u, v) for eid, u, v in edges}
    parent = list(range(n_vertices))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    classes = n_vertices
    for eid, u, v in edges:
        if eid in grouped:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            return Contraction(False, "cycle through kept edges", eid)
        parent[ru] = rv
        classes -= 1
    pending = {v: list(ids) for v, ids in groups.items()}
    progress = True
    while pending and progress:
        progress = False
        for v in list(pending):
            ids = pending[v]
            target = find(v)
            sources = set()
            for eid in ids:
                a, b = ends[eid]
                s = find(a) if b == v else find(b)
                if s == target:
                    return Contraction(False, "switchable edge closes a cycle", eid)
                sources.add(s)
            if len(sources) == 1:
                parent[target] = sources.pop()
                classes -= 1
                del pending[v]
                progress = True
    if pending:
        return Contraction(False, "%d switched vertices cannot be contracted" % len(pending))
    if classes != 1:
        return Contraction(False, "graph is disconnected")
    return Contraction(True)


def graph_contraction(g: NetGraph) -> Contraction:
    return contract(len(g.vertices), [(e.id, e.src, e.dst) for e in g.edges], g.incoming())


def find_bad_switching(g: NetGraph, c: Contraction, cap: int = 10 ** 4,
                       tries: int = 2000, seed: int = 0) -> Optional[Switching]:
    """A switching that is not a tree, for diagnostics."""
    incoming = sorted(g.incoming().items())
    verts = [v for v, _ in incoming]
    if c.loop_edge is not None:
        e = g.edges[c.loop_edge]
        forced = {e.dst: e.id} if e.dst in g.incoming() else {}
        base = [forced.get(v, ids[0]) for v, ids in incoming]
        s = Switching(tuple(zip(verts, base)))
        if not switching_is_tree(g, s):
            return s
    total = g.switching_count()
    if total <= cap:
        for s in enumerate_switchings(g, None):
            if not switching_is_tree(g, s):
                return s
        return None
    rng = random.Random(seed)
    for _ in range(tries):
        s = Switching(tuple((v, rng.choice(ids)) for v, ids in incoming))
        if not switching_is_tree(g, s):
            return s
    return None


# --------------------------------------------------------------------------
# Correctness


@dataclass(frozen=True, eq=False)
class Verdict:
    status: str  # "correct", "not-unifiable" or "switching-failure"
    detail: str = ""
    graph: Optional[NetGraph] = None
    witness: Optional[Switching] = None
    unifier: Optional[object] = None

    @property
    def correct(self) -> bool:
        return self.status == "correct"

    def __bool__(self) -> bool:
        return self.correct

    def __str__(self) -> str:
        if self.correct:
            return "correct"
        out = "%s: %s" % (self.status, self.detail)
        if self.witness is not None and self.graph is not None:
            out += " [switching: %s]" % self.witness.describe(self.graph)
        return out


def check_correct(l: Linking, witness: bool = True, store: Optional[TermStore] = None,
                  max_switchings: int = 10 ** 4) -> Verdict:
    """Is ``l`` a unification net?  Cuts are checked through their encoding.

    ``max_switchings`` only bounds the search for a failing switching to
    report; the verdict itself never enumerates switchings.
    """
    l.validate()
    g = build_graph(l, store)
    if isinstance(g, NotUnifiable):
        return Verdict("not-unifiable", str(g), unifier=g)
    c = graph_contraction(g)
    if c.ok:
        return Verdict("correct", graph=g, unifier=g.mgu)
    w = find_bad_switching(g, c, max_switchings) if witness else None
    return Verdict("switching-failure", c.reason, g, w, g.mgu)


def is_correct(l: Linking) -> bool:
    return check_correct(l, witness=False).correct


# --------------------------------------------------------------------------
# Frames and MLL checking


def frame(l: Linking) -> Linking:
    """Propositional encoding of a unifiable linking.

    Each precedence ``x^y`` (in order of binder positions) becomes a fresh
    nullary link ``#k`` / ``~#k`` wrapped as ``#k * ex x A`` and
    ``~#k | all y B``; then quantifiers and terms are erased.
    """
    enc, leaf_map = encoded(l)
    g = graph_of_clean(enc)
    if isinstance(g, NotUnifiable):
        raise IllFormedError("frame of a non-unifiable linking: %s" % g)
    host = enc.host
    ordered = sorted(g.precedences, key=lambda q: (g.binder[q.x], g.binder[q.y]))
    wrap: Dict[Tuple[int, Path], List[Tuple[int, bool]]] = {}
    for k, pr in enumerate(ordered):
        for var, positive in ((pr.x, True), (pr.y, False)):
            v = g.vertices[g.binder[var]]
            wrap.setdefault((v.member, v.path), []).append((k, positive))

    new_formulas = []
    leaf_paths: Dict[LeafId, LeafId] = {}
    frame_leaves: Dict[int, Dict[bool, LeafId]] = {}
    for m, f in enumerate(host.formulas):
        nf, lmap, fl = _frame_formula(f, m, (), wrap)
        new_formulas.append(nf)
        for old, new in lmap.items():
            leaf_paths[LeafId(m, old)] = LeafId(m, new)
        for k, pos, p in fl:
            frame_leaves.setdefault(k, {})[pos] = LeafId(m, p)
    new_host = CutSequent(tuple(new_formulas))
    links = [(leaf_paths[a], leaf_paths[b]) for a, b in enc.links]
    links += [(frame_leaves[k][True], frame_leaves[k][False]) for k in range(len(ordered))]
    return Linking(new_host, links)


def _frame_formula(f: Formula, m: int, path: Path, wrap):
    """Returns (new formula, old leaf path -> new leaf path, frame leaves)."""
    if isinstance(f, Atom):
        core, lmap, fl = Atom(f.pred, (), f.negated), {path: ()}, []
    elif isinstance(f, (Tensor, Par)):
        l, ll, lf = _frame_formula(f.left, m, path + (0,), wrap)
        r, rl, rf = _frame_formula(f.right, m, path + (1,), wrap)
        core = type(f)(l, r)
        lmap = {k: (0,) + v for k, v in ll.items()}
        lmap.update({k: (1,) + v for k, v in rl.items()})
        fl = [(k, pos, (0,) + p) for k, pos, p in lf] + [(k, pos, (1,) + p) for k, pos, p in rf]
    else:
        core, lmap, fl = _frame_formula(f.body, m, path + (0,), wrap)
    for k, positive in reversed(wrap.get((m, path), [])):
        atom = Atom("#%d" % k, (), not positive)
        core = Tensor(atom, core) if positive else Par(atom, core)
        lmap = {kk: (1,) + v for kk, v in lmap.items()}
        fl = [(kk, pos, (1,) + p) for kk, pos, p in fl] + [(k, positive, (0,))]
    return core, lmap, fl


def mll_graph(l: Linking) -> NetGraph:
    """Forest plus links of a propositional cut-free linking."""
    return forest_graph(l.host, l.links)


def check_mll(l: Linking) -> bool:
    """Every switching of a propositional linking is a tree."""
    for f in l.host.members:
        for _, g in iter_nodes(f):
            if isinstance(g, (Forall, Exists)) or (isinstance(g, Atom) and g.args):
                raise IllFormedError("check_mll needs a propositional linking without terms")
    if l.host.cuts:
        enc, _ = encoded(l)
        return graph_contraction(mll_graph(enc)).ok
    return graph_contraction(mll_graph(l)).ok


# --------------------------------------------------------------------------
# Oracle helpers used by tests and benchmarks


def brute_force_correct(l: Linking, mgu_precedences, cap: int = 10 ** 4) -> bool:
    """Correctness by enumerating switchings, given precedences from elsewhere.

    ``mgu_precedences`` is a set of :class:`Precedence` (or ``None`` when the
    linking is not unifiable).
    """
    if mgu_precedences is None:
        return False
    enc, _ = encoded(l)
    g = forest_graph(enc.host, enc.links)
    for pr in sorted(mgu_precedences, key=lambda q: (g.binder[q.x], g.binder[q.y])):
        g.edges.append(Edge(len(g.edges), g.binder[pr.x], g.binder[pr.y], "leap"))
    return all(switching_is_tree(g, s) for s in enumerate_switchings(g, cap))
