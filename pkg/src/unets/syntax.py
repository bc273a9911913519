"""First-order MLL syntax: terms, formulas, cut sequents and their leaves.

Formulas are immutable trees.  A node inside a formula is addressed by its
*path*, the sequence of child indices from the root (``0``/``1`` for the two
sides of a binary connective, ``0`` for a quantifier body).  A leaf of a cut
sequent is addressed by a :class:`LeafId`, a member index plus a path, where
the members are the formulas followed by the two sides of each cut.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

Path = Tuple[int, ...]


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    """Function application; a constant is an application with no arguments."""

    fn: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, App]

_CONSTANT_LETTERS = frozenset("abcde")


def is_constant_name(name: str) -> bool:
    """Bare identifiers beginning with a-e denote constants, all others variables."""
    return name[:1] in _CONSTANT_LETTERS


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn if is_constant_name(t.fn) else t.fn + "()"
    return "%s(%s)" % (t.fn, ",".join(format_term(a) for a in t.args))


def term_vars(t: Term, acc: Optional[List[str]] = None) -> List[str]:
    """Variables of ``t`` in first-occurrence order (no repeats)."""
    if acc is None:
        acc = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            if u.name not in acc:
                acc.append(u.name)
        else:
            stack.extend(reversed(u.args))
    return acc


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def count_symbol(t: Term, name: str) -> int:
    """Occurrences of a variable or function symbol called ``name`` in ``t``."""
    if isinstance(t, Var):
        return int(t.name == name)
    return int(t.fn == name) + sum(count_symbol(a, name) for a in t.args)


def subst_term(t: Term, s: Dict[str, Term]) -> Term:
    """Simultaneous substitution of variables."""
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    return App(t.fn, tuple(subst_term(a, s) for a in t.args))


# --------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()
    negated: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def symbol(self) -> "PredicateSymbol":
        return PredicateSymbol(self.pred, self.negated, len(self.args))

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Par:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, Tensor, Par, Forall, Exists]
Binary = (Tensor, Par)
Quantifier = (Forall, Exists)


class PredicateSymbol(NamedTuple):
    name: str
    negated: bool
    arity: int

    def dual(self) -> "PredicateSymbol":
        return PredicateSymbol(self.name, not self.negated, self.arity)


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Binary):
        return (f.left, f.right)
    return (f.body,)


def dual(f: Formula) -> Formula:
    """De Morgan dual: flip atom polarity, swap tensor/par and forall/exists."""
    if isinstance(f, Atom):
        return Atom(f.pred, f.args, not f.negated)
    if isinstance(f, Tensor):
        return Par(dual(f.left), dual(f.right))
    if isinstance(f, Par):
        return Tensor(dual(f.left), dual(f.right))
    if isinstance(f, Forall):
        return Exists(f.var, dual(f.body))
    return Forall(f.var, dual(f.body))


def subformula(f: Formula, path: Path) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(f, Binary):
        if i == 0:
            return type(f)(replace_at(f.left, rest, new), f.right)
        return type(f)(f.left, replace_at(f.right, rest, new))
    if isinstance(f, Quantifier):
        return type(f)(f.var, replace_at(f.body, rest, new))
    raise IndexError("path descends below an atom")


def iter_nodes(f: Formula, prefix: Path = ()) -> Iterator[Tuple[Path, Formula]]:
    """All (path, subformula) pairs in left-to-right preorder."""
    stack = [(prefix, f)]
    while stack:
        p, g = stack.pop()
        yield p, g
        kids = children(g)
        for i in reversed(range(len(kids))):
            stack.append((p + (i,), kids[i]))


def formula_leaves(f: Formula) -> List[Tuple[Path, Atom]]:
    return [(p, g) for p, g in iter_nodes(f) if isinstance(g, Atom)]


def formula_size(f: Formula) -> int:
    return sum(1 for _ in iter_nodes(f))


def free_vars(f: Formula) -> List[str]:
    """Free variables in first-occurrence, left-to-right order."""
    out: List[str] = []

    def walk(g: Formula, bound: frozenset) -> None:
        if isinstance(g, Atom):
            for a in g.args:
                for v in term_vars(a):
                    if v not in bound and v not in out:
                        out.append(v)
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return out


def bound_vars(f: Formula) -> List[str]:
    return [g.var for _, g in iter_nodes(f) if isinstance(g, Quantifier)]


def all_var_names(f: Formula) -> set:
    names = set(bound_vars(f))
    for _, a in formula_leaves(f):
        for t in a.args:
            names.update(term_vars(t))
    return names


def occurs_free(f: Formula, x: str) -> bool:
    return x in free_vars(f)


def subst_formula(f: Formula, s: Dict[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    if not s:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, s) for a in f.args), f.negated)
    if isinstance(f, Binary):
        return type(f)(subst_formula(f.left, s), subst_formula(f.right, s))
    inner = {k: v for k, v in s.items() if k != f.var}
    if not inner:
        return f
    body_free = set(free_vars(f.body))
    inner = {k: v for k, v in inner.items() if k in body_free}
    if not inner:
        return f
    incoming = set()
    for t in inner.values():
        incoming.update(term_vars(t))
    if f.var in incoming:
        taken = incoming | all_var_names(f.body) | set(inner)
        fresh = next(fresh_names(f.var, taken))
        body = subst_formula(f.body, {f.var: Var(fresh)})
        return type(f)(fresh, subst_formula(body, inner))
    return type(f)(f.var, subst_formula(f.body, inner))


def alpha_equal(f: Formula, g: Formula) -> bool:
    """Equality up to renaming of bound variables."""

    def eq_term(s: Term, t: Term, ls: dict, rs: dict) -> bool:
        if isinstance(s, Var) and isinstance(t, Var):
            a, b = ls.get(s.name), rs.get(t.name)
            if a is None and b is None:
                return s.name == t.name
            return a is not None and a == b
        if isinstance(s, App) and isinstance(t, App):
            return (s.fn == t.fn and len(s.args) == len(t.args)
                    and all(eq_term(x, y, ls, rs) for x, y in zip(s.args, t.args)))
        return False

    def go(a: Formula, b: Formula, ls: dict, rs: dict, depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            return (a.pred == b.pred and a.negated == b.negated
                    and len(a.args) == len(b.args)
                    and all(eq_term(x, y, ls, rs) for x, y in zip(a.args, b.args)))
        if isinstance(a, Binary):
            return go(a.left, b.left, ls, rs, depth) and go(a.right, b.right, ls, rs, depth)
        return go(a.body, b.body, {**ls, a.var: depth}, {**rs, b.var: depth}, depth + 1)

    return go(f, g, {}, {}, 0)


def rename_bound(f: Formula, renames: Dict[Path, str], prefix: Path = ()) -> Formula:
    """Rename the binders found at the given paths (relative to ``prefix``)."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Binary):
        return type(f)(rename_bound(f.left, renames, prefix + (0,)),
                       rename_bound(f.right, renames, prefix + (1,)))
    body = rename_bound(f.body, renames, prefix + (0,))
    new = renames.get(prefix)
    if new is None or new == f.var:
        return type(f)(f.var, body)
    return type(f)(new, subst_formula(body, {f.var: Var(new)}))


# --------------------------------------------------------------------------
# Fresh names

_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_names(base: str, taken: Iterable[str]) -> Iterator[str]:
    """Yield ``base1``, ``base2``, ... skipping names already in ``taken``.

    A numeric suffix already on ``base`` is stripped first, so renaming ``x1``
    produces ``x2`` rather than ``x11``.
    """
    taken = set(taken)
    m = _SUFFIX.match(base)
    stem = m.group(1) if m and m.group(1) else base
    for i in itertools.count(1):
        name = "%s%d" % (stem, i)
        if name not in taken:
            taken.add(name)
            yield name


# --------------------------------------------------------------------------
# Cut sequents


class LeafId(NamedTuple):
    member: int
    path: Path


Cut = Tuple[Formula, Formula]


@dataclass(frozen=True)
class CutSequent:
    """An ordered list of formulas together with an ordered list of cuts."""

    formulas: Tuple[Formula, ...] = ()
    cuts: Tuple[Cut, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "cuts", tuple(tuple(c) for c in self.cuts))

    @property
    def members(self) -> Tuple[Formula, ...]:
        out = list(self.formulas)
        for a, b in self.cuts:
            out.extend((a, b))
        return tuple(out)

    def member_kind(self, m: int) -> Tuple[str, int, int]:
        """('formula', i, 0) or ('cut', c, side) for member index ``m``."""
        n = len(self.formulas)
        if m < n:
            return ("formula", m, 0)
        c, side = divmod(m - n, 2)
        return ("cut", c, side)

    def cut_member(self, c: int, side: int) -> int:
        return len(self.formulas) + 2 * c + side

    def leaves(self) -> List[LeafId]:
        out = []
        for m, f in enumerate(self.members):
            out.extend(LeafId(m, p) for p, _ in formula_leaves(f))
        return out

    def atom(self, leaf: LeafId) -> Atom:
        a = subformula(self.members[leaf.member], leaf.path)
        if not isinstance(a, Atom):
            raise ValueError("%r does not resolve to an atom" % (leaf,))
        return a

    def node(self, member: int, path: Path) -> Formula:
        return subformula(self.members[member], path)

    @property
    def is_cut_free(self) -> bool:
        return not self.cuts

    def size(self) -> int:
        return sum(formula_size(f) for f in self.members)

    def free_vars(self) -> List[str]:
        """Free variables of the formulas; cut variables are bound by their cut."""
        out: List[str] = []
        for f in self.formulas:
            for v in free_vars(f):
                if v not in out:
                    out.append(v)
        return out

    def __str__(self) -> str:
        from .text import format_sequent
        return format_sequent(self)


Sequent = CutSequent


def sequent(*formulas: Formula, cuts: Iterable[Cut] = ()) -> CutSequent:
    return CutSequent(tuple(formulas), tuple(cuts))


def cut_vars(cut: Cut) -> List[str]:
    return free_vars(cut[0])


def is_dual_pair(a: Formula, b: Formula) -> bool:
    return alpha_equal(dual(a), b)


# --------------------------------------------------------------------------
# Cleansing


def is_clean(s: CutSequent) -> bool:
    seen = set(s.free_vars())
    for f in s.formulas:
        for v in bound_vars(f):
            if v in seen:
                return False
            seen.add(v)
    for cut in s.cuts:
        for v in cut_vars(cut):
            if v in seen:
                return False
            seen.add(v)
        for side in cut:
            for v in bound_vars(side):
                if v in seen:
                    return False
                seen.add(v)
    return True


def cleanse(s: CutSequent) -> Tuple[CutSequent, Dict[Tuple[int, object], str]]:
    """Rename bound and cut variables apart from each other and from free ones.

    Free variables of the formulas keep their names; the first binder of any
    name that does not clash keeps it too.  Returns the clean sequent and the
    renaming, keyed by ``(member, path)`` for quantifier binders and by
    ``(member, name)`` for cut variables (member = left side of the cut).
    """
    taken = set(s.free_vars())
    for f in s.members:
        taken |= all_var_names(f)
    used = set(s.free_vars())
    renaming: Dict[Tuple[int, object], str] = {}

    def pick(name: str) -> str:
        if name not in used:
            used.add(name)
            return name
        new = next(fresh_names(name, taken | used))
        used.add(new)
        taken.add(new)
        return new

    def clean_formula(m: int, f: Formula) -> Formula:
        renames = {}
        for p, g in iter_nodes(f):
            if isinstance(g, Quantifier):
                new = pick(g.var)
                if new != g.var:
                    renames[p] = new
                    renaming[(m, p)] = new
        return rename_bound(f, renames) if renames else f

    formulas = [clean_formula(m, f) for m, f in enumerate(s.formulas)]
    cuts = []
    for c, (a, b) in enumerate(s.cuts):
        m = s.cut_member(c, 0)
        cv = {}
        for v in cut_vars((a, b)):
            new = pick(v)
            if new != v:
                cv[v] = Var(new)
                renaming[(m, v)] = new
        if cv:
            a, b = subst_formula(a, cv), subst_formula(b, cv)
        cuts.append((clean_formula(m, a), clean_formula(m + 1, b)))
    return CutSequent(tuple(formulas), tuple(cuts)), renaming


# --------------------------------------------------------------------------
# Cut encoding


def encode_cut(cut: Cut) -> Formula:
    """The existentially closed tensor of a cut over its free variables."""
    a, b = cut
    body: Formula = Tensor(a, b)
    for v in reversed(cut_vars(cut)):
        body = Exists(v, body)
    return body


def encode_cuts(s: CutSequent) -> Tuple[CutSequent, Dict[LeafId, LeafId]]:
    """Replace every cut by its encoding, appended after the formulas.

    Returns the cut-free sequent and a map from each leaf of ``s`` to the
    leaf of the encoding carrying the same atom.
    """
    n = len(s.formulas)
    enc = list(s.formulas)
    leaf_map: Dict[LeafId, LeafId] = {}
    for m, f in enumerate(s.formulas):
        for p, _ in formula_leaves(f):
            leaf_map[LeafId(m, p)] = LeafId(m, p)
    for c, cut in enumerate(s.cuts):
        depth = len(cut_vars(cut))
        enc.append(encode_cut(cut))
        for side in (0, 1):
            for p, _ in formula_leaves(cut[side]):
                leaf_map[LeafId(n + 2 * c + side, p)] = LeafId(n + c, (0,) * depth + (side,) + p)
    return CutSequent(tuple(enc), ()), leaf_map


def encoded_cut_prefix(s: CutSequent, c: int) -> Tuple[int, int]:
    """(member, closure depth) of cut ``c`` inside ``encode_cuts(s)``."""
    return len(s.formulas) + c, len(cut_vars(s.cuts[c]))


# --------------------------------------------------------------------------
# Pretty printing (grammar shared with :mod:`unets.text`)


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        head = ("~" if f.negated else "") + f.pred
        if not f.args:
            return head
        return "%s(%s)" % (head, ",".join(format_term(a) for a in f.args))
    if isinstance(f, Quantifier):
        kw = "all" if isinstance(f, Forall) else "ex"
        return "%s %s. %s" % (kw, f.var, format_formula(f.body))
    op = " * " if isinstance(f, Tensor) else " | "
    return _wrap(f.left) + op + _wrap(f.right)


def _wrap(f: Formula) -> str:
    s = format_formula(f)
    return s if isinstance(f, Atom) else "(" + s + ")"
