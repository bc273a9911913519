"""Generators for the blow-up families.

* ``par-blowup(i)``: the formula ``A_i`` whose unique net has one link but
  whose unique cut-free proof has an axiom with ``2**i`` occurrences of ``c``.
* ``quantifier-blowup(n)``: the two-formula sequent ``Gamma_n`` built only
  from existentials; its Girard net's axiom holds ``2*(2**n - 1)`` ``c``'s.
* ``cut-chain(n)``: ``n`` copies of
  ``all x. ~P(x), ex z. (P(z) * ~P(f(z,z))), ex y. P(y)`` cut together,
  the last existential of each copy against the universal of the next.

``dot`` is the binary function symbol written infix in the literature.
"""

from __future__ import annotations

from typing import List, Tuple

from .girard import GNode, GirardNet, girard_of
from .nets import Linking
from .syntax import App, Atom, CutSequent, Exists, Forall, LeafId, Par, Tensor, Term, Var

FAMILIES = ("par-blowup", "quantifier-blowup", "cut-chain")

C = App("c")


def dot(s: Term, t: Term) -> Term:
    return App("dot", (s, t))


def _exists_all(names: List[str], body):
    for x in reversed(names):
        body = Exists(x, body)
    return body


# --------------------------------------------------------------------------
# par-blowup


def par_blowup_formula(i: int):
    """``ex x_i ... ex x_1. ~P((c.x_1).x_2 ... .x_i) | P(x_i.(... (x_1.c)))``."""
    left: Term = C
    right: Term = C
    for k in range(1, i + 1):
        left = dot(left, Var("x%d" % k))
        right = dot(Var("x%d" % k), right)
    body = Par(Atom("P", (left,), True), Atom("P", (right,)))
    return _exists_all(["x%d" % k for k in range(i, 0, -1)], body)


def par_blowup(i: int) -> Linking:
    if i < 0:
        raise ValueError("par-blowup needs i >= 0")
    f = par_blowup_formula(i)
    path = (0,) * i
    return Linking(CutSequent((f,)), [(LeafId(0, path + (0,)), LeafId(0, path + (1,)))])


# --------------------------------------------------------------------------
# quantifier-blowup


def _alpha_args(n: int) -> Tuple[Term, ...]:
    out = []
    for i in range(1, n + 1):
        out.append(Var("x%d" % i) if i % 2 else dot(Var("x%d" % (i - 1)), Var("x%d" % (i - 1))))
    return tuple(out)


def _beta_args(n: int) -> Tuple[Term, ...]:
    out: List[Term] = []
    for i in range(1, n + 1):
        if i == 1:
            out.append(C)
        elif i % 2 == 0:
            out.append(Var("x%d" % i))
        else:
            out.append(dot(Var("x%d" % (i - 1)), Var("x%d" % (i - 1))))
    return tuple(out)


def quantifier_blowup_sequent(n: int) -> CutSequent:
    """``ex x1 ex x3 ... ~P(alpha_n), ex x2 ex x4 ... P(beta_n)``."""
    odd = ["x%d" % i for i in range(1, n + 1, 2)]
    even = ["x%d" % i for i in range(2, n + 1, 2)]
    return CutSequent((_exists_all(odd, Atom("P", _alpha_args(n), True)),
                       _exists_all(even, Atom("P", _beta_args(n)))))


def quantifier_blowup(n: int) -> Linking:
    if n < 0:
        raise ValueError("quantifier-blowup needs n >= 0")
    s = quantifier_blowup_sequent(n)
    odd = (n + 1) // 2
    even = n // 2
    return Linking(s, [(LeafId(0, (0,) * odd), LeafId(1, (0,) * even))])


# --------------------------------------------------------------------------
# cut-chain


def _copy(k: int):
    x, z, y = Var("x%d" % k), Var("z%d" % k), Var("y%d" % k)
    forall = Forall(x.name, Atom("P", (x,), True))
    middle = Exists(z.name, Tensor(Atom("P", (z,)), Atom("P", (App("f", (z, z)),), True)))
    exists = Exists(y.name, Atom("P", (y,)))
    return forall, middle, exists


def g_copy(k: int = 1) -> Linking:
    """The single net ``G`` with its variables indexed by ``k``."""
    forall, middle, exists = _copy(k)
    s = CutSequent((forall, middle, exists))
    return Linking(s, [(LeafId(0, (0,)), LeafId(1, (0, 0))), (LeafId(1, (0, 1)), LeafId(2, (0,)))])


def cut_chain(n: int) -> Linking:
    """``n`` copies of ``G`` joined by ``n - 1`` cuts.

    Members: the first copy's universal, every copy's middle formula, the
    last copy's existential, then the cuts ``cut{ex y_k. P(y_k) ; all x_{k+1}. ~P(x_{k+1})}``.
    """
    if n < 1:
        raise ValueError("cut-chain needs n >= 1")
    copies = [_copy(k) for k in range(1, n + 1)]
    formulas = (copies[0][0],) + tuple(c[1] for c in copies) + (copies[-1][2],)
    cuts = tuple((copies[k][2], copies[k + 1][0]) for k in range(n - 1))
    host = CutSequent(formulas, cuts)
    nf = len(formulas)
    links = []
    for k in range(n):
        # leaf ~P(x_k): the first formula or the right side of cut k-1
        neg_x = LeafId(0, (0,)) if k == 0 else LeafId(host.cut_member(k - 1, 1), (0,))
        pos_y = LeafId(nf - 1, (0,)) if k == n - 1 else LeafId(host.cut_member(k, 0), (0,))
        links.append((neg_x, LeafId(1 + k, (0, 0))))
        links.append((LeafId(1 + k, (0, 1)), pos_y))
    return Linking(host, links)


def _shift(node: GNode, off: int) -> GNode:
    if node.kind == "atom":
        return GNode(node.kind, node.formula, (), node.var, node.witness, node.uid + off)
    return GNode(node.kind, node.formula, tuple(_shift(c, off) for c in node.children),
                 node.var, node.witness, node.uid)


def girard_chain(n: int) -> GirardNet:
    """The Girard net ``G^n``: Girard nets of ``n`` copies of ``G`` cut together."""
    if n < 1:
        raise ValueError("G^n needs n >= 1")
    parts = []
    axioms = set()
    for k in range(1, n + 1):
        g = girard_of(g_copy(k))
        off = 100 * k
        parts.append(tuple(_shift(r, off) for r in g.conclusions))
        axioms |= {(a + off, b + off) for a, b in g.axioms}
    conclusions = (parts[0][0],) + tuple(p[1] for p in parts) + (parts[-1][2],)
    cuts = tuple((parts[k][2], parts[k + 1][0]) for k in range(n - 1))
    return GirardNet(conclusions, cuts, frozenset(axioms))


def family(name: str, n: int) -> Linking:
    if name == "par-blowup":
        return par_blowup(n)
    if name == "quantifier-blowup":
        return quantifier_blowup(n)
    if name == "cut-chain":
        return cut_chain(n)
    raise ValueError("unknown family %r (choose from %s)" % (name, ", ".join(FAMILIES)))
