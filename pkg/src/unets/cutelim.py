"""Local cut elimination for unification nets.

A cut ``cut{A ; ~A}`` is reduced according to the head of ``A``:

* atomic: the two links meeting the cut are merged into one link and the
  cut disappears;
* multiplicative: the cut becomes two cuts on the immediate subformulas;
* quantifier: both quantifiers are stripped and the freed variable becomes
  a variable of the new cut.

No terms are ever substituted, so every step is constant work apart from
renumbering.  :func:`normalize` runs on a private mutable copy and only
rebuilds a :class:`Linking` at the end, which keeps it linear.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple, Union

from .errors import IllFormedError
from .nets import Linking, check_correct
from .syntax import (
    Atom, CutSequent, Exists, Forall, Formula, LeafId, Par, Path, Tensor,
    formula_leaves, subst_formula, Var,
)

ATOMIC, MULTIPLICATIVE, QUANTIFIER = "atomic", "multiplicative", "quantifier"


@dataclass(frozen=True)
class Redex:
    cut: int
    kind: str
    links: Tuple[Tuple[LeafId, LeafId], ...] = ()  # atomic only: the links meeting the cut


def _kind(f: Formula) -> str:
    if isinstance(f, Atom):
        return ATOMIC
    if isinstance(f, (Tensor, Par)):
        return MULTIPLICATIVE
    return QUANTIFIER


def find_redexes(l: Linking) -> List[Redex]:
    """One redex per cut, in cut order."""
    host = l.host
    partner = l.partner()
    out = []
    for c, (a, b) in enumerate(host.cuts):
        kind = _kind(a)
        if kind != _kind(b) or (kind != ATOMIC and type(a) is type(b)):
            raise IllFormedError("cut %d joins %s and %s, which are not dual" % (c, a, b))
        if kind == ATOMIC:
            ends = []
            for side in (0, 1):
                leaf = LeafId(host.cut_member(c, side), ())
                if leaf not in partner:
                    raise IllFormedError("cut %d: side %d is not linked" % (c, side))
                ends.append((partner[leaf], leaf) if side == 0 else (leaf, partner[leaf]))
            out.append(Redex(c, ATOMIC, tuple(ends)))
        else:
            out.append(Redex(c, kind))
    return out


def _renumber(l: Linking, cuts, relocate: Callable[[LeafId], Optional[LeafId]], extra=()) -> Linking:
    links = []
    for a, b in l.links:
        a2, b2 = relocate(a), relocate(b)
        if a2 is not None and b2 is not None:
            links.append((a2, b2))
    links.extend(extra)
    return Linking(CutSequent(l.host.formulas, tuple(cuts)), links)


def reduce(l: Linking, r: Redex) -> Linking:
    """Reduce the cut named by ``r``; the result is again a linking on a cut sequent."""
    host = l.host
    c = r.cut
    lm, rm = host.cut_member(c, 0), host.cut_member(c, 1)
    a, b = host.cuts[c]
    cuts = list(host.cuts)
    if r.kind == ATOMIC:
        (p, _), (_, q) = r.links
        del cuts[c]

        def relocate(x: LeafId) -> Optional[LeafId]:
            if x.member in (lm, rm):
                return None
            return LeafId(x.member - 2, x.path) if x.member > rm else x

        new_p, new_q = relocate(p), relocate(q)
        if new_p is None or new_q is None:
            raise IllFormedError("cut %d is linked to itself" % c)
        return _renumber(l, cuts, relocate, [(new_p, new_q)])

    if r.kind == MULTIPLICATIVE:
        cuts[c:c + 1] = [(a.left, b.left), (a.right, b.right)]

        def relocate(x: LeafId) -> LeafId:
            if x.member in (lm, rm):
                side = x.member - lm
                return LeafId(lm + 2 * x.path[0] + side, x.path[1:])
            return LeafId(x.member + 2, x.path) if x.member > rm else x

        return _renumber(l, cuts, relocate)

    # Quantifier: keep the left variable; the right body is renamed to match.
    body_b = b.body if b.var == a.var else subst_formula(b.body, {b.var: Var(a.var)})
    cuts[c] = (a.body, body_b)

    def relocate(x: LeafId) -> LeafId:
        if x.member in (lm, rm):
            return LeafId(x.member, x.path[1:])
        return x

    return _renumber(l, cuts, relocate)


def size(l: Linking) -> int:
    return l.host.size()


def balance(l: Linking) -> int:
    """#links - #tensors - #cuts, invariant under reduction."""
    tensors = 0
    for f in l.host.members:
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Tensor):
                tensors += 1
            if isinstance(g, (Tensor, Par)):
                stack.extend((g.left, g.right))
            elif isinstance(g, (Forall, Exists)):
                stack.append(g.body)
    return len(l.links) - tensors - len(l.host.cuts)


# --------------------------------------------------------------------------
# Normalization


@dataclass(frozen=True)
class Normalization:
    net: Linking
    steps: int


def normalize(l: Linking, order: Union[str, int, random.Random] = "leftmost",
              debug: bool = False, trace: Optional[Callable[[Linking], None]] = None) -> Normalization:
    """Reduce every cut.

    ``order`` is ``"leftmost"`` (always the first cut) or a seed / random
    generator choosing the next cut uniformly.  With ``debug`` or ``trace``
    every intermediate linking is materialized (``debug`` also re-checks
    correctness after each step); otherwise the reduction runs on a
    compact working copy.
    """
    rng = None
    if order != "leftmost":
        rng = order if isinstance(order, random.Random) else random.Random(order)
    if debug or trace is not None:
        return _normalize_slow(l, rng, debug, trace)
    return _normalize_fast(l, rng)


def _normalize_slow(l, rng, debug, trace) -> Normalization:
    steps = 0
    if trace is not None:
        trace(l)
    while l.host.cuts:
        redexes = find_redexes(l)
        r = redexes[0] if rng is None else rng.choice(redexes)
        l = reduce(l, r)
        steps += 1
        if debug:
            v = check_correct(l, witness=False)
            if not v.correct:
                raise AssertionError("reduction %d broke correctness: %s" % (steps, v))
        if trace is not None:
            trace(l)
    return Normalization(l, steps)


def _normalize_fast(l: Linking, rng) -> Normalization:
    host = l.host
    uid: Dict[LeafId, int] = {}
    for i, leaf in enumerate(host.leaves()):
        uid[leaf] = i
    partner: Dict[int, int] = {}
    for a, b in l.links:
        partner[uid[a]], partner[uid[b]] = uid[b], uid[a]
    # A working cut: (left formula, left leaf uids, right formula, right leaf uids).
    counts: Dict[int, int] = {}

    def leaf_count(f: Formula) -> int:
        k = id(f)
        got = counts.get(k)
        if got is None:
            got = counts[k] = len(formula_leaves(f))
        return got

    work: List = []
    for c, (a, b) in enumerate(host.cuts):
        la = [uid[LeafId(host.cut_member(c, 0), p)] for p, _ in formula_leaves(a)]
        lb = [uid[LeafId(host.cut_member(c, 1), p)] for p, _ in formula_leaves(b)]
        work.append((a, la, b, lb))
    queue = deque(work)
    pool = work
    steps = 0
    while (queue if rng is None else pool):
        if rng is None:
            a, la, b, lb = queue.popleft()
        else:
            i = rng.randrange(len(pool))
            pool[i], pool[-1] = pool[-1], pool[i]
            a, la, b, lb = pool.pop()
        steps += 1
        if isinstance(a, Atom):
            x, y = la[0], lb[0]
            p, q = partner.pop(x), partner.pop(y)
            if p == y:
                raise IllFormedError("a cut is linked to itself")
            partner[p], partner[q] = q, p
            continue
        if isinstance(a, (Tensor, Par)):
            ka, kb = leaf_count(a.left), leaf_count(b.left)
            new = [(a.left, la[:ka], b.left, lb[:kb]), (a.right, la[ka:], b.right, lb[kb:])]
        else:
            new = [(a.body, la, b.body, lb)]
        if rng is None:
            queue.extendleft(reversed(new))
        else:
            pool.extend(new)
    leaf_of = {i: leaf for leaf, i in uid.items()}
    links = []
    for x, y in partner.items():
        if x < y:
            links.append((leaf_of[x], leaf_of[y]))
    return Normalization(Linking(CutSequent(host.formulas), links), steps)
