"""Reading and writing the plain-text formats for sequents and nets.

Grammar, loosest binding first::

    sequent  ::= [ member { "," member } ]
    member   ::= formula | "cut" "{" formula ";" formula "}"
    formula  ::= ("all" | "ex") VAR "." formula | par
    par      ::= tensor { "|" tensor }          (left associative)
    tensor   ::= unit { "*" unit }               (left associative)
    unit     ::= atom | "(" formula ")"
    atom     ::= ["~"] PRED [ "(" term { "," term } ")" ]
    term     ::= NAME [ "(" [ term { "," term } ] ")" ]

A quantifier may also appear as the last operand of ``|`` or ``*``, in which
case its body extends as far right as possible.  A bare name starting with
one of ``a``..``e`` is a constant, any other bare name is a variable, and
``k()`` writes a constant with any name.

Cuts may be written anywhere among the formulas; they are stored (and
printed) after the formulas, and leaf numbering follows the stored order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import ArityError, MalformedCutError, ParseError
from .syntax import (
    App, Atom, CutSequent, Exists, Forall, Formula, Par, Tensor, Term, Var,
    format_formula, format_term, is_constant_name, is_dual_pair,
)

KEYWORDS = frozenset({"all", "ex", "cut"})

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z_#][A-Za-z0-9_#']*|\d+)
  | (?P<punct>[(),.*|~{};])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "punct" or "eof"
    value: str
    pos: int


def tokenize(text: str, start: int = 0, end: Optional[int] = None) -> List[Token]:
    end = len(text) if end is None else end
    pos = start
    out = []
    while pos < end:
        m = _TOKEN.match(text, pos, end)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], text, pos)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", end))
    return out


@dataclass
class Signature:
    """Arities of predicate and function symbols, fixed at first use."""

    predicates: Dict[str, int] = field(default_factory=dict)
    functions: Dict[str, int] = field(default_factory=dict)

    def use_predicate(self, name: str, arity: int) -> bool:
        return self.predicates.setdefault(name, arity) == arity

    def use_function(self, name: str, arity: int) -> bool:
        return self.functions.setdefault(name, arity) == arity

    def absorb_formula(self, f: Formula) -> None:
        """Record (and check) the symbols of an already-built formula."""
        from .syntax import formula_leaves
        for _, a in formula_leaves(f):
            if not self.use_predicate(a.pred, len(a.args)):
                raise ArityError("predicate %s used with arity %d and %d"
                                 % (a.pred, self.predicates[a.pred], len(a.args)))
            for t in a.args:
                self.absorb_term(t)

    def absorb_term(self, t: Term) -> None:
        stack = [t]
        while stack:
            u = stack.pop()
            if isinstance(u, App):
                if not self.use_function(u.fn, len(u.args)):
                    raise ArityError("function %s used with arity %d and %d"
                                     % (u.fn, self.functions[u.fn], len(u.args)))
                stack.extend(u.args)


class Parser:
    """Recursive-descent parser over a token list.

    The calculus module reuses it for the formulas embedded in proofs, so
    the cursor is public and a shared :class:`Signature` can be passed in.
    """

    def __init__(self, text: str, signature: Optional[Signature] = None,
                 start: int = 0, end: Optional[int] = None):
        self.text = text
        self.tokens = tokenize(text, start, end)
        self.i = 0
        self.signature = signature if signature is not None else Signature()

    # -- cursor helpers

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def peek_at(self, k: int) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek
        return tok.kind != "eof" and tok.value == value

    def expect(self, value: str) -> Token:
        tok = self.peek
        if tok.kind == "eof" or tok.value != value:
            self.fail("expected %r, found %s" % (value, describe(tok)))
        return self.advance()

    def name(self, what: str = "name") -> Token:
        tok = self.peek
        if tok.kind != "name" or tok.value in KEYWORDS:
            self.fail("expected %s, found %s" % (what, describe(tok)))
        return self.advance()

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek
        raise ParseError(message, self.text, tok.pos)

    def arity_fail(self, message: str, tok: Token):
        raise ArityError(message, self.text, tok.pos)

    def expect_eof(self) -> None:
        if self.peek.kind != "eof":
            self.fail("unexpected %s" % describe(self.peek))

    # -- grammar

    def term(self, adjacent: bool = False) -> Term:
        """A term; with ``adjacent`` an argument list must follow the name directly.

        Proofs use ``adjacent`` for witnesses, so that ``a (P(x))`` reads as
        the constant ``a`` followed by a formula.
        """
        tok = self.name("term")
        detached = adjacent and self.peek.pos != tok.pos + len(tok.value)
        if detached or not self.at("("):
            if is_constant_name(tok.value):
                self.check_function(tok, 0)
                return App(tok.value)
            return Var(tok.value)
        self.advance()
        args: List[Term] = []
        if not self.at(")"):
            args.append(self.term())
            while self.at(","):
                self.advance()
                args.append(self.term())
        self.expect(")")
        self.check_function(tok, len(args))
        return App(tok.value, tuple(args))

    def check_function(self, tok: Token, arity: int) -> None:
        if not self.signature.use_function(tok.value, arity):
            self.arity_fail("function %s has arity %d, used with %d"
                            % (tok.value, self.signature.functions[tok.value], arity), tok)

    def atom(self) -> Atom:
        negated = False
        if self.at("~"):
            self.advance()
            negated = True
        tok = self.name("predicate")
        args: List[Term] = []
        if self.at("("):
            self.advance()
            if not self.at(")"):
                args.append(self.term())
                while self.at(","):
                    self.advance()
                    args.append(self.term())
            self.expect(")")
        if not self.signature.use_predicate(tok.value, len(args)):
            self.arity_fail("predicate %s has arity %d, used with %d"
                            % (tok.value, self.signature.predicates[tok.value], len(args)), tok)
        return Atom(tok.value, tuple(args), negated)

    def formula(self) -> Formula:
        if self.peek.value in ("all", "ex") and self.peek.kind == "name":
            return self.quantifier()
        return self.binary()

    def quantifier(self) -> Formula:
        kw = self.advance().value
        var = self.name("variable").value
        self.expect(".")
        body = self.formula()
        return Forall(var, body) if kw == "all" else Exists(var, body)

    def binary(self) -> Formula:
        left = self.tensor()
        while self.at("|"):
            self.advance()
            if self.peek.value in ("all", "ex") and self.peek.kind == "name":
                return Par(left, self.quantifier())
            left = Par(left, self.tensor())
        return left

    def tensor(self) -> Formula:
        left = self.unit()
        while self.at("*"):
            self.advance()
            if self.peek.value in ("all", "ex") and self.peek.kind == "name":
                return Tensor(left, self.quantifier())
            left = Tensor(left, self.unit())
        return left

    def unit(self) -> Formula:
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def sequent(self, check_cuts: bool = True) -> CutSequent:
        formulas: List[Formula] = []
        cuts: List[Tuple[Formula, Formula]] = []
        if self.peek.kind == "eof":
            return CutSequent()
        while True:
            if self.at("cut") and self.peek_at(1).value == "{":
                start = self.advance()
                self.advance()
                a = self.formula()
                self.expect(";")
                b = self.formula()
                self.expect("}")
                if check_cuts and not is_dual_pair(a, b):
                    raise MalformedCutError(
                        "line %d: cut sides are not dual: %s ; %s"
                        % (self.text.count("\n", 0, start.pos) + 1,
                           format_formula(a), format_formula(b)))
                cuts.append((a, b))
            else:
                formulas.append(self.formula())
            if not self.at(","):
                break
            self.advance()
        return CutSequent(tuple(formulas), tuple(cuts))


def describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.value)


# --------------------------------------------------------------------------
# Public entry points


def parse_term(text: str, signature: Optional[Signature] = None) -> Term:
    p = Parser(text, signature)
    t = p.term()
    p.expect_eof()
    return t


def parse_formula(text: str, signature: Optional[Signature] = None) -> Formula:
    p = Parser(text, signature)
    f = p.formula()
    p.expect_eof()
    return f


def parse_sequent(text: str, signature: Optional[Signature] = None,
                  check_cuts: bool = True) -> CutSequent:
    p = Parser(text, signature)
    s = p.sequent(check_cuts)
    p.expect_eof()
    return s


def format_cut(cut: Tuple[Formula, Formula]) -> str:
    return "cut{ %s ; %s }" % (format_formula(cut[0]), format_formula(cut[1]))


def format_sequent(s: CutSequent) -> str:
    parts = [format_formula(f) for f in s.formulas]
    parts.extend(format_cut(c) for c in s.cuts)
    return ", ".join(parts)


_LINKS = re.compile(r"^[ \t]*links\s*:", re.MULTILINE)
_PAIR = re.compile(r"\(\s*(\d+)\s+(\d+)\s*\)")


def parse_net_text(text: str, signature: Optional[Signature] = None
                   ) -> Tuple[CutSequent, List[Tuple[int, int]]]:
    """Split a net file into its host sequent and its leaf-index pairs."""
    m = _LINKS.search(text)
    if not m:
        raise ParseError("missing 'links:' line", text, len(text))
    p = Parser(text, signature, 0, m.start())
    host = p.sequent()
    p.expect_eof()
    pairs = []
    pos = m.end()
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        pm = _PAIR.match(text, pos)
        if not pm:
            raise ParseError("expected a link '(i j)'", text, pos)
        pairs.append((int(pm.group(1)), int(pm.group(2))))
        pos = pm.end()
    return host, pairs


def format_net_text(host: CutSequent, pairs) -> str:
    body = " ".join("(%d %d)" % (a, b) for a, b in pairs)
    return "%s\nlinks: %s" % (format_sequent(host), body) if body else \
        "%s\nlinks:" % format_sequent(host)


__all__ = [
    "Parser", "Signature", "Token", "tokenize", "parse_term", "parse_formula",
    "parse_sequent", "format_sequent", "format_cut", "format_formula",
    "format_term", "parse_net_text", "format_net_text",
]
