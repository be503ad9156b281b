"""Syntactically co-safe LTL: abstract syntax, parser and finite-word semantics.

Surface syntax::

    phi ::= p | !p | phi & phi | phi | phi | X phi | phi U phi | F phi | ( phi )

Precedence (tightest first): unary operators, ``U`` (right associative),
``&``, ``|``.  Negation is only allowed directly in front of an atom.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormulaSyntaxError, NegatedCompoundError, UnknownAtomError

ATOM = "atom"
NOT = "not"
AND = "and"
OR = "or"
NEXT = "next"
UNTIL = "until"
EVENTUALLY = "eventually"
TRUE = "true"

KEYWORDS = {"X", "F", "U"}


@dataclass(frozen=True)
class Formula:
    kind: str
    children: tuple = ()
    atom: str | None = None

    def __str__(self):
        return to_text(self)

    def atoms(self) -> set[str]:
        if self.atom is not None:
            return {self.atom}
        out = set()
        for c in self.children:
            out |= c.atoms()
        return out


def atom(p: str) -> Formula:
    return Formula(ATOM, atom=p)


def neg(p: str) -> Formula:
    return Formula(NOT, atom=p)


def conj(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def nxt(a: Formula) -> Formula:
    return Formula(NEXT, (a,))


def until(a: Formula, b: Formula) -> Formula:
    return Formula(UNTIL, (a, b))


def eventually(a: Formula) -> Formula:
    return Formula(EVENTUALLY, (a,))


TOP = Formula(TRUE)


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!&|()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
        start = m.start("ident") if m.group("ident") else m.start("op")
        tokens.append((m.group("ident") or m.group("op"), start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, atoms):
        self.tokens = _tokenize(text)
        self.i = 0
        self.atoms = atoms

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok, pos = self.take()
        if tok != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {tok!r}", pos)

    def parse(self):
        f = self.parse_or()
        tok, pos = self.peek()
        if tok != "<end>":
            raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)
        return f

    def parse_or(self):
        f = self.parse_and()
        while self.peek()[0] == "|":
            self.take()
            f = disj(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_until()
        while self.peek()[0] == "&":
            self.take()
            f = conj(f, self.parse_until())
        return f

    def parse_until(self):
        f = self.parse_unary()
        if self.peek()[0] == "U":
            self.take()
            f = until(f, self.parse_until())
        return f

    def parse_unary(self):
        tok, pos = self.take()
        if tok == "!":
            inner_pos = self.peek()[1]
            inner = self.parse_unary()
            if inner.kind != ATOM:
                raise NegatedCompoundError(
                    "negation is only allowed on atomic propositions", inner_pos)
            return neg(inner.atom)
        if tok == "X":
            return nxt(self.parse_unary())
        if tok == "F":
            return eventually(self.parse_unary())
        if tok == "(":
            f = self.parse_or()
            self.expect(")")
            return f
        if tok in ("<end>", ")", "&", "|", "U"):
            raise FormulaSyntaxError(f"expected a formula, found {tok!r}", pos)
        if self.atoms is not None and tok not in self.atoms:
            raise UnknownAtomError(f"unknown atomic proposition {tok!r} at position {pos}")
        return atom(tok)


def parse_formula(text: str, atoms: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    Every atom must belong to ``atoms`` (when given).  Raises
    :class:`FormulaSyntaxError` (with position), :class:`UnknownAtomError`
    or :class:`NegatedCompoundError`.
    """
    atom_set = None if atoms is None else set(atoms)
    if atom_set is not None:
        clash = atom_set & KEYWORDS
        if clash:
            raise UnknownAtomError(f"atom names clash with operators: {sorted(clash)}")
    return _Parser(text, atom_set).parse()


_PREC = {OR: 1, AND: 2, UNTIL: 3}


def to_text(f: Formula) -> str:
    """Render ``f`` in surface syntax; ``parse_formula(to_text(f)) == f``."""
    if f.kind == ATOM:
        return f.atom
    if f.kind == NOT:
        return "!" + f.atom
    if f.kind == TRUE:
        raise ValueError("'true' has no surface syntax")
    if f.kind in (NEXT, EVENTUALLY):
        op = "X" if f.kind == NEXT else "F"
        return f"{op} {_wrap(f.children[0], 4)}"
    left, right = f.children
    sym = {OR: "|", AND: "&", UNTIL: "U"}[f.kind]
    p = _PREC[f.kind]
    if f.kind == UNTIL:
        # right associative
        return f"{_wrap(left, p + 1)} U {_wrap(right, p)}"
    return f"{_wrap(left, p)} {sym} {_wrap(right, p + 1)}"


def _wrap(f: Formula, min_prec: int) -> str:
    prec = _PREC.get(f.kind, 4)
    s = to_text(f)
    return f"({s})" if prec < min_prec else s


# --- finite-word semantics ---------------------------------------------------

def _holds(f: Formula, word: Sequence[frozenset], i: int) -> bool:
    k = f.kind
    if k == TRUE:
        return i < len(word)
    if k == ATOM:
        return i < len(word) and f.atom in word[i]
    if k == NOT:
        return i < len(word) and f.atom not in word[i]
    if k == AND:
        return _holds(f.children[0], word, i) and _holds(f.children[1], word, i)
    if k == OR:
        return _holds(f.children[0], word, i) or _holds(f.children[1], word, i)
    if k == NEXT:
        return _holds(f.children[0], word, i + 1)
    if k == EVENTUALLY:
        return any(_holds(f.children[0], word, j) for j in range(i, len(word)))
    if k == UNTIL:
        lhs, rhs = f.children
        for j in range(i, len(word)):
            if _holds(rhs, word, j):
                return True
            if not _holds(lhs, word, j):
                return False
        return False
    raise ValueError(f"unknown formula kind {k!r}")


def eval_word(f: Formula, word: Sequence[Iterable[str]]) -> bool:
    """True iff some prefix of ``word`` is a good prefix of ``f``.

    Uses the strong finite-word semantics: obligations that point past the
    end of the word are unmet.  Positive formulas are monotone under this
    semantics, so the whole word satisfies ``f`` iff some prefix does.
    """
    w = [frozenset(s) for s in word]
    return _holds(f, w, 0)
