"""Compile scLTL formulas to minimal DFAs over the powerset alphabet.

Route: formula -> NFA whose states are conjunctions of pending obligations
(one progression step per symbol, disjunctions split nondeterministically)
-> subset construction -> accepting states made absorbing -> Hopcroft
minimization.  Symbols are bitmasks over the ordered atom list.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import scltl
from .errors import CapacityError, UnknownAtomError
from .scltl import Formula

DEFAULT_STATE_BUDGET = 2 ** 16


@dataclass(frozen=True)
class GoalAutomaton:
    atoms: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]   # table[q][symbol] -> q'
    accepting: frozenset[int]
    initial: int = 0
    absorbing_accepting: bool = True

    @property
    def n_states(self) -> int:
        return len(self.table)

    @property
    def n_symbols(self) -> int:
        return 1 << len(self.atoms)

    def step(self, q: int, symbol: int) -> int:
        return self.table[q][symbol]

    def symbol(self, letters: Iterable[str]) -> int:
        return symbol_mask(self.atoms, letters)

    def accepts(self, word: Sequence[Iterable[str]]) -> bool:
        """True iff reading ``word`` visits an accepting state."""
        q = self.initial
        if q in self.accepting:
            return True
        for letters in word:
            q = self.step(q, self.symbol(letters))
            if q in self.accepting:
                return True
        return False

    def to_text(self) -> str:
        lines = [
            f"atoms: {' '.join(self.atoms)}",
            f"initial: {self.initial}",
            f"accepting: {' '.join(str(q) for q in sorted(self.accepting))}",
        ]
        for q, row in enumerate(self.table):
            for sym, q2 in enumerate(row):
                lines.append(f"{q} {_symbol_text(self.atoms, sym)} {q2}")
        return "\n".join(lines) + "\n"


def _symbol_text(atoms, sym):
    return "{" + ",".join(a for k, a in enumerate(atoms) if sym >> k & 1) + "}"


def symbol_mask(atoms: Sequence[str], letters: Iterable[str]) -> int:
    index = {a: k for k, a in enumerate(atoms)}
    mask = 0
    for p in letters:
        try:
            mask |= 1 << index[p]
        except KeyError:
            raise UnknownAtomError(f"unknown atomic proposition {p!r}") from None
    return mask


def dfa_step(a: GoalAutomaton, q: int, symbol) -> int:
    if not 0 <= q < a.n_states:
        raise ValueError(f"invalid automaton state {q}")
    if not isinstance(symbol, int):
        symbol = a.symbol(symbol)
    if not 0 <= symbol < a.n_symbols:
        raise ValueError(f"invalid symbol {symbol}")
    return a.table[q][symbol]


# --- progression NFA ---------------------------------------------------------
# A DNF is a frozenset of clauses; a clause is a frozenset of formulas that must
# all hold from the next position on.  frozenset() is false, {frozenset()} true.

_FALSE = frozenset()
_TRUE = frozenset({frozenset()})


def _and(x, y):
    return _minimal({a | b for a in x for b in y})


def _minimal(clauses):
    # drop clauses subsumed by a smaller one (weaker obligation wins)
    out = []
    for c in sorted(clauses, key=len):
        if not any(d <= c for d in out):
            out.append(c)
    return frozenset(out)


def _progress(f: Formula, sym: int, index) -> frozenset:
    k = f.kind
    if k == scltl.TRUE:
        return _TRUE
    if k == scltl.ATOM:
        return _TRUE if sym >> index[f.atom] & 1 else _FALSE
    if k == scltl.NOT:
        return _FALSE if sym >> index[f.atom] & 1 else _TRUE
    if k == scltl.AND:
        return _and(_progress(f.children[0], sym, index), _progress(f.children[1], sym, index))
    if k == scltl.OR:
        return _minimal(_progress(f.children[0], sym, index) | _progress(f.children[1], sym, index))
    if k == scltl.NEXT:
        return frozenset({frozenset({f.children[0]})})
    if k == scltl.EVENTUALLY:
        return _minimal(_progress(f.children[0], sym, index) | {frozenset({f})})
    if k == scltl.UNTIL:
        lhs, rhs = f.children
        stay = _and(_progress(lhs, sym, index), frozenset({frozenset({f})}))
        return _minimal(_progress(rhs, sym, index) | stay)
    raise ValueError(f"unknown formula kind {k!r}")


def _nfa_successors(clause, sym, index):
    out = _TRUE
    for g in clause:
        out = _and(out, _progress(g, sym, index))
        if not out:
            break
    return out


def _determinize(f: Formula, atoms, budget):
    index = {a: k for k, a in enumerate(atoms)}
    n_sym = 1 << len(atoms)
    start = frozenset({frozenset({f})})
    ids = {start: 0}
    order = [start]
    table = []
    cache = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        accepting = frozenset() in subset
        row = []
        for sym in range(n_sym):
            if accepting:
                nxt = subset
            else:
                succ = set()
                for clause in subset:
                    key = (clause, sym)
                    if key not in cache:
                        cache[key] = _nfa_successors(clause, sym, index)
                    succ |= cache[key]
                nxt = _minimal(succ)
            if nxt not in ids:
                if len(ids) >= budget:
                    raise CapacityError(
                        f"determinization of {scltl.to_text(f)!r} exceeds {budget} states")
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(ids[nxt])
        table.append(row)
    accepting = {ids[s] for s in order if frozenset() in s}
    return table, accepting


# --- minimization ------------------------------------------------------------

def hopcroft(table: list[list[int]], accepting: set[int]) -> list[int]:
    """Return block id per state of the coarsest bisimulation partition."""
    n = len(table)
    n_sym = len(table[0]) if n else 0
    inverse = [[[] for _ in range(n)] for _ in range(n_sym)]
    for q, row in enumerate(table):
        for s, q2 in enumerate(row):
            inverse[s][q2].append(q)

    acc = frozenset(accepting)
    rej = frozenset(range(n)) - acc
    partition = [b for b in (acc, rej) if b]
    work = [min(partition, key=len)] if len(partition) == 2 else list(partition)
    while work:
        splitter = work.pop()
        for s in range(n_sym):
            pre = set()
            for q2 in splitter:
                pre.update(inverse[s][q2])
            if not pre:
                continue
            refined = []
            for block in partition:
                inside = block & pre
                if inside and len(inside) < len(block):
                    outside = block - inside
                    refined += [inside, outside]
                    if block in work:
                        work.remove(block)
                        work += [inside, outside]
                    else:
                        work.append(min(inside, outside, key=len))
                else:
                    refined.append(block)
            partition = refined
    block_of = [0] * n
    for b, block in enumerate(partition):
        for q in block:
            block_of[q] = b
    return block_of


def _quotient(table, accepting, block_of, initial=0):
    # renumber blocks in breadth-first order from the initial block
    n_sym = len(table[0])
    rep = {}
    for q in range(len(table)):
        rep.setdefault(block_of[q], q)
    new_id = {block_of[initial]: 0}
    queue = deque([block_of[initial]])
    rows = []
    while queue:
        b = queue.popleft()
        q = rep[b]
        row = []
        for s in range(n_sym):
            b2 = block_of[table[q][s]]
            if b2 not in new_id:
                new_id[b2] = len(new_id)
                queue.append(b2)
            row.append(new_id[b2])
        rows.append(tuple(row))
    acc = frozenset(new_id[block_of[q]] for q in accepting if block_of[q] in new_id)
    return tuple(rows), acc


def compile_dfa(f: Formula, atoms: Sequence[str],
                budget: int = DEFAULT_STATE_BUDGET) -> GoalAutomaton:
    """Minimal total DFA with absorbing acceptance for the good prefixes of ``f``.

    ``atoms`` fixes the bit order of symbols; a set is sorted first.
    """
    atoms = tuple(sorted(atoms)) if isinstance(atoms, (set, frozenset)) else tuple(atoms)
    missing = f.atoms() - set(atoms)
    if missing:
        raise UnknownAtomError(f"formula uses undeclared atoms {sorted(missing)}")
    table, accepting = _determinize(f, atoms, budget)
    block_of = hopcroft(table, accepting)
    rows, acc = _quotient(table, accepting, block_of)
    return GoalAutomaton(atoms=atoms, table=rows, accepting=acc)
