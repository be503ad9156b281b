"""Brute-force ground truth for small instances.

Every check here enumerates *positional* strategies over product states only;
reports say so explicitly.  Nothing in this module calls the attractor or
level-set code: values are recomputed from the transition table alone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import scltl
from .errors import BudgetExceeded
from .game import GameGraph, ProblemSpec
from .prefs import build_preference, class_geq

DEFAULT_BUDGET = 10 ** 7
RESTRICTION = "positional strategies only"


@dataclass(frozen=True)
class PositionalStrategy:
    player: int
    actions: tuple[int, ...]      # one action per product state

    def __call__(self, v: int) -> int:
        return self.actions[v]


@dataclass(frozen=True)
class DominanceVerdict:
    dominated: bool
    # (minimal path of the dominating strategy, minimal path of the dominated one)
    witness: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()


def _check_budget(H, budget):
    space = H.n_states * int(np.prod(H.dims))
    if space > budget:
        raise BudgetExceeded(f"strategy-profile space {space} exceeds budget {budget}")


def _successors(H, i: int, v: int, a: int) -> np.ndarray:
    """Successors of ``v`` when player ``i`` plays ``a`` and everybody else anything."""
    return np.unique(np.take(H.delta_nd()[v], a, axis=i).ravel())


class _Restricted:
    """Graph of ``H`` with player ``i``'s choices fixed, built lazily."""

    def __init__(self, H, i):
        self.H, self.i = H, i
        self.cache = {}

    def succ(self, v, a):
        key = (v, a)
        if key not in self.cache:
            self.cache[key] = _successors(self.H, self.i, v, a).tolist()
        return self.cache[key]

    def choices(self, v):
        """One action per distinct successor set, most promising (lowest rank) first.

        Actions with equal successor sets induce the same restricted graph,
        so enumerating one of them is exact.
        """
        by_set = {}
        for a in range(self.H.dims[self.i]):
            by_set.setdefault(tuple(self.succ(v, a)), a)
        rank = self.H.rank[self.i]
        return sorted(by_set.values(), key=lambda a: (max(rank[w] for w in self.succ(v, a)), a))


def _cyclic(nodes: list[int], edges: dict[int, list[int]]) -> list[int]:
    """Nodes lying on some cycle of the graph (``edges`` restricted to ``nodes``)."""
    if not nodes:
        return []
    pos = {v: k for k, v in enumerate(nodes)}
    rows, cols = [], []
    for v in nodes:
        for w in edges.get(v, ()):
            if w in pos:
                rows.append(pos[v])
                cols.append(pos[w])
    n = len(nodes)
    g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, comp = connected_components(g, directed=True, connection="strong")
    size = np.bincount(comp, minlength=n)
    loops = {r for r, c in zip(rows, cols) if r == c}
    return [v for k, v in enumerate(nodes) if size[comp[k]] > 1 or k in loops]


def _reach(graph: _Restricted, assign, v: int):
    """Reachable states from ``v``; stops expanding at unassigned states."""
    seen = {v}
    order = [v]
    edges = {}
    open_ = []
    k = 0
    while k < len(order):
        u = order[k]
        k += 1
        if u not in assign:
            open_.append(u)
            continue
        edges[u] = graph.succ(u, assign[u])
        for w in edges[u]:
            if w not in seen:
                seen.add(w)
                order.append(w)
    return order, edges, open_


def _outcome_states(H, i, pi, v) -> list[int]:
    graph = _Restricted(H, i)
    assign = {u: pi(u) for u in range(H.n_states)}
    order, edges, _ = _reach(graph, assign, v)
    return _cyclic(order, edges)


def max_rank(H, i: int, pi, v: int | None = None) -> int:
    """Worst stabilized-class rank for ``i`` over all plays consistent with ``pi``.

    Ranks never increase along edges and satisfied sets only grow, so each
    play stabilizes on a cycle; the adversary can steer to any reachable
    cycle with a positional strategy.
    """
    v = H.v0 if v is None else v
    return max(int(H.rank[i, w]) for w in _outcome_states(H, i, pi, v))


def outcomes(H, i: int, pi, v: int | None = None) -> dict[int, int]:
    """Stabilized classes reachable under ``pi``, each with one cycle state."""
    v = H.v0 if v is None else v
    out = {}
    for w in _outcome_states(H, i, pi, v):
        out.setdefault(H.mp_class(i, w), w)
    return out


def _strict(model, c1, c2):
    return class_geq(model, c1, c2) and not class_geq(model, c2, c1)


def minimal_classes(model, classes) -> list[int]:
    return sorted(c for c in classes if not any(_strict(model, c, d) for d in classes if d != c))


def _path(H, i, pi, v, target) -> tuple[int, ...]:
    """Shortest path from ``v`` to ``target`` under ``pi``."""
    graph = _Restricted(H, i)
    parent = {v: None}
    frontier = [v]
    while frontier and target not in parent:
        nxt = []
        for u in frontier:
            for w in graph.succ(u, pi(u)):
                if w not in parent:
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    out = [target]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return tuple(reversed(out))


def strictly_dominates(H, i: int, pi, pi2, v: int | None = None) -> DominanceVerdict:
    """Does ``pi`` strictly dominate ``pi2`` for player ``i``?

    True iff every minimal outcome of ``pi`` is strictly better than some
    minimal outcome of ``pi2``.
    """
    v = H.v0 if v is None else v
    model = H.spec.prefs[i]
    o1, o2 = outcomes(H, i, pi, v), outcomes(H, i, pi2, v)
    m1, m2 = minimal_classes(model, o1), minimal_classes(model, o2)
    witness = []
    for c in m1:
        worse = [d for d in m2 if _strict(model, c, d)]
        if not worse:
            return DominanceVerdict(False)
        witness.append((_path(H, i, pi, v, o1[c]), _path(H, i, pi2, v, o2[worse[0]])))
    return DominanceVerdict(True, tuple(witness))


def minimal_path_attains_max(H, i: int, pi, v: int | None = None) -> bool:
    """Some minimal outcome of ``pi`` has rank ``max_rank``."""
    v = H.v0 if v is None else v
    o = outcomes(H, i, pi, v)
    top = max(int(H.rank[i, w]) for w in o.values())
    return any(int(H.rank[i, o[c]]) == top for c in minimal_classes(H.spec.prefs[i], o))


def _total(H, i, assign) -> PositionalStrategy:
    return PositionalStrategy(i, tuple(assign.get(v, 0) for v in range(H.n_states)))


def enumerate_strategies(H, i: int, v: int | None = None, budget: int = DEFAULT_BUDGET,
                         prune=None):
    """Positional strategies of ``i``, one per distinct behaviour on the states reachable from ``v``.

    Behaviours are distinguished by the successor sets they allow, which is
    all that outcomes depend on.

    ``prune(cyclic_states)`` may return True to skip every completion of a
    partial assignment whose already-closed cycles are ``cyclic_states``.
    """
    _check_budget(H, budget)
    v = H.v0 if v is None else v
    graph = _Restricted(H, i)
    nodes = 0

    def rec(assign):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"strategy search exceeded {budget} nodes")
        order, edges, open_ = _reach(graph, assign, v)
        if prune is not None and prune(_cyclic([u for u in order if u in assign], edges)):
            return
        if not open_:
            yield _total(H, i, assign)
            return
        u = open_[0]
        for a in graph.choices(u):
            assign[u] = a
            yield from rec(assign)
            del assign[u]

    yield from rec({})


def oracle_value(H, i: int, v: int | None = None, budget: int = DEFAULT_BUDGET) -> int:
    """Smallest ``max_rank`` over positional strategies of ``i``, by branch and bound."""
    v = H.v0 if v is None else v
    best = int(H.rank[i].max()) + 1

    def prune(cyc):
        return bool(cyc) and max(int(H.rank[i, w]) for w in cyc) >= best

    for pi in enumerate_strategies(H, i, v, budget, prune):
        best = min(best, max_rank(H, i, pi, v))
        if best == 0:
            break
    return best


def dominators(H, i: int, pi, v: int | None = None, budget: int = DEFAULT_BUDGET):
    """Enumerated positional strategies strictly dominating ``pi``."""
    v = H.v0 if v is None else v
    model = H.spec.prefs[i]
    base = list(outcomes(H, i, pi, v))

    def prune(cyc):
        # an outcome present in every completion must beat some outcome of pi
        return any(not any(_strict(model, H.mp_class(i, w), d) for d in base) for w in cyc)

    for cand in enumerate_strategies(H, i, v, budget, prune):
        verdict = strictly_dominates(H, i, cand, pi, v)
        if verdict.dominated:
            yield cand, verdict


# ---------------------------------------------------------------- random instances

def random_formula(rng: np.random.Generator, atoms, depth: int = 2) -> scltl.Formula:
    if depth == 0 or rng.random() < 0.3:
        p = atoms[int(rng.integers(len(atoms)))]
        return scltl.neg(p) if rng.random() < 0.25 else scltl.atom(p)
    kind = int(rng.integers(5))
    if kind == 0:
        return scltl.eventually(random_formula(rng, atoms, depth - 1))
    if kind == 1:
        return scltl.nxt(random_formula(rng, atoms, depth - 1))
    a = random_formula(rng, atoms, depth - 1)
    b = random_formula(rng, atoms, depth - 1)
    return (scltl.conj, scltl.disj, scltl.until)[kind - 2](a, b)


def random_preorder_edges(rng: np.random.Generator, m: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(m) for b in range(m) if a != b and rng.random() < 0.35]


def random_problem(rng: np.random.Generator, max_players: int = 3, max_actions: int = 2,
                   max_states: int = 6, max_goals: int = 2, max_atoms: int = 2,
                   dense: bool = False, owned: bool = False) -> ProblemSpec:
    """Random problem within the given size limits.

    ``dense`` fixes every size at its limit.  With ``owned`` each state is
    controlled by one random player: only that player's action picks the
    successor, which gives individual players real influence.
    """
    def size(hi):
        return hi if dense else int(rng.integers(1, hi + 1))

    N = size(max_players)
    dims = [size(max_actions) for _ in range(N)]
    n_s = size(max_states)
    atoms = tuple(f"p{k}" for k in range(size(max_atoms)))
    m = size(max_goals)
    trans = rng.integers(n_s, size=(n_s, int(np.prod(dims))))
    if owned:
        joint = np.indices(dims).reshape(N, -1)
        for s in range(n_s):
            p = int(rng.integers(N))
            trans[s] = rng.integers(n_s, size=dims[p])[joint[p]]
    game = GameGraph(
        players=tuple(f"P{i + 1}" for i in range(N)),
        actions=tuple(tuple(f"a{k}" for k in range(d)) for d in dims),
        states=tuple(f"s{k}" for k in range(n_s)),
        init=0,
        atoms=atoms,
        labels=tuple(int(x) for x in rng.integers(1 << len(atoms), size=n_s)),
        trans=trans,
    )
    # round trip through text keeps generated formulas within the surface syntax
    goals = tuple(scltl.parse_formula(scltl.to_text(random_formula(rng, atoms)), atoms)
                  for _ in range(m))
    prefs = tuple(build_preference(m, random_preorder_edges(rng, m)) for _ in range(N))
    return ProblemSpec(game, tuple(f"phi{k + 1}" for k in range(m)), goals, prefs)


# ---------------------------------------------------------------- report

@dataclass(frozen=True)
class CheckLine:
    instance: str
    check: str
    passed: bool
    witness: str = ""

    def __str__(self):
        verdict = "pass" if self.passed else "fail"
        return f"{self.instance}, {self.check}, {verdict}, {self.witness or '-'}"


def report_header() -> str:
    return f"# oracle checks enumerate {RESTRICTION}"

