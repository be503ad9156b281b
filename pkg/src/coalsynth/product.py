"""Product of the arena with the goal automata, plus per-player rank tables."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dfa import GoalAutomaton, compile_dfa
from .errors import CapacityError
from .game import ProblemSpec
from .prefs import ClassOrder, all_classes, compute_ranks, members, mp_set

DEFAULT_PRODUCT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class PreferenceAutomaton:
    """Synchronous product of one goal automaton per formula."""

    components: tuple[GoalAutomaton, ...]

    @property
    def initial(self) -> tuple[int, ...]:
        return tuple(a.initial for a in self.components)

    def step(self, q: tuple[int, ...], symbol: int) -> tuple[int, ...]:
        return tuple(a.step(qk, symbol) for a, qk in zip(self.components, q))

    def satisfied(self, q: tuple[int, ...]) -> int:
        mask = 0
        for k, (a, qk) in enumerate(zip(self.components, q)):
            if qk in a.accepting:
                mask |= 1 << k
        return mask


@dataclass(eq=False)
class ProductGame:
    spec: ProblemSpec
    automaton: PreferenceAutomaton
    gstate: np.ndarray        # (n,) game state of each product state
    qstate: np.ndarray        # (n, m) automaton component states
    delta: np.ndarray         # (n, n_joint) successor product state
    satisfied: np.ndarray     # (n,) bitmask of satisfied formulas; the partition key
    orders: tuple[ClassOrder, ...]
    rank: np.ndarray          # (n_players, n)
    rank_max: tuple[int, ...]
    v0: int = 0
    _keys: dict | None = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return len(self.gstate)

    @property
    def n_players(self) -> int:
        return self.spec.game.n_players

    @property
    def dims(self) -> tuple[int, ...]:
        return self.spec.game.dims

    def delta_nd(self) -> np.ndarray:
        return self.delta.reshape((self.n_states,) + self.dims)

    def mp_class(self, i: int, v: int) -> int:
        return mp_set(self.spec.prefs[i], int(self.satisfied[v]))

    def key(self, v: int) -> str:
        """Stable textual identifier ``<game state>@<q1>,<q2>,...``."""
        g = self.spec.game
        q = ",".join(str(int(x)) for x in self.qstate[v])
        return f"{g.states[self.gstate[v]]}@{q}"

    def index(self, key: str) -> int:
        if self._keys is None:
            self._keys = {self.key(v): v for v in range(self.n_states)}
        return self._keys[key]

    def successors(self, v: int) -> list[int]:
        return sorted(set(int(x) for x in self.delta[v]))


def rank_of(H: ProductGame, i: int, v: int) -> int:
    if not 0 <= v < H.n_states:
        raise IndexError(f"invalid product state {v}")
    return int(H.rank[i, v])


def build_product(spec: ProblemSpec, full: bool = False,
                  budget: int = DEFAULT_PRODUCT_BUDGET) -> ProductGame:
    """Breadth-first product from ``(s0, delta(q0, L(s0)))``.

    Each move reads the label of the successor game state.  With ``full``
    every pair of game state and automaton state tuple is materialised.
    """
    g = spec.game
    comps = tuple(compile_dfa(f, g.atoms) for f in spec.goals)
    pa = PreferenceAutomaton(comps)
    m = len(comps)
    sizes = [a.n_states for a in comps]
    tables = [np.asarray(a.table, dtype=np.int64) for a in comps]
    labels = np.asarray(g.labels, dtype=np.int64)
    n_q = int(np.prod(sizes, dtype=np.int64)) if m else 1
    radix = np.ones(m, dtype=np.int64)
    for k in range(m - 2, -1, -1):
        radix[k] = radix[k + 1] * sizes[k + 1]

    def encode(s, qs):
        key = np.asarray(s, dtype=np.int64) * n_q
        for k in range(m):
            key = key + qs[k] * radix[k]
        return key

    def decode(keys):
        s = keys // n_q
        rest = keys % n_q
        qs = [(rest // radix[k]) % sizes[k] for k in range(m)]
        return s, qs

    q0 = [tables[k][comps[k].initial, labels[g.init]] for k in range(m)]
    start = int(encode(g.init, q0))

    if full:
        order_keys = [start] + [k for k in range(len(g.states) * n_q) if k != start]
        if len(order_keys) > budget:
            raise CapacityError(f"full product has {len(order_keys)} states, budget {budget}")
        key_arr = np.asarray(order_keys, dtype=np.int64)
        s_all, q_all = decode(key_arr)
        succ_s = g.trans[s_all]
        succ_lab = labels[succ_s]
        succ_q = [tables[k][q_all[k][:, None], succ_lab] for k in range(m)]
        succ_keys = encode(succ_s, succ_q)
        pos = np.empty(len(g.states) * n_q, dtype=np.int64)
        pos[key_arr] = np.arange(len(key_arr))
        delta = pos[succ_keys]
    else:
        ids = {start: 0}
        keys = [start]
        rows = []
        frontier = np.asarray([start], dtype=np.int64)
        while len(frontier):
            s_f, q_f = decode(frontier)
            succ_s = g.trans[s_f]                       # (|F|, n_joint)
            succ_lab = labels[succ_s]
            succ_q = [tables[k][q_f[k][:, None], succ_lab] for k in range(m)]
            succ_keys = encode(succ_s, succ_q)
            uniq, inv = np.unique(succ_keys, return_inverse=True)
            uid = np.empty(len(uniq), dtype=np.int64)
            new = []
            for n, u in enumerate(uniq.tolist()):
                got = ids.get(u)
                if got is None:
                    got = len(keys)
                    ids[u] = got
                    keys.append(u)
                    new.append(u)
                uid[n] = got
            if len(keys) > budget:
                raise CapacityError(f"product exceeds the budget of {budget} states")
            rows.append(uid[inv.reshape(succ_keys.shape)])
            frontier = np.asarray(new, dtype=np.int64)
        delta = np.concatenate(rows, axis=0)
        key_arr = np.asarray(keys, dtype=np.int64)
        s_all, q_all = decode(key_arr)

    gstate = np.asarray(s_all, dtype=np.int64)
    qstate = np.stack(q_all, axis=1) if m else np.zeros((len(gstate), 0), dtype=np.int64)
    acc = [np.zeros(sizes[k], dtype=bool) for k in range(m)]
    for k, a in enumerate(comps):
        acc[k][list(a.accepting)] = True
    satisfied = np.zeros(len(gstate), dtype=np.int64)
    for k in range(m):
        satisfied |= acc[k][qstate[:, k]].astype(np.int64) << k

    orders = []
    rank = np.zeros((g.n_players, len(gstate)), dtype=np.int64)
    for i, model in enumerate(spec.prefs):
        order = compute_ranks(model, all_classes(model))
        by_sat = np.asarray([order.rank[mp_set(model, s)] for s in range(1 << m)], dtype=np.int64)
        rank[i] = by_sat[satisfied]
        orders.append(order)
    return ProductGame(spec, pa, gstate, qstate, np.asarray(delta, dtype=np.int64), satisfied,
                       tuple(orders), rank, tuple(o.rank_max for o in orders))


def rank_increasing_edges(H: ProductGame) -> list[tuple[int, int, int]]:
    """Edges ``(i, v, v')`` along which player ``i``'s rank grows; expected empty."""
    out = []
    for i in range(H.n_players):
        r = H.rank[i]
        bad = np.argwhere(r[H.delta] > r[:, None])
        for v, j in bad:
            out.append((i, int(v), int(H.delta[v, j])))
    return out


def export_graph(H: ProductGame) -> str:
    """Graphviz description with class and rank annotations."""
    g = H.spec.game
    lines = ["digraph product {"]
    for v in range(H.n_states):
        sat = ",".join(H.spec.goal_names[k] for k in members(int(H.satisfied[v])))
        ranks = ",".join(str(int(x)) for x in H.rank[:, v])
        lab = ",".join(sorted(g.label_names(int(H.gstate[v]))))
        shape = ' shape=doublecircle' if v == H.v0 else ""
        lines.append(f'  v{v} [label="{H.key(v)}\\nL={{{lab}}} sat={{{sat}}}\\nrank=[{ranks}]"{shape}];')
    for v in range(H.n_states):
        by_target = {}
        for j, t in enumerate(H.delta[v].tolist()):
            by_target.setdefault(t, []).append(j)
        for t, js in sorted(by_target.items()):
            acts = [",".join(g.actions[i][a] for i, a in enumerate(g.joint_actions(j)))
                    for j in js]
            shown = "; ".join(f"({a})" for a in acts[:4])
            if len(acts) > 4:
                shown += f"; +{len(acts) - 4}"
            lines.append(f'  v{v} -> v{t} [label="{shown}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
