"""Admissible leader strategies under dynamic coalitions, and follower responses.

The leader is player 0 and may act alone or with exactly one partner.  For
a rank bound ``l`` the solver grows level sets ``V_0 ⊆ V_1 ⊆ ...`` where
``V_0`` holds the states of leader rank at most ``l``; a state joins level
``k + 1`` once some coalition action enforces ``V_k`` against every
completion by the non-members and is rational for the partner.

A candidate ``(C, a_C)`` at ``v`` is evaluated exactly once, at the first
level where it enforces ``V_k``: its successors are then in ``V_k``, whose
``CoalV`` entries never change again, so re-evaluating it at a later level
would give the same verdict and the same ``CandV`` entry.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game import coalition_text, feasible_coalitions
from .product import ProductGame
from .values import _own_axis_first, msw_strategies

UNEVALUATED, DISCARDED, ADMITTED = 0, 1, 2


@dataclass
class CoalitionTable:
    """Per-candidate bookkeeping for one coalition ``C``."""

    coalition: tuple[int, ...]
    others: tuple[int, ...]
    status: np.ndarray     # (n, |A_C|) int8
    level: np.ndarray      # (n, |A_C|) level at which the candidate was evaluated
    cvals: np.ndarray      # (n, |A_C|, N-1) guaranteed follower values
    resp: np.ndarray       # (n, |A_C|, len(others)) recorded non-member actions


@dataclass
class LevelResult:
    bound: int
    success: bool
    level: np.ndarray                      # (n,) level index, -1 outside every level set
    coalv: np.ndarray                      # (N-1, n)
    tables: list[CoalitionTable]
    n_levels: int
    evaluations: int
    coalv_history: list[np.ndarray] = field(default_factory=list)
    discards: list[set] = field(default_factory=list)

    def level_set(self, k: int) -> np.ndarray:
        return (self.level >= 0) & (self.level <= k)


def _coalition_dims(H, c):
    return tuple(H.dims[p] for p in c)


def synthesize_level(H: ProductGame, val: np.ndarray, bound: int,
                     coalitions: Sequence[tuple[int, ...]] | None = None,
                     record: bool = False) -> LevelResult:
    """One run of the level-set construction for leader rank bound ``bound``.

    ``val`` is the value table (n_players, n).  ``coalitions`` restricts the
    coalitions the leader may form (default: all feasible ones).  With
    ``record`` the CoalV vector and the set of discarded candidates of
    states outside ``V_k`` are kept for every level ``k``.
    """
    N, n = H.n_players, H.n_states
    if coalitions is None:
        coalitions = feasible_coalitions(N)
    coalitions = [tuple(sorted(c)) for c in coalitions]
    coalv = val[1:].astype(np.int64).copy()
    inV = H.rank[0] <= bound
    level = np.where(inV, 0, -1)
    Dnd = H.delta_nd()

    tables = []
    flat = {}
    for c in coalitions:
        others = tuple(p for p in range(N) if p not in c)
        n_c = int(np.prod(_coalition_dims(H, c)))
        tables.append(CoalitionTable(
            c, others,
            np.zeros((n, n_c), dtype=np.int8),
            np.full((n, n_c), -1, dtype=np.int64),
            np.zeros((n, n_c, N - 1), dtype=np.int64),
            np.zeros((n, n_c, len(others)), dtype=np.int64)))
        flat[c] = _own_axis_first(H, c)

    evaluations = 0
    history, discards = [], []
    k = 0
    while True:
        if record:
            history.append(coalv.copy())
        for tab in tables:
            c = tab.coalition
            D = flat[c]
            enforce = inV[D].all(axis=2)
            new = enforce & (tab.status == UNEVALUATED) & ~inV[:, None]
            rows = np.flatnonzero(new.any(axis=1))
            if len(rows) == 0:
                continue
            evaluations += int(new.sum())
            G = Dnd[rows]                              # (|R|, A_0, ..., A_{N-1})
            rational = np.ones((len(rows), D.shape[1]), dtype=bool)
            cv = np.zeros((len(rows), D.shape[1], N - 1), dtype=np.int64)
            picks = np.zeros((len(rows), D.shape[1], len(tab.others)), dtype=np.int64)
            if len(c) > 1:
                partner = c[1]
                worst = coalv[partner - 1][D[rows]].max(axis=2)
                rational = worst <= val[partner][rows][:, None]
                cv[:, :, partner - 1] = worst
            for slot, j in enumerate(tab.others):
                vals_j = coalv[j - 1][G]
                axes = tuple(p + 1 for p in tab.others if p != j)
                if axes:
                    vals_j = vals_j.max(axis=axes)
                # remaining axes: coalition members and j, in player order
                j_axis = 1 + sorted(c + (j,)).index(j)
                best = vals_j.min(axis=j_axis).reshape(len(rows), -1)
                pick = vals_j.argmin(axis=j_axis).reshape(len(rows), -1)
                cv[:, :, j - 1] = best
                picks[:, :, slot] = pick
            sub_new = new[rows]
            tab.resp[rows] = np.where(sub_new[:, :, None], picks, tab.resp[rows])
            tab.cvals[rows] = np.where(sub_new[:, :, None], cv, tab.cvals[rows])
            st = tab.status[rows]
            st[sub_new & rational] = ADMITTED
            st[sub_new & ~rational] = DISCARDED
            tab.status[rows] = st
            lv = tab.level[rows]
            lv[sub_new] = k
            tab.level[rows] = lv
        if record:
            dset = set()
            for tab in tables:
                for v, a in np.argwhere((tab.status == DISCARDED) & ~inV[:, None]):
                    dset.add((int(v), tab.coalition, int(a)))
            discards.append(dset)
        best = np.full((N - 1, n), -1, dtype=np.int64)
        admitted_now = np.zeros(n, dtype=bool)
        for tab in tables:
            fresh = (tab.status == ADMITTED) & (tab.level == k) & ~inV[:, None]
            admitted_now |= fresh.any(axis=1)
            if N > 1:
                masked = np.where(fresh[:, :, None], tab.cvals, -1).max(axis=1)  # (n, N-1)
                best = np.maximum(best, masked.T)
        if not admitted_now.any():
            break
        coalv[:, admitted_now] = best[:, admitted_now]
        level[admitted_now] = k + 1
        inV = inV | admitted_now
        k += 1
    return LevelResult(bound, bool(inV[H.v0]), level, coalv, tables, k + 1,
                       evaluations, history, discards)


def is_rational(H: ProductGame, coalv: np.ndarray, val: np.ndarray, v: int,
                coalition: Sequence[int], a_c: Sequence[int]) -> bool:
    """Partner's CoalV after every completion is at most its value at ``v``."""
    c = tuple(coalition)
    if len(c) != 2 or c[0] != 0:
        raise ValueError("rationality is defined for coalitions {leader, partner}")
    partner = c[1]
    g = H.spec.game
    others = [p for p in range(H.n_players) if p not in c]
    limit = val[partner][v]
    for rest in itertools.product(*(range(g.dims[p]) for p in others)):
        ids = [0] * H.n_players
        for p, a in zip(c, a_c):
            ids[p] = a
        for p, a in zip(others, rest):
            ids[p] = a
        succ = H.delta[v, g.joint_index(ids)]
        if coalv[partner - 1][succ] > limit:
            return False
    return True


@dataclass
class AdmissibleSolution:
    H: ProductGame
    val: np.ndarray
    msw: np.ndarray                 # (N, n) positional maximal sure winning actions
    result: LevelResult
    attempts: list[LevelResult]

    @property
    def l_star(self) -> int:
        return self.result.bound

    @property
    def coalv(self) -> np.ndarray:
        return self.result.coalv

    @property
    def level(self) -> np.ndarray:
        return self.result.level

    @property
    def evaluations(self) -> int:
        return sum(r.evaluations for r in self.attempts)

    @property
    def iterations(self) -> int:
        return sum(r.n_levels for r in self.attempts)

    def _table(self, coalition):
        for tab in self.result.tables:
            if tab.coalition == tuple(coalition):
                return tab
        raise KeyError(f"coalition {coalition_text(coalition)} not considered")

    def _flat(self, coalition, a_c):
        dims = tuple(self.H.dims[p] for p in coalition)
        return int(np.ravel_multi_index(tuple(a_c), dims))

    def act(self, v: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Admitted ``(C, a_C)`` at ``v``, in tie-break order."""
        out = []
        for tab in self.result.tables:
            dims = tuple(self.H.dims[p] for p in tab.coalition)
            for a in np.flatnonzero(tab.status[v] == ADMITTED):
                ids = tuple(int(x) for x in np.unravel_index(int(a), dims))
                out.append((tab.coalition, ids))
        return sorted(out, key=_tie_key)

    def candv(self, v: int, coalition, a_c) -> tuple[dict[int, int], tuple[int, ...]]:
        """Recorded non-member responses and follower value vector for an admitted entry."""
        tab = self._table(coalition)
        a = self._flat(coalition, a_c)
        if tab.status[v, a] != ADMITTED:
            raise KeyError(f"no admitted entry for {coalition_text(coalition)} {tuple(a_c)} "
                           f"at {self.H.key(v)}")
        resp = {p: int(x) for p, x in zip(tab.others, tab.resp[v, a])}
        return resp, tuple(int(x) for x in tab.cvals[v, a])

    def follower_action(self, v: int, coalition, a_c, j: int) -> int:
        if j in coalition:
            raise ValueError(f"player {j + 1} is a member of {coalition_text(coalition)}")
        resp, _ = self.candv(v, coalition, a_c)
        return resp[j]

    def leader_choice(self, v: int):
        """``(C, a_C)`` played by the leader at ``v``."""
        if self.level[v] > 0:
            return self.act(v)[0]
        return (0,), (int(self.msw[0][v]),)

    def joint_action(self, v: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Coalition and full joint action (one action per player) at ``v``."""
        coalition, a_c = self.leader_choice(v)
        ids = [0] * self.H.n_players
        if self.level[v] > 0:
            resp, _ = self.candv(v, coalition, a_c)
            for p, a in resp.items():
                ids[p] = a
        else:
            for p in range(self.H.n_players):
                ids[p] = int(self.msw[p][v])
        for p, a in zip(coalition, a_c):
            ids[p] = a
        return coalition, tuple(ids)


def _tie_key(entry):
    coalition, a_c = entry
    partner = coalition[1] if len(coalition) > 1 else 0
    return (a_c[0], partner, a_c[1:] if len(a_c) > 1 else ())


def synthesize(H: ProductGame, val: np.ndarray | None = None,
               coalitions: Sequence[tuple[int, ...]] | None = None,
               record: bool = False) -> AdmissibleSolution:
    """Smallest leader rank bound with a successful level construction."""
    if val is None:
        val, msw = msw_strategies(H)
    else:
        _, msw = msw_strategies(H)
    attempts = []
    for bound in range(H.rank_max[0] + 1):
        res = synthesize_level(H, val, bound, coalitions, record)
        attempts.append(res)
        if res.success:
            return AdmissibleSolution(H, val, msw, res, attempts)
    raise AssertionError("the largest rank bound always succeeds")


def complexity_bound(H: ProductGame) -> int:
    a1 = H.dims[0]
    per_state = a1 + sum(H.dims[j] * a1 for j in range(1, H.n_players))
    return H.rank_max[0] * H.n_states * per_state


def export_solution(sol: AdmissibleSolution) -> str:
    """Plain-text tables: leader policy, follower responses and CoalV."""
    H = sol.H
    g = H.spec.game
    lines = [f"l* = {sol.l_star}", "", "# leader policy: state, level, coalition, coalition action"]
    for v in range(H.n_states):
        if sol.level[v] <= 0:
            continue
        c, a_c = sol.leader_choice(v)
        acts = ",".join(g.actions[p][a] for p, a in zip(c, a_c))
        lines.append(f"{H.key(v)}, {int(sol.level[v])}, {coalition_text(c)}, ({acts})")
    lines += ["", "# follower responses: state, coalition, coalition action, player, action, CandV"]
    for v in range(H.n_states):
        if sol.level[v] <= 0:
            continue
        for c, a_c in sol.act(v):
            resp, cv = sol.candv(v, c, a_c)
            acts = ",".join(g.actions[p][a] for p, a in zip(c, a_c))
            for p, a in sorted(resp.items()):
                lines.append(f"{H.key(v)}, {coalition_text(c)}, ({acts}), "
                             f"{g.players[p]}, {g.actions[p][a]}, {list(cv)}")
    lines += ["", "# CoalV: state, " + ", ".join(f"CoalV_{j + 1}" for j in range(1, H.n_players))]
    for v in range(H.n_states):
        lines.append(", ".join([H.key(v)] + [str(int(x)) for x in sol.coalv[:, v]]))
    return "\n".join(lines) + "\n"
