"""Sure-winning regions and the per-player value function."""
from __future__ import annotations

import numpy as np

from .product import ProductGame


def _own_axis_first(H: ProductGame, players) -> np.ndarray:
    """Successor table shaped ``(n, |A_players|, |A_rest|)``."""
    d = H.delta_nd()
    own = [p + 1 for p in players]
    rest = [a for a in range(1, d.ndim) if a not in own]
    d = d.transpose([0] + own + rest)
    n_own = int(np.prod([H.dims[p] for p in players]))
    return d.reshape(H.n_states, n_own, -1)


def sure_win(H: ProductGame, i, Y: np.ndarray, return_strategy: bool = False):
    """Least fixed point of states from which ``i`` forces a visit to ``Y``.

    ``i`` is a player index or a tuple of player indices acting as one team.
    With ``return_strategy`` also returns ``(strategy, layer)``: the lowest
    action (team joint action index) that makes progress at each attracted
    state (-1 inside ``Y`` and outside the region) and the attractor layer.
    """
    players = (i,) if isinstance(i, (int, np.integer)) else tuple(i)
    D = _own_axis_first(H, players)
    W = np.asarray(Y, dtype=bool).copy()
    strategy = np.full(H.n_states, -1, dtype=np.int64)
    layer = np.where(W, 0, -1)
    k = 0
    while True:
        ok = W[D].all(axis=2)                   # (n, |A_i|)
        new = ok.any(axis=1) & ~W
        if not new.any():
            break
        k += 1
        strategy[new] = ok[new].argmax(axis=1)
        layer[new] = k
        W |= new
    if return_strategy:
        return W, strategy, layer
    return W


def compute_values(H: ProductGame, i: int, with_strategy: bool = False):
    """Smallest rank ``k`` such that ``i`` sure-wins to ``{Rank_i <= k}``, per state.

    With ``with_strategy`` also returns the maximal sure winning strategy of
    :func:`msw_strategy`.
    """
    val = np.full(H.n_states, np.iinfo(np.int64).max, dtype=np.int64)
    for k in range(H.rank_max[i] + 1):
        U = sure_win(H, i, H.rank[i] <= k)
        val[U & (val > k)] = k
    assert (val <= H.rank_max[i]).all()
    if with_strategy:
        return val, msw_strategy(H, i, val)
    return val


def msw_strategy(H: ProductGame, i: int, val_i: np.ndarray) -> np.ndarray:
    """Positional strategy playing, at each state, towards the layer of its own value.

    Inside the target layer any action keeps the guarantee; action 0 is used.
    """
    strategy = np.zeros(H.n_states, dtype=np.int64)
    for k in np.unique(val_i):
        _, strat, _ = sure_win(H, i, H.rank[i] <= k, return_strategy=True)
        here = (val_i == k) & (strat >= 0)
        strategy[here] = strat[here]
    return strategy


def value_table(H: ProductGame) -> np.ndarray:
    """``Val`` for every player, shape ``(n_players, n_states)``."""
    return np.stack([compute_values(H, i) for i in range(H.n_players)])


def msw_strategies(H: ProductGame) -> tuple[np.ndarray, np.ndarray]:
    vals, strats = zip(*(compute_values(H, i, with_strategy=True) for i in range(H.n_players)))
    return np.stack(vals), np.stack(strats)


def export_values(H: ProductGame, val: np.ndarray) -> str:
    n = H.n_players
    head = ["state"] + [f"Val_{i + 1}" for i in range(n)] + [f"Rank_{i + 1}" for i in range(n)]
    lines = [", ".join(head)]
    for v in range(H.n_states):
        row = [H.key(v)] + [str(int(x)) for x in val[:, v]] + [str(int(x)) for x in H.rank[:, v]]
        lines.append(", ".join(row))
    return "\n".join(lines) + "\n"
