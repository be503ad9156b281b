"""Property checks of the solver against the brute-force oracle, one report line each."""
from __future__ import annotations

import itertools

import numpy as np

from . import oracle
from .errors import BudgetExceeded
from .game import coalition_text
from .oracle import CheckLine, PositionalStrategy
from .product import ProductGame
from .sim import Profile, run
from .synthesis import DISCARDED, AdmissibleSolution, complexity_bound, is_rational, synthesize
from .values import msw_strategy, value_table

CHECKS = ("values-oracle", "msw-not-dominated", "minimal-path-attains-max", "discard-equals-irrational",
          "coalv-guarantee", "evaluation-bound")


def values_vs_oracle(H: ProductGame, val: np.ndarray, budget: int) -> str | None:
    """First state where the value table and the oracle disagree, or None."""
    for i in range(H.n_players):
        for v in range(H.n_states):
            o = oracle.oracle_value(H, i, v, budget)
            if o != val[i, v]:
                return f"P{i + 1} at {H.key(v)}: oracle {o}, table {int(val[i, v])}"
    return None


def msw_dominator(H: ProductGame, val: np.ndarray, budget: int) -> str | None:
    for i in range(H.n_players):
        pi = PositionalStrategy(i, tuple(int(a) for a in msw_strategy(H, i, val[i])))
        for _, verdict in oracle.dominators(H, i, pi, budget=budget):
            good, bad = verdict.witness[0]
            return (f"P{i + 1}: path {'>'.join(map(str, good))} beats "
                    f"{'>'.join(map(str, bad))}")
    return None


def max_rank_path_violation(H: ProductGame, val: np.ndarray, rng: np.random.Generator,
                     extra: int = 3) -> str | None:
    for i in range(H.n_players):
        cands = [tuple(int(a) for a in msw_strategy(H, i, val[i]))]
        cands += [tuple(int(a) for a in rng.integers(H.dims[i], size=H.n_states)) for _ in range(extra)]
        for acts in cands:
            if not oracle.minimal_path_attains_max(H, i, PositionalStrategy(i, acts)):
                return f"P{i + 1} strategy {acts}"
    return None


def direct_discards(H: ProductGame, val, coalv, inside, coalitions=None) -> set:
    """Candidates outside ``inside`` that enforce it and fail the rationality test."""
    g = H.spec.game
    out = set()
    pairs = [c for c in (coalitions or [(0, j) for j in range(1, H.n_players)]) if len(c) == 2]
    for v in np.flatnonzero(~inside):
        for c in pairs:
            others = [p for p in range(H.n_players) if p not in c]
            for a_c in itertools.product(*(range(g.dims[p]) for p in c)):
                ids = [0] * H.n_players
                enforced = True
                for rest in itertools.product(*(range(g.dims[p]) for p in others)):
                    for p, a in zip(c + tuple(others), a_c + rest):
                        ids[p] = a
                    if not inside[H.delta[v, g.joint_index(ids)]]:
                        enforced = False
                        break
                if enforced and not is_rational(H, coalv, val, int(v), c, a_c):
                    flat = int(np.ravel_multi_index(a_c, tuple(g.dims[p] for p in c)))
                    out.add((int(v), c, flat))
    return out


def discard_mismatch(H: ProductGame, sol: AdmissibleSolution) -> str | None:
    for res in sol.attempts:
        for k, (cv, recorded) in enumerate(zip(res.coalv_history, res.discards)):
            direct = direct_discards(H, sol.val, cv, res.level_set(k))
            if direct != recorded:
                diff = sorted(direct ^ recorded)[0]
                return (f"bound {res.bound} level {k}: {H.key(diff[0])} "
                        f"{coalition_text(diff[1])} action {diff[2]}")
    return None


def coalv_violation(H: ProductGame, sol: AdmissibleSolution) -> str | None:
    """From each state of a positive level the deterministic play honours CoalV and l*."""
    prof = Profile.from_solution(sol)
    for v in np.flatnonzero(sol.level > 0):
        t = run(H, prof, H.n_states + 1, start=int(v))
        last = t.steps[-1].ranks
        if last[0] > sol.l_star:
            return f"from {H.key(v)} leader ends at rank {last[0]} > {sol.l_star}"
        for j in range(1, H.n_players):
            if last[j] > sol.coalv[j - 1, v]:
                return f"from {H.key(v)} P{j + 1} ends at rank {last[j]} > CoalV {int(sol.coalv[j - 1, v])}"
    return None


def run_checks(H: ProductGame, instance: str, budget: int = oracle.DEFAULT_BUDGET,
               val: np.ndarray | None = None, seed: int = 0) -> list[CheckLine]:
    """All checks for one instance.  ``val`` overrides the computed value table.

    Raises :class:`BudgetExceeded` when the instance is too large for the oracle.
    """
    if val is None:
        val = value_table(H)
    rng = np.random.default_rng(seed)
    sol = synthesize(H, val, record=True)
    found = {
        "values-oracle": values_vs_oracle(H, val, budget),
        "msw-not-dominated": msw_dominator(H, val, budget),
        "minimal-path-attains-max": max_rank_path_violation(H, val, rng),
        "discard-equals-irrational": discard_mismatch(H, sol),
        "coalv-guarantee": coalv_violation(H, sol),
    }
    bound = complexity_bound(H)
    found["evaluation-bound"] = (None if sol.evaluations <= max(bound, 0)
                                 else f"{sol.evaluations} evaluations > {bound}")
    return [CheckLine(instance, name, found[name] is None, found[name] or "") for name in CHECKS]


__all__ = ["run_checks", "BudgetExceeded", "CHECKS"]
