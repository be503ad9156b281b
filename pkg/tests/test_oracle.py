import itertools

import pytest

from coalsynth.errors import BudgetExceeded
from coalsynth.oracle import (CheckLine, PositionalStrategy, minimal_path_attains_max, dominators,
                              enumerate_strategies, max_rank, oracle_value, random_problem,
                              report_header, strictly_dominates)
from coalsynth.product import build_product
from coalsynth.values import msw_strategy, value_table

from conftest import problem


def product(name):
    return build_product(problem(name))


def const(H, i, a):
    return PositionalStrategy(i, (a,) * H.n_states)


def test_selfloop_rank_zero():
    H = product("selfloop.txt")
    assert max_rank(H, 0, const(H, 0, 0)) == 0
    assert oracle_value(H, 0) == 0
    assert minimal_path_attains_max(H, 0, const(H, 0, 0))


def test_adversary_picks_worst_continuation():
    H = product("helpful.txt")
    # P2 can answer a0 with either A (rank 0) or B (rank 1)
    assert max_rank(H, 0, const(H, 0, 0)) == 1
    assert oracle_value(H, 0) == 1


def test_no_influence_gives_worst_reachable_class():
    H = product("follower.txt")
    reach = {H.v0} | set(int(w) for w in H.delta[H.v0])
    assert oracle_value(H, 1) == max(int(H.rank[1, w]) for w in reach if w != H.v0)


def test_identical_strategies_not_dominated():
    H = product("control.txt")
    for a in range(2):
        assert not strictly_dominates(H, 0, const(H, 0, a), const(H, 0, a)).dominated


def test_winning_dominates_losing_with_witness():
    H = product("control.txt")
    win, lose = const(H, 0, 1), const(H, 0, 0)
    verdict = strictly_dominates(H, 0, win, lose)
    assert verdict.dominated
    good, bad = verdict.witness[0]
    assert good[0] == bad[0] == H.v0
    assert H.rank[0, good[-1]] == 0 and H.rank[0, bad[-1]] == 1
    assert not strictly_dominates(H, 0, lose, win).dominated
    assert [d.actions[H.v0] for d, _ in dominators(H, 0, lose)] == [1]


def test_msw_strategy_is_not_dominated_on_control():
    H = product("control.txt")
    pi = PositionalStrategy(0, tuple(int(a) for a in msw_strategy(H, 0, value_table(H)[0])))
    assert list(dominators(H, 0, pi)) == []


def test_chain_attains_max_rank():
    H = product("chain.txt")
    pi = const(H, 0, 0)
    assert minimal_path_attains_max(H, 0, pi)
    assert max_rank(H, 0, pi) == 0


def test_minimal_path_attains_max_on_random_strategies(rng):
    for _ in range(40):
        H = build_product(random_problem(rng))
        i = int(rng.integers(H.n_players))
        pi = PositionalStrategy(i, tuple(int(a) for a in rng.integers(H.dims[i], size=H.n_states)))
        assert minimal_path_attains_max(H, i, pi)


def test_dominance_irreflexive_and_transitive(rng):
    for _ in range(15):
        H = build_product(random_problem(rng, max_players=2, max_states=4))
        i = 0
        pis = list(itertools.islice(enumerate_strategies(H, i), 8))
        dom = {(a, b): strictly_dominates(H, i, pis[a], pis[b]).dominated
               for a in range(len(pis)) for b in range(len(pis))}
        for a in range(len(pis)):
            assert not dom[a, a]
        for a, b, c in itertools.product(range(len(pis)), repeat=3):
            if dom[a, b] and dom[b, c]:
                assert dom[a, c]


def test_enumeration_covers_distinct_behaviours():
    H = product("control.txt")
    seen = {pi.actions[H.v0] for pi in enumerate_strategies(H, 0)}
    assert seen == {0, 1}


def test_budget():
    H = product("helpful.txt")
    with pytest.raises(BudgetExceeded):
        oracle_value(H, 0, budget=1)
    with pytest.raises(BudgetExceeded):
        list(dominators(H, 0, const(H, 0, 0), budget=2))


def test_report_format():
    assert "positional" in report_header()
    assert str(CheckLine("x", "values-oracle", True)) == "x, values-oracle, pass, -"
    assert str(CheckLine("x", "values-oracle", False, "w")) == "x, values-oracle, fail, w"
