import numpy as np
import pytest

from coalsynth.blocksworld import FIRST_PLAY
from coalsynth.oracle import random_problem
from coalsynth.product import build_product
from coalsynth.synthesis import (ADMITTED, complexity_bound, export_solution, is_rational,
                                 synthesize, synthesize_level)
from coalsynth.values import value_table

from conftest import problem


def solved(name):
    H = build_product(problem(name))
    val = value_table(H)
    return H, val, synthesize(H, val, record=True)


def test_largest_bound_always_succeeds(rng):
    for _ in range(20):
        H = build_product(random_problem(rng))
        val = value_table(H)
        res = synthesize_level(H, val, H.rank_max[0])
        assert res.success and res.level_set(0).all()


def test_initial_rank_zero():
    H, _, sol = solved("selfloop.txt")
    assert sol.l_star == 0 and (sol.level <= 0).all()


def test_rational_coalition_reaches_goal():
    H, val, sol = solved("helpful.txt")
    assert val[0, H.v0] == 1
    assert sol.l_star == 0
    assert sol.leader_choice(H.v0) == ((0, 1), (0, 0))


def test_irrational_coalition_is_discarded():
    H, val, sol = solved("unhelpful.txt")
    first = sol.attempts[0]
    assert not first.success
    assert first.tables[1].status[H.v0, 0] != ADMITTED
    assert sol.l_star == 1


def test_is_rational_boundary():
    H, val, _ = solved("helpful.txt")
    coalv = val[1:].copy()
    a = H.delta[H.v0, H.spec.game.joint_index((0, 0))]
    coalv[0, a] = val[1, H.v0]
    assert is_rational(H, coalv, val, H.v0, (0, 1), (0, 0))
    coalv[0, a] = val[1, H.v0] + 1
    assert not is_rational(H, coalv, val, H.v0, (0, 1), (0, 0))
    with pytest.raises(ValueError):
        is_rational(H, coalv, val, H.v0, (0,), (0,))


def test_follower_picks_value_minimising_action():
    H, _, sol = solved("follower.txt")
    assert sol.follower_action(H.v0, (0,), (0,), 2) == 1
    assert sol.follower_action(H.v0, (0,), (0,), 1) == 0      # single action
    with pytest.raises(ValueError):
        sol.follower_action(H.v0, (0, 2), (0, 0), 2)
    with pytest.raises(KeyError):
        sol.candv(H.v0, (0,), (1,))


def test_tie_break_prefers_leader_alone():
    H, _, sol = solved("follower.txt")
    entries = sol.act(H.v0)
    assert entries[0] == ((0,), (0,))
    assert [e[0] for e in entries] == [(0,), (0, 1), (0, 2), (0, 2)]


def test_enforcement_is_robust(rng):
    for _ in range(30):
        H = build_product(random_problem(rng, owned=True))
        val = value_table(H)
        sol = synthesize(H, val)
        g = H.spec.game
        for v in np.flatnonzero(sol.level > 0):
            inside = sol.result.level_set(int(sol.level[v]) - 1)
            for c, a_c in sol.act(int(v)):
                others = [p for p in range(H.n_players) if p not in c]
                for rest in np.ndindex(*[g.dims[p] for p in others]):
                    ids = [0] * H.n_players
                    for p, a in zip(list(c) + others, list(a_c) + list(rest)):
                        ids[p] = a
                    assert inside[H.delta[v, g.joint_index(ids)]]


def test_reaches_target_within_state_count(rng):
    for _ in range(30):
        H = build_product(random_problem(rng))
        sol = synthesize(H, value_table(H))
        v = H.v0
        for _ in range(H.n_states):
            if sol.level[v] <= 0:
                break
            _, ids = sol.joint_action(v)
            v = int(H.delta[v, H.spec.game.joint_index(ids)])
        assert H.rank[0, v] <= sol.l_star


def test_counters_within_bounds(rng):
    for _ in range(50):
        H = build_product(random_problem(rng, dense=bool(rng.integers(2))))
        sol = synthesize(H, value_table(H))
        assert sol.evaluations <= complexity_bound(H)
        assert sol.iterations <= H.rank_max[0] * H.n_states + 1


def test_coalv_starts_from_values():
    H, val, sol = solved("unhelpful.txt")
    first = sol.attempts[0]
    assert (first.coalv_history[0] == val[1:]).all()


def test_blocksworld_solution(bw_product, bw_solution):
    H, sol = bw_product, bw_solution
    assert sol.l_star == 0
    coalition, _ = sol.leader_choice(H.v0)
    assert coalition == (0, 1)
    assert sol.evaluations <= complexity_bound(H)


def test_blocksworld_s2_coalition_with_p3_is_rational(bw_product, bw_solution, bw_values):
    H, sol = bw_product, bw_solution
    g = H.spec.game
    v = H.v0
    for state, _, actions in FIRST_PLAY[:2]:
        ids = tuple(g.actions[p].index(a) for p, a in enumerate(actions))
        v = int(H.delta[v, g.joint_index(ids)])
    assert g.states[H.gstate[v]] == FIRST_PLAY[2][0]
    assert bw_values[2, v] == 3
    c, a_c = sol.leader_choice(v)
    assert c == (0, 2)
    assert is_rational(H, sol.coalv, bw_values, v, c, a_c)


def test_export_is_deterministic():
    H, val, sol = solved("follower.txt")
    text = export_solution(sol)
    assert text == export_solution(synthesize(H, val))
    assert text.startswith("l* = 0\n")
    assert "P3, c1, [2, 1]" in text
