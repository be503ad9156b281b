import json

import numpy as np
import pytest

from coalsynth.errors import MissingTransitionError, ProblemFormatError
from coalsynth.game import (coalition_text, dump_problem, feasible_coalitions, load_problem,
                            problem_from_dict, problem_to_dict)

from conftest import DATA, problem


def test_self_loop_file():
    spec = problem("selfloop.txt")
    g = spec.game
    assert g.players == ("P1",) and g.states == ("s",)
    assert g.trans.shape == (1, 1)
    assert g.label_names(0) == {"e1"}


def test_missing_transition_is_named():
    with pytest.raises(MissingTransitionError) as err:
        problem("missing.txt")
    assert "t" in str(err.value) and "(b)" in str(err.value)


def test_blocksworld_round_trip(bw_spec):
    assert load_problem(dump_problem(bw_spec)) == bw_spec
    assert load_problem(dump_problem(bw_spec, "json")) == bw_spec


def test_round_trip_keeps_digest():
    spec = problem("helpful.txt")
    again = problem_from_dict(json.loads(json.dumps(problem_to_dict(spec))))
    assert again.digest == spec.digest


@pytest.mark.parametrize("n, expected", [(1, ["{1}"]), (2, ["{1}", "{1,2}"]),
                                         (3, ["{1}", "{1,2}", "{1,3}"])])
def test_feasible_coalitions(n, expected):
    assert [coalition_text(c) for c in feasible_coalitions(n)] == expected


def test_joint_action_encoding(bw_spec):
    g = bw_spec.game
    assert g.n_joint == int(np.prod(g.dims)) == 150
    for j in (0, 7, 149):
        assert g.joint_index(g.joint_actions(j)) == j
    assert g.trans.size == len(g.states) * g.n_joint


def _edit(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


@pytest.fixture
def helpful_text():
    return (DATA / "helpful.txt").read_text()


def test_unknown_section(helpful_text):
    with pytest.raises(ProblemFormatError) as err:
        load_problem(_edit(helpful_text, "[atoms]", "[atomz]"))
    assert err.value.line is not None


def test_unknown_atom_in_goal(helpful_text):
    with pytest.raises(ProblemFormatError) as err:
        load_problem(_edit(helpful_text, "phi1: F g1", "phi1: F g9"))
    assert "g9" in str(err.value) and err.value.line is not None


def test_unknown_target_state(helpful_text):
    with pytest.raises(ProblemFormatError):
        load_problem(_edit(helpful_text, "v0 (a0,b0) A", "v0 (a0,b0) Z"))


def test_duplicate_transition(helpful_text):
    with pytest.raises(ProblemFormatError):
        load_problem(helpful_text.replace("[goals]", "v0 (a0,b0) B\n\n[goals]"))


def test_preference_on_unknown_goal(helpful_text):
    with pytest.raises(ProblemFormatError):
        load_problem(_edit(helpful_text, "P1: phi1 > phi2", "P1: phi1 > phi7"))


def test_goal_by_index(helpful_text):
    spec = load_problem(_edit(helpful_text, "P1: phi1 > phi2", "P1: 1 > 2"))
    assert spec.prefs[0].strictly(0, 1)


def test_reachable_keeps_unreachable_states(helpful_text):
    text = helpful_text.replace("B: g2", "B: g2\nC:")
    text = text.replace("[goals]", "".join(f"C ({a},{b}) C\n" for a in ("a0", "a1")
                                           for b in ("b0", "b1")) + "\n[goals]")
    spec = load_problem(text)
    assert "C" in spec.game.states
    assert spec.game.states.index("C") not in spec.game.reachable()
