import numpy as np
import pytest

from coalsynth.oracle import random_problem
from coalsynth.product import build_product
from coalsynth.synthesis import synthesize
from coalsynth.values import value_table
from coalsynth.verify import CHECKS, discard_mismatch, run_checks

from conftest import DISCARD_SEEDS, discard_instance, problem


def failed(lines):
    return [str(ln) for ln in lines if not ln.passed]


def test_one_line_per_check():
    H = build_product(problem("helpful.txt"))
    lines = run_checks(H, "helpful")
    assert [ln.check for ln in lines] == list(CHECKS)
    assert failed(lines) == []


@pytest.mark.parametrize("name", ["selfloop.txt", "helpful.txt", "unhelpful.txt", "follower.txt",
                                  "control.txt", "chain.txt"])
def test_fixtures_pass(name):
    assert failed(run_checks(build_product(problem(name)), name)) == []


def test_random_instances_pass(rng):
    for k in range(40):
        H = build_product(random_problem(rng, owned=bool(k % 2)))
        assert failed(run_checks(H, f"r{k}", seed=k)) == []


@pytest.mark.parametrize("seed", DISCARD_SEEDS)
def test_instances_with_discards_pass(seed):
    H = discard_instance(seed)
    sol = synthesize(H, value_table(H), record=True)
    assert any(d for r in sol.attempts for d in r.discards)
    assert failed(run_checks(H, str(seed))) == []


def test_corrupted_values_are_caught():
    H = build_product(problem("control.txt"))
    val = value_table(H).copy()
    val[0, :] = H.rank_max[0]
    bad = {ln.check for ln in run_checks(H, "control", val=val) if not ln.passed}
    assert "values-oracle" in bad
    assert "msw-not-dominated" in bad


def test_tampered_discards_are_caught():
    H = build_product(problem("unhelpful.txt"))
    sol = synthesize(H, value_table(H), record=True)
    assert discard_mismatch(H, sol) is None
    sol.attempts[0].discards[0].clear()
    assert discard_mismatch(H, sol) is not None
