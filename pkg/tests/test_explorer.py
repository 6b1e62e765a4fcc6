from __future__ import annotations

import pytest
from _support import walk
from hypothesis import given
from hypothesis import strategies as st

from lintrack.explorer import (
    Scenario,
    Verdict,
    check_strong,
    explore,
    explore_coupled,
    moves,
    random_walk,
    replay_state,
    setup,
    trace,
    with_bound,
)
from lintrack.model import ModelError, Run, behavior, replay, well_formed

HQ = Scenario("hw-queue")
HQ_PARTIAL = Scenario("hw-queue", tracker="partial")
NO_SWAP = Scenario("hw-queue", mutant="dequeue-no-swap", tracker="partial")


def test_scenario_validation():
    with pytest.raises(ModelError):
        Scenario("hw-queue", processes=0)
    with pytest.raises(ModelError):
        Scenario("hw-queue", mode="fuzz")
    with pytest.raises(ModelError):
        Scenario("hw-queue", roles=(("Enqueue",),))
    with pytest.raises(ModelError):
        Scenario("hw-queue", max_events=-1)


@pytest.mark.parametrize("scenario", [HQ, HQ_PARTIAL], ids=["full", "partial"])
def test_hw_queue_is_linearizable(scenario):
    report = explore(scenario, setup(scenario).tracked)
    assert report.verdict is Verdict.PASS
    assert report.states_visited > 1000 and report.counterexample is None
    assert report.bounds["within_bounds_only"] is True


def test_hw_queue_full_tracker_is_not_a_singleton():
    report = check_strong(HQ, setup(HQ).tracked)
    assert report.verdict is Verdict.FAIL
    assert report.counterexample.steps[-1].post_size > 1


def test_snapshot_partial_is_linearizable():
    scenario = Scenario("jayanti-snapshot", roles=(("Write",), ("Scan",)), tracker="partial")
    assert explore(scenario, setup(scenario).tracked).passed


def test_state_bound_gives_inconclusive():
    scenario = Scenario("hw-queue", max_states=50)
    report = explore(scenario, setup(scenario).tracked)
    assert report.verdict is Verdict.INCONCLUSIVE


def test_random_walk_passes_on_three_processes():
    scenario = Scenario("hw-queue", processes=3, max_ops_per_process=2, tracker="partial")
    report = random_walk(scenario, setup(scenario).tracked, seed=7, num_runs=1000)
    assert report.verdict is Verdict.PASS and report.runs == 1000


def test_random_walk_with_no_runs_passes():
    report = random_walk(NO_SWAP, setup(NO_SWAP).tracked, seed=1, num_runs=0)
    assert report.verdict is Verdict.PASS and report.runs == 0


def test_random_walk_finds_mutant_bug_across_seeds():
    tracked = setup(NO_SWAP).tracked
    for seed in range(5):
        report = random_walk(NO_SWAP, tracked, seed=seed, num_runs=2000)
        assert report.verdict is Verdict.FAIL
        assert not replay_state(tracked, NO_SWAP, report.counterexample.events).meta


def test_random_walk_is_seeded():
    tracked = setup(NO_SWAP).tracked
    a = random_walk(NO_SWAP, tracked, seed=3, num_runs=2000)
    b = random_walk(NO_SWAP, tracked, seed=3, num_runs=2000)
    assert a.counterexample.events == b.counterexample.events


def test_counterexample_is_minimal_and_replays():
    tracked = setup(NO_SWAP).tracked
    report = explore(NO_SWAP, tracked)
    events = report.counterexample.events
    shorter = explore(with_bound(NO_SWAP, len(events) - 1), tracked)
    assert shorter.verdict is Verdict.PASS
    for _ in range(2):
        assert replay_state(tracked, NO_SWAP, events).meta == frozenset()
    steps = trace(tracked, NO_SWAP, events)
    assert [s.event for s in steps] == list(events)
    assert steps[-1].post_size == 0 and all(s.post_size > 0 for s in steps[:-1])


def test_coupled_partial_stays_inside_full():
    s = setup(HQ_PARTIAL)
    report = explore_coupled(HQ_PARTIAL, s.tracked, s.case.tracker("full", s.machine))
    assert report.verdict is Verdict.PASS and not report.not_dominated
    assert report.samples


choices = st.lists(st.integers(0, 50), max_size=25)


@given(choices)
def test_augmentation_preserves_behavior(picks):
    tracked = setup(HQ_PARTIAL).tracked
    events, states = walk(HQ_PARTIAL, picks, tracked)
    base = replay(tracked.base, states[0].config, events)
    assert list(base.configs) == [s.config for s in states[1:]]
    aug = Run(states[0].config, tuple(events), tuple(s.config for s in states[1:]))
    assert behavior(aug) == behavior(base)
    assert well_formed(behavior(base))


@given(choices)
def test_replay_is_deterministic(picks):
    tracked = setup(HQ_PARTIAL).tracked
    events, states = walk(HQ_PARTIAL, picks, tracked)
    again = replay_state(tracked, HQ_PARTIAL, events)
    assert again == states[-1]
    assert replay_state(tracked, HQ_PARTIAL, events) == again


@given(choices, choices)
def test_equal_states_have_equal_successors(p1, p2):
    tracked = setup(HQ_PARTIAL).tracked
    _, s1 = walk(HQ_PARTIAL, p1[:8], tracked)
    _, s2 = walk(HQ_PARTIAL, p2[:8], tracked)
    if s1[-1] == s2[-1]:
        assert hash(s1[-1]) == hash(s2[-1])
        m1 = {(e, c, b) for e, c, b in moves(HQ_PARTIAL, tracked, s1[-1])}
        m2 = {(e, c, b) for e, c, b in moves(HQ_PARTIAL, tracked, s2[-1])}
        assert m1 == m2
