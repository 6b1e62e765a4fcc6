from __future__ import annotations

import pytest

from lintrack.explorer import Scenario, initial_state, setup
from lintrack.implementations import Params
from lintrack.implementations.hw_queue import hw_queue_machine
from lintrack.implementations.snapshot import snapshot_machine
from lintrack.invariants import ContractError, StateView, get_suite, suite_names, sweep
from lintrack.invariants.hw_queue import good_enq_set, good_res, j_inv_seq, values_match_inds
from lintrack.invariants.snapshot import scan_return_set, snapshot_kth_return_set
from lintrack.model import ACK, BOT, AtomicConfiguration, ModelError, ProcessStatus
from lintrack.seqtypes import DEQUEUE, ENQUEUE

IDLE = ProcessStatus()
HQ = hw_queue_machine(2)
SNAP = snapshot_machine(2)


def hq_view(Q=(BOT, BOT), X=1, procs=(), meta=frozenset(), nprocs=2):
    cfg = HQ.with_shared(HQ.initial_config(nprocs), Q=tuple(Q), X=X)
    for pid, regs in procs:
        cfg = HQ.with_local(cfg, pid, **regs)
    return StateView(HQ, cfg, frozenset(meta), nprocs, Params(values=(5, 7, 9)))


def C(sigma=(), *statuses, n=2):
    f = tuple(statuses) + (IDLE,) * (n - len(statuses))
    return AtomicConfiguration(tuple(sigma), f)


# -- good_enq_set -----------------------------------------------------------


def test_good_enq_set_vacuous_range():
    assert good_enq_set(hq_view(X=1), set())


def test_good_enq_set_filled_slot_must_be_included():
    v = hq_view(Q=(5, BOT), X=3)
    assert good_enq_set(v, {1})
    assert not good_enq_set(v, set())


def test_good_enq_set_empty_slot_needs_a_claimant():
    assert not good_enq_set(hq_view(Q=(BOT, BOT), X=2), {1})
    claimed = hq_view(Q=(BOT, BOT), X=2, procs=[(0, {"pc": 3, "op": ENQUEUE, "v": 9, "i": 1})])
    assert good_enq_set(claimed, {1})


def test_good_enq_set_contract():
    with pytest.raises(ContractError):
        good_enq_set(hq_view(X=2), {2})


# -- good_res ---------------------------------------------------------------


def test_good_res_all_idle():
    assert good_res(hq_view(), set(), C())


def test_good_res_line_four_needs_ack():
    v = hq_view(Q=(5, BOT), X=2, procs=[(0, {"pc": 4, "op": ENQUEUE, "v": 5, "i": 1})])
    assert not good_res(v, {1}, C((5,), ProcessStatus(ENQUEUE, 5, BOT)))
    assert good_res(v, {1}, C((5,), ProcessStatus(ENQUEUE, 5, ACK)))


def test_good_res_line_nine_matches_x():
    v = hq_view(X=2, procs=[(1, {"pc": 9, "op": DEQUEUE, "x": 7})])
    assert good_res(v, set(), C((), IDLE, ProcessStatus(DEQUEUE, BOT, 7)))
    assert not good_res(v, set(), C((), IDLE, ProcessStatus(DEQUEUE, BOT, 5)))


# -- values_match_inds ------------------------------------------------------


def test_values_match_inds_examples():
    assert values_match_inds(hq_view(), (), C())
    v = hq_view(Q=(5, 7), X=3)
    assert values_match_inds(v, (1, 2), C((5, 7)))
    assert not values_match_inds(v, (1, 2), C((7, 5)))
    claimed = hq_view(Q=(BOT, BOT), X=2, procs=[(0, {"pc": 3, "op": ENQUEUE, "v": 9, "i": 1})])
    assert values_match_inds(claimed, (1,), C((9,)))


def test_values_match_inds_contract():
    with pytest.raises(ContractError):
        values_match_inds(hq_view(Q=(BOT, BOT), X=2), (1,), C((9,)))


# -- j_inv_seq --------------------------------------------------------------


def test_j_inv_seq_examples():
    v = hq_view(Q=(5, 7), X=3)
    assert j_inv_seq(v, (1, 2))
    assert not j_inv_seq(v, (2, 1))
    sweeping = hq_view(Q=(5, 7), X=3, procs=[(1, {"pc": 8, "op": DEQUEUE, "l": 3, "j": 2})])
    assert j_inv_seq(sweeping, (2, 1))


# -- snapshot return sets ---------------------------------------------------


def snap_view(A=(0, 0), B=(BOT, BOT), procs=(), meta=frozenset(), X=False):
    cfg = SNAP.with_shared(SNAP.initial_config(2), A=tuple(A), B=tuple(B), X=X)
    for pid, regs in procs:
        cfg = SNAP.with_local(cfg, pid, **regs)
    return StateView(SNAP, cfg, frozenset(meta), 2, Params())


def test_kth_return_set_without_scanner():
    v = snap_view(A=(1, 2))
    assert snapshot_kth_return_set(v, 0) == {1} and snapshot_kth_return_set(v, 1) == {2}
    assert scan_return_set(v) == {(1, 2)}


def test_kth_return_set_after_the_flag_is_lowered():
    v = snap_view(A=(1, 2), procs=[(1, {"pc": 12, "op": "Scan", "j": 2, "a": (0, 2)})])
    assert snapshot_kth_return_set(v, 0) == {0}


def test_kth_return_set_pc_ten_with_forwarded_value():
    v = snap_view(A=(1, 2), B=(2, BOT), X=True, procs=[(1, {"pc": 10, "op": "Scan", "j": 2, "a": (0, 2)})])
    assert snapshot_kth_return_set(v, 0) == {1, 2}
    assert snapshot_kth_return_set(v, 1) == {2}


def test_kth_return_set_contracts():
    with pytest.raises(ContractError):
        snapshot_kth_return_set(snap_view(), 2)
    two = snap_view(procs=[(0, {"pc": 7, "op": "Scan"}), (1, {"pc": 8, "op": "Scan", "j": 0, "a": (0, 0)})])
    with pytest.raises(ContractError):
        snapshot_kth_return_set(two, 0)


# -- suites -----------------------------------------------------------------


SCENARIOS = {
    "hw-queue-inv": Scenario("hw-queue", tracker="partial", mode="invariants", suite="hw-queue-inv"),
    "uf-inv": Scenario("jt-union-find", tracker="partial", mode="invariants", suite="uf-inv", max_ops_per_process=1),
    "snapshot-inv": Scenario(
        "jayanti-snapshot", tracker="partial", mode="invariants", suite="snapshot-inv", roles=(("Write",), ("Scan",))
    ),
}


def test_suite_registry():
    assert suite_names() == ["hw-queue-inv", "uf-inv", "snapshot-inv"]
    with pytest.raises(ModelError):
        get_suite("stack-inv")
    suite = get_suite("hw-queue-inv")
    assert suite["I_b"].enabled and not suite["I_b_all"].enabled
    assert "I_L" in [c.name for c in suite.active()]


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_suites_hold_initially(name):
    scenario = SCENARIOS[name]
    s = setup(scenario)
    state = initial_state(scenario, s.tracked)
    view = StateView(s.machine, state.config, state.meta, scenario.processes, scenario.params())
    assert get_suite(name).failing(view, include_disabled=True) == []


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_suites_hold_on_every_reachable_state(name):
    report = sweep(SCENARIOS[name], get_suite(name))
    assert report.ok, (report.failures, report.inductive_failures)
    assert report.states > 100 and report.transitions > report.states - 1


@pytest.mark.parametrize(
    "name, mutant",
    [
        ("hw-queue-inv", "dequeue-no-swap"),
        ("hw-queue-inv", "dequeue-reverse-scan"),
        ("uf-inv", "link-larger-under-smaller"),
        ("uf-inv", "unite-racy-link"),
        ("snapshot-inv", "scan-skips-B-overwrite"),
        ("snapshot-inv", "write-no-forward"),
        ("snapshot-inv", "scan-no-clear"),
    ],
)
def test_suites_flag_mutants(name, mutant):
    from dataclasses import replace

    report = sweep(replace(SCENARIOS[name], mutant=mutant), get_suite(name))
    assert report.verdict == "fail"
    assert report.failures and all(events for events in report.failures.values())


def test_disabled_conjuncts_are_reported_only_on_request():
    scenario = SCENARIOS["hw-queue-inv"]
    suite = get_suite("hw-queue-inv")
    with_disabled = sweep(scenario, suite, include_disabled=True)
    assert set(with_disabled.failures) <= {c.name for c in suite.conjuncts if not c.enabled}
    assert with_disabled.failures
