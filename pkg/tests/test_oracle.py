from __future__ import annotations

import ast
import subprocess
import sys
from pathlib import Path

import pytest
from _support import walk
from hypothesis import given
from hypothesis import strategies as st

import lintrack.oracle as oracle_module
from lintrack.explorer import Scenario, explore, lemma_sweep, setup, tree_search
from lintrack.model import ACK, BOT, Action, AtomicConfiguration, EventKind, ProcessStatus, Run, behavior, well_formed
from lintrack.oracle import (
    Answer,
    BoundExceeded,
    behavior_linearizable,
    compare,
    lemma_check,
    linearizations,
)
from lintrack.seqtypes import DEQUEUE, ENQUEUE, queue_spec

QUEUE = queue_spec((1, 2))
INV, RES = EventKind.INVOKE, EventKind.RESPONSE

# three processes, one operation each: two enqueuers and a dequeuer
HQ_GADGET = Scenario(
    "hw-queue",
    processes=3,
    max_ops_per_process=1,
    roles=(("Enqueue",), ("Enqueue",), ("Dequeue",)),
    max_events=12,
    oracle_bounds={"tree_nodes": 2_000_000, "behavior_length": 12},
)


def test_empty_behavior_has_the_initial_configuration():
    assert linearizations((), QUEUE, 2) == {AtomicConfiguration.initial(QUEUE, 2)}


def test_pending_enqueue_has_two_linearizations():
    beh = (Action(0, INV, ENQUEUE, 5, BOT),)
    got = linearizations(beh, queue_spec((5,)), 1)
    assert got == {
        AtomicConfiguration((), (ProcessStatus(ENQUEUE, 5, BOT),)),
        AtomicConfiguration((5,), (ProcessStatus(ENQUEUE, 5, ACK),)),
    }


def test_completed_behavior_fixes_the_state():
    beh = (
        Action(0, INV, ENQUEUE, 1, BOT),
        Action(1, INV, ENQUEUE, 2, BOT),
        Action(0, RES, ENQUEUE, 1, ACK),
        Action(1, RES, ENQUEUE, 2, ACK),
    )
    assert {c.sigma for c in linearizations(beh, QUEUE, 2)} == {(1, 2), (2, 1)}


def test_bound_is_enforced():
    beh = (Action(0, INV, ENQUEUE, 1, BOT), Action(0, RES, ENQUEUE, 1, ACK)) * 4
    with pytest.raises(BoundExceeded):
        linearizations(beh, QUEUE, 1, bound=7)
    assert behavior_linearizable(beh, QUEUE, 1, bound=7).answer is Answer.INCONCLUSIVE


def test_behavior_linearizable_yes_and_no():
    ok = (Action(0, INV, ENQUEUE, 1, BOT), Action(0, RES, ENQUEUE, 1, ACK), Action(1, INV, DEQUEUE, BOT, BOT), Action(1, RES, DEQUEUE, BOT, 1))
    verdict = behavior_linearizable(ok, QUEUE, 2)
    assert verdict.answer is Answer.YES
    assert behavior(verdict.witness) == ok
    bad = ok[:3] + (Action(1, RES, DEQUEUE, BOT, 2),)
    assert behavior_linearizable(bad, QUEUE, 2) == (Answer.NO, None)
    assert linearizations(bad, QUEUE, 2) == frozenset()


def test_compare_reports_a_witness():
    a = AtomicConfiguration.initial(QUEUE, 1)
    b = AtomicConfiguration((1,), a.f)
    assert compare(frozenset({a}), frozenset({a})).answer is Answer.EQUAL
    res = compare(frozenset({a}), frozenset({a, b}))
    assert res.answer is Answer.MISMATCH and res.witness == b


@given(st.lists(st.integers(0, 50), max_size=30))
def test_lemma_check_on_random_hw_runs(picks):
    scenario = Scenario("hw-queue")
    tracked = setup(scenario).tracked
    events, states = walk(scenario, picks, tracked)
    run = Run(states[0].config, tuple(events), tuple(s.config for s in states[1:]))
    result = lemma_check(run, tracked, 2)
    assert result.answer in (Answer.EQUAL, Answer.INCONCLUSIVE)
    if result.answer is Answer.EQUAL:
        assert result.tracker_meta == states[-1].meta


@st.composite
def queue_behaviors(draw):
    """Well-formed two-process queue behaviors with arbitrary responses."""
    out, busy = [], [None, None]
    for _ in range(draw(st.integers(0, 8))):
        pid = draw(st.integers(0, 1))
        if busy[pid] is None:
            op = draw(st.sampled_from([ENQUEUE, DEQUEUE]))
            arg = draw(st.sampled_from([1, 2])) if op == ENQUEUE else BOT
            busy[pid] = (op, arg)
            out.append(Action(pid, INV, op, arg, BOT))
        else:
            op, arg = busy[pid]
            res = ACK if op == ENQUEUE else draw(st.sampled_from([1, 2]))
            busy[pid] = None
            out.append(Action(pid, RES, op, arg, res))
    return tuple(out)


@given(queue_behaviors())
def test_linearizable_iff_some_linearization(beh):
    assert well_formed(beh)
    yes = behavior_linearizable(beh, QUEUE, 2).answer is Answer.YES
    assert yes == bool(linearizations(beh, QUEUE, 2))


def test_lemma_sweep_on_atomic_queue_small():
    scenario = Scenario("atomic-queue", max_ops_per_process=1)
    sweep = lemma_sweep(scenario, setup(scenario).tracked)
    assert sweep.verdict.value == "pass" and not sweep.mismatches and sweep.behaviors > 10


@pytest.mark.parametrize("case", ["atomic-queue", "atomic-snapshot"])
def test_tree_search_yes_on_atomic(case):
    scenario = Scenario(case, max_ops_per_process=1, max_events=8)
    result = tree_search(scenario)
    assert result.answer is Answer.YES and result.labeling is not None


def test_tree_search_yes_on_union_find():
    scenario = Scenario("jt-union-find", max_ops_per_process=1, max_tries=1)
    assert tree_search(scenario).answer is Answer.YES


def test_tree_search_no_on_hw_queue():
    result = tree_search(HQ_GADGET)
    assert result.answer is Answer.NO
    assert 0 < len(result.witness) <= HQ_GADGET.max_events
    # linearizable nonetheless
    assert explore(HQ_GADGET, setup(HQ_GADGET).tracked).passed


def test_tree_search_needs_a_depth_bound_on_cycles():
    from dataclasses import replace

    result = tree_search(replace(HQ_GADGET, max_events=None))
    assert result.answer is Answer.INCONCLUSIVE and "cycle" in result.note


def test_tree_search_node_budget():
    from dataclasses import replace

    result = tree_search(replace(HQ_GADGET, oracle_bounds={"tree_nodes": 100}))
    assert result.answer is Answer.INCONCLUSIVE


def test_oracle_does_not_import_the_tracker():
    code = "import sys, lintrack.oracle; print('lintrack.tracker' in sys.modules)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_oracle_source_has_no_tracker_import():
    src = Path(oracle_module.__file__).read_text()
    names = set()
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, ast.ImportFrom):
            names.add(node.module or "")
        elif isinstance(node, ast.Import):
            names.update(a.name for a in node.names)
    assert not any("tracker" in n for n in names)
