from __future__ import annotations

import pytest

from lintrack.implementations import build_case
from lintrack.implementations.hw_queue import hw_queue_machine
from lintrack.implementations.union_find import uf_machine
from lintrack.model import (
    ACK,
    BOT,
    Action,
    Event,
    EventKind,
    LineKind,
    ModelError,
    Run,
    behavior,
    classify_line,
    replay,
    step,
    successor,
    well_formed,
)
from lintrack.seqtypes import DEQUEUE, ENQUEUE, FIND, UNITE


@pytest.fixture
def queue():
    return hw_queue_machine(4)


def test_classify_hw_queue_lines(queue):
    assert classify_line(queue, 1) == (LineKind.INVOCATION, ENQUEUE)
    assert classify_line(queue, 2) == (LineKind.INTERMEDIATE, ENQUEUE)
    assert classify_line(queue, 4) == (LineKind.RETURN, ENQUEUE)
    with pytest.raises(ModelError):
        classify_line(queue, 42)


def test_invocation_binds_argument_and_moves_pc(queue):
    cfg = queue.initial_config(2)
    [(ev, nxt)] = step(queue, cfg, 0, (ENQUEUE, 5))
    assert ev == Event(0, 1, EventKind.INVOKE, ENQUEUE, 5)
    assert queue.pc(nxt, 0) == 2
    assert queue.local(nxt, 0)["v"] == 5
    assert nxt.shared == cfg.shared


def test_idle_process_needs_an_invocation(queue):
    with pytest.raises(ModelError):
        step(queue, queue.initial_config(1), 0)


def test_busy_process_rejects_an_invocation(queue):
    [(_, cfg)] = step(queue, queue.initial_config(1), 0, (ENQUEUE, 1))
    with pytest.raises(ModelError):
        step(queue, cfg, 0, (DEQUEUE, BOT))


def test_any_try_line_has_two_successors():
    m = uf_machine(3, max_tries=2)
    cfg = m.initial_config(1)
    cfg = m.with_shared(cfg, par=(2, 3, 3))
    [(_, cfg)] = step(m, cfg, 0, (FIND, 1))
    for _ in range(2):  # read parent, read grandparent
        [(_, cfg)] = step(m, cfg, 0)
    assert m.pc(cfg, 0) == 4
    out = step(m, cfg, 0)
    assert {ev.label for ev, _ in out} == {"ok-retry", "ok-advance"}
    assert {m.pc(c, 0) for _, c in out} == {2, 5}


def test_return_line_emits_response_and_resets(queue):
    cfg = queue.initial_config(1)
    for inv in [(ENQUEUE, 5), None, None]:
        [(_, cfg)] = step(queue, cfg, 0, inv)
    [(ev, nxt)] = step(queue, cfg, 0)
    assert ev.kind is EventKind.RESPONSE and ev.res == ACK
    assert queue.is_idle(nxt, 0)
    assert queue.local(nxt, 0) == dict(queue.local_init)


def _solo(machine, ops):
    cfg = machine.initial_config(1)
    events = []
    for inv in ops:
        ev, cfg = step(machine, cfg, 0, inv)[0]
        events.append(ev)
        while not machine.is_idle(cfg, 0):
            ev, cfg = step(machine, cfg, 0)[-1]
            events.append(ev)
    return events


def test_solo_enqueue_then_dequeue_returns_value(queue):
    events = _solo(queue, [(ENQUEUE, 5), (DEQUEUE, BOT)])
    assert events[-1].res == 5


def test_solo_unite_then_find_returns_max():
    m = uf_machine(3, max_tries=1)
    events = _solo(m, [(UNITE, (1, 2)), (FIND, 1)])
    assert events[-1].res == 2


def test_zero_event_run_has_empty_behavior(queue):
    assert behavior(Run(queue.initial_config(2))) == ()


def test_single_invocation_behavior(queue):
    cfg = queue.initial_config(2)
    [(ev, nxt)] = step(queue, cfg, 0, (ENQUEUE, 1))
    run = Run(cfg).extend(ev, nxt)
    assert behavior(run) == (Action(0, EventKind.INVOKE, ENQUEUE, 1, BOT),)


def test_queue_behavior_example():
    # p1 invokes Enqueue(5), p2 invokes Dequeue, p1 responds ack,
    # p2 responds 5, p2 invokes Enqueue(9); processes are 0-indexed here.
    m = build_case("atomic-queue").machine
    cfg = m.initial_config(2)
    run = Run(cfg)

    def go(pid, inv=None, label=None):
        nonlocal run
        options = step(m, run.final, pid, inv)
        ev, nxt = next((e, c) for e, c in options if label is None or e.label == label)
        run = run.extend(ev, nxt)

    go(0, (ENQUEUE, 5))
    go(1, (DEQUEUE, BOT))
    go(0)  # apply
    go(0)  # return ack
    go(1)  # apply dequeue
    go(1)  # return 5
    go(1, (ENQUEUE, 9))
    beh = behavior(run)
    assert len(beh) == 5
    assert [a.kind for a in beh] == [EventKind.INVOKE] * 2 + [EventKind.RESPONSE] * 2 + [EventKind.INVOKE]
    assert beh[-1] == Action(1, EventKind.INVOKE, ENQUEUE, 9, BOT)
    assert beh[3].res == 5
    assert well_formed(beh)


def test_well_formed_rejects_double_invocation():
    a = Action(0, EventKind.INVOKE, ENQUEUE, 1, BOT)
    assert not well_formed((a, a))
    assert not well_formed((Action(0, EventKind.RESPONSE, ENQUEUE, 1, ACK),))


def test_event_json_round_trip():
    ev = Event(1, 12, EventKind.RESPONSE, "Scan", BOT, (1, 0), "")
    assert Event.from_json(ev.to_json()) == ev
    ev = Event(0, 1, EventKind.INVOKE, "Write", (0, 2))
    assert Event.from_json(ev.to_json()) == ev


def test_replay_reconstructs_configs(queue):
    cfg0 = queue.initial_config(1)
    events = _solo(queue, [(ENQUEUE, 1), (DEQUEUE, BOT)])
    run = replay(queue, cfg0, events)
    assert len(run) == len(events)
    assert queue.is_idle(run.final, 0)
    bogus = events[0]._replace(arg=7)
    with pytest.raises(ModelError):
        successor(queue, cfg0, events[1]) if False else successor(queue, run.configs[0], bogus)


def test_run_requires_one_config_per_event(queue):
    with pytest.raises(ModelError):
        Run(queue.initial_config(1), (Event(0, 1, EventKind.INVOKE, ENQUEUE, 1),), ())
