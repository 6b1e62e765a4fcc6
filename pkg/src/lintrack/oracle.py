"""Brute-force linearization oracle.

Everything here is computed by stepping the atomic implementation of a
sequential type: the set of final atomic configurations of all atomic runs
sharing a behavior, linearizability of a single behavior, and a bounded
search for a prefix-preserving linearization over a tree of runs.  This
module must not depend on :mod:`lintrack.tracker`; it exists to check it.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

from .atomic import APPLY_LINE, RETURN_LINE, atomic_machine, status_of
from .model import (
    Action,
    AtomicConfiguration,
    Config,
    Event,
    EventKind,
    ModelError,
    Run,
    SequentialSpec,
    behavior,
    step,
)

DEFAULT_BEHAVIOR_BOUND = 12
DEFAULT_NODE_BUDGET = 200_000


class BoundExceeded(Exception):
    """The oracle's search bound was reached before an answer."""


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    EQUAL = "equal"
    MISMATCH = "mismatch"
    INCONCLUSIVE = "inconclusive"


class AtomicSemantics:
    """Atomic runs of ``spec`` for ``nprocs`` processes."""

    def __init__(self, spec: SequentialSpec, nprocs: int):
        self.spec = spec
        self.nprocs = nprocs
        self.machine = atomic_machine(spec)

    def initial(self) -> Config:
        return self.machine.initial_config(self.nprocs)

    def to_atomic(self, config: Config) -> AtomicConfiguration:
        sigma = config.shared[0]
        return AtomicConfiguration(sigma, tuple(status_of(self.machine, config, p) for p in range(self.nprocs)))

    def from_atomic(self, c: AtomicConfiguration) -> Config:
        locals_ = []
        for s in c.f:
            if s.idle:
                locals_.append((0, None, None, None))
            elif s.pending:
                locals_.append((APPLY_LINE, s.op, s.arg, None))
            else:
                locals_.append((RETURN_LINE, s.op, s.arg, s.res))
        return Config((c.sigma,), tuple(locals_))

    def linearization_steps(self, config: Config) -> list[tuple[Event, Config]]:
        """Atomic steps that take effect (line 1 without waiting)."""
        out = []
        for p in range(self.nprocs):
            if self.machine.pc(config, p) == APPLY_LINE:
                for ev, nxt in step(self.machine, config, p):
                    if nxt != config:
                        out.append((ev, nxt))
        return out

    def close(self, configs: Iterable[Config]) -> set[Config]:
        seen = set(configs)
        todo = list(seen)
        while todo:
            cfg = todo.pop()
            for _, nxt in self.linearization_steps(cfg):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return seen

    def act(self, config: Config, action: Action) -> list[tuple[Event, Config]]:
        """Atomic-machine steps performing a visible invocation or response."""
        pid = action.pid
        if action.kind is EventKind.INVOKE:
            if self.machine.pc(config, pid) != 0:
                return []
            return step(self.machine, config, pid, (action.op, action.arg))
        if action.kind is EventKind.RESPONSE:
            if self.machine.pc(config, pid) != RETURN_LINE:
                return []
            return [(ev, nxt) for ev, nxt in step(self.machine, config, pid) if ev.res == action.res]
        raise ModelError("only invocations and responses are visible")

    def after(self, configs: Iterable[Config], action: Action) -> set[Config]:
        moved = [nxt for cfg in configs for _, nxt in self.act(cfg, action)]
        return self.close(moved)


def _actions(run_or_behavior) -> tuple[Action, ...]:
    if isinstance(run_or_behavior, Run):
        return behavior(run_or_behavior)
    items = tuple(run_or_behavior)
    if items and isinstance(items[0], Event):
        return behavior(items)
    return items


def final_configs(sem: AtomicSemantics, actions: Sequence[Action]) -> set[Config]:
    frontier = sem.close([sem.initial()])
    for a in actions:
        frontier = sem.after(frontier, a)
        if not frontier:
            break
    return frontier


def linearizations(
    run_or_behavior, spec: SequentialSpec, nprocs: int, bound: int = DEFAULT_BEHAVIOR_BOUND
) -> frozenset[AtomicConfiguration]:
    """Final atomic configurations of every atomic run with the same behavior."""
    actions = _actions(run_or_behavior)
    if len(actions) > bound:
        raise BoundExceeded(f"behavior of length {len(actions)} exceeds bound {bound}")
    sem = AtomicSemantics(spec, nprocs)
    return frozenset(sem.to_atomic(c) for c in final_configs(sem, actions))


@dataclass
class LemmaResult:
    answer: Answer
    tracker_meta: frozenset = frozenset()
    oracle_meta: frozenset = frozenset()
    witness: AtomicConfiguration | None = None


def compare(tracker_meta: frozenset, oracle_meta: frozenset) -> LemmaResult:
    if tracker_meta == oracle_meta:
        return LemmaResult(Answer.EQUAL, tracker_meta, oracle_meta)
    diff = sorted(tracker_meta ^ oracle_meta, key=repr)
    return LemmaResult(Answer.MISMATCH, tracker_meta, oracle_meta, diff[0])


def lemma_check(run: Run, tracked, nprocs: int, bound: int = DEFAULT_BEHAVIOR_BOUND) -> LemmaResult:
    """Compare a tracker's M after ``run`` with the oracle's linearizations.

    ``tracked`` is any object with ``spec``, ``meta_init(n)`` and
    ``advance(meta, event, pre, post)``.
    """
    meta = tracked.meta_init(nprocs)
    pre = run.initial
    for ev, post in zip(run.events, run.configs):
        meta = tracked.advance(meta, ev, pre, post)
        pre = post
    try:
        expected = linearizations(run, tracked.spec, nprocs, bound)
    except BoundExceeded:
        return LemmaResult(Answer.INCONCLUSIVE, meta)
    return compare(meta, expected)


class Verdict(NamedTuple):
    answer: Answer
    witness: tuple[Event, ...] | None = None


def behavior_linearizable(
    beh: Sequence[Action], spec: SequentialSpec, nprocs: int, bound: int = DEFAULT_BEHAVIOR_BOUND
) -> Verdict:
    """YES with an atomic run producing ``beh``, or NO."""
    actions = tuple(beh)
    if len(actions) > bound:
        return Verdict(Answer.INCONCLUSIVE)
    sem = AtomicSemantics(spec, nprocs)
    root = (0, sem.initial())
    parent: dict = {root: None}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        k, cfg = node
        if k == len(actions):
            events = []
            while parent[node] is not None:
                node, ev = parent[node]
                events.append(ev)
            return Verdict(Answer.YES, tuple(reversed(events)))
        nexts = [(k, ev, nxt) for ev, nxt in sem.linearization_steps(cfg)]
        nexts += [(k + 1, ev, nxt) for ev, nxt in sem.act(cfg, actions[k])]
        for k2, ev, nxt in nexts:
            child = (k2, nxt)
            if child not in parent:
                parent[child] = (node, ev)
                queue.append(child)
    return Verdict(Answer.NO)


# -- prefix-preserving linearization search ----------------------------------

Successors = Callable[[Config, tuple], list[tuple[Event, Config, tuple]]]


@dataclass
class Labeling:
    """Sets G(node) of configurations a committed linearization may sit at.

    A configuration is in G(node) iff for every extension of the run by
    one event, the same commitment can be continued by one evolution step
    into a configuration in G(child).  The empty run is labeled by the
    initial configuration iff a prefix-preserving labeling exists.
    """

    sem: AtomicSemantics
    memo: dict
    depth_bound: int | None
    _steps: dict = field(default_factory=dict, repr=False)

    def key(self, config: Config, budgets: tuple, meta: frozenset, depth: int = 0):
        remaining = None if self.depth_bound is None else self.depth_bound - depth
        return (config, budgets, meta, remaining)

    def choices(self, config: Config, budgets: tuple, meta: frozenset, depth: int = 0) -> frozenset:
        return self.memo[self.key(config, budgets, meta, depth)]

    def step(self, c: AtomicConfiguration, event: Event) -> frozenset:
        """Configurations one evolution step after ``c`` for ``event``."""
        action = None if event.kind is EventKind.INTERNAL else event.action()
        key = (c, action)
        if key not in self._steps:
            cfg = self.sem.from_atomic(c)
            out = self.sem.close([cfg]) if action is None else self.sem.after([cfg], action)
            self._steps[key] = frozenset(self.sem.to_atomic(x) for x in out)
        return self._steps[key]


@dataclass
class TreeResult:
    answer: Answer
    nodes: int
    labeling: Labeling | None = None
    witness: tuple[Event, ...] = ()
    note: str = ""


class _Cycle(Exception):
    pass


def strong_lin_tree_search(
    machine,
    spec: SequentialSpec,
    nprocs: int,
    budgets: tuple,
    successors: Successors,
    max_events: int | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> TreeResult:
    """Search for a prefix-preserving linearization of every bounded run.

    ``successors(config, budgets)`` lists the generator's moves; the run
    tree below the initial configuration is explored to ``max_events``
    (or exhaustively, which requires the state graph to be acyclic).
    """
    import sys

    sem = AtomicSemantics(spec, nprocs)
    labeling = Labeling(sem, {}, max_events)
    root_meta = frozenset(sem.to_atomic(c) for c in sem.close([sem.initial()]))
    on_stack: set = set()
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20_000))

    after_memo: dict = {}

    def meta_after(meta: frozenset, event: Event) -> frozenset:
        if event.kind is EventKind.INTERNAL:
            return meta
        key = (meta, event.action())
        if key not in after_memo:
            out: set = set()
            for c in meta:
                out |= labeling.step(c, event)
            after_memo[key] = frozenset(out)
        return after_memo[key]

    def solve(config: Config, bud: tuple, meta: frozenset, depth: int) -> frozenset:
        key = labeling.key(config, bud, meta, depth)
        if key in labeling.memo:
            return labeling.memo[key]
        if key in on_stack:
            raise _Cycle()
        if len(labeling.memo) >= node_budget:
            raise BoundExceeded(f"more than {node_budget} tree nodes")
        if max_events is not None and depth >= max_events:
            labeling.memo[key] = meta
            return meta
        on_stack.add(key)
        good = set(meta)
        for ev, nxt, nb in successors(config, bud):
            child_meta = meta_after(meta, ev)
            child_good = solve(nxt, nb, child_meta, depth + 1)
            good = {c for c in good if labeling.step(c, ev) & child_good}
        on_stack.discard(key)
        result = frozenset(good)
        labeling.memo[key] = result
        return result

    init_cfg = machine.initial_config(nprocs)
    init_atomic = sem.to_atomic(sem.initial())
    try:
        good = solve(init_cfg, budgets, root_meta, 0)
    except BoundExceeded as exc:
        return TreeResult(Answer.INCONCLUSIVE, len(labeling.memo), note=str(exc))
    except _Cycle:
        return TreeResult(Answer.INCONCLUSIVE, len(labeling.memo), note="run graph has a cycle; set max_events")
    finally:
        sys.setrecursionlimit(old_limit)
    if init_atomic in good:
        return TreeResult(Answer.YES, len(labeling.memo), labeling)
    return TreeResult(Answer.NO, len(labeling.memo), labeling, _refutation(labeling, init_cfg, budgets, root_meta, successors, meta_after))


def _refutation(labeling: Labeling, config, budgets, meta, successors, meta_after) -> tuple[Event, ...]:
    """Descend along children whose G is empty, as long as one exists."""
    path: list[Event] = []
    depth = 0
    while True:
        nxt_node = None
        for ev, nxt, nb in successors(config, budgets):
            cm = meta_after(meta, ev)
            key = labeling.key(nxt, nb, cm, depth + 1)
            if key in labeling.memo and not labeling.memo[key]:
                nxt_node = (ev, nxt, nb, cm)
                break
        if nxt_node is None:
            return tuple(path)
        ev, config, budgets, meta = nxt_node
        path.append(ev)
        depth += 1


__all__ = [
    "Answer",
    "AtomicSemantics",
    "BoundExceeded",
    "Labeling",
    "LemmaResult",
    "TreeResult",
    "behavior_linearizable",
    "compare",
    "lemma_check",
    "linearizations",
    "strong_lin_tree_search",
]
