"""Inductive-invariant conjuncts as executable state predicates.

A suite is a named list of conjuncts, each a predicate over a tracked
state (machine configuration plus meta-configuration).  :func:`sweep`
evaluates a suite at every state reachable within a scenario's bounds and
also reports, per transition, conjuncts that held before a step and fail
after it.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from ..explorer import Scenario, State, explore, setup
from ..model import ModelError, StepMachine

__all__ = ["Conjunct", "PredicateSuite", "StateView", "SuiteReport", "get_suite", "suite_names", "sweep"]


class ContractError(ModelError):
    """A predicate was evaluated outside its precondition."""


@dataclass(frozen=True)
class StateView:
    """A tracked state with convenient register access."""

    machine: StepMachine
    config: Any
    meta: frozenset
    nprocs: int
    params: Any = None

    @property
    def shared(self) -> dict:
        return self.machine.shared(self.config)

    def local(self, pid: int) -> dict:
        return self.machine.local(self.config, pid)

    def pc(self, pid: int) -> int:
        return self.machine.pc(self.config, pid)

    @property
    def procs(self) -> range:
        return range(self.nprocs)


@dataclass(frozen=True)
class Conjunct:
    name: str
    predicate: Callable[[StateView], bool]
    enabled: bool = True
    note: str = ""


@dataclass(frozen=True)
class PredicateSuite:
    name: str
    case_study: str
    conjuncts: tuple[Conjunct, ...]

    def active(self, include_disabled: bool = False) -> tuple[Conjunct, ...]:
        return tuple(c for c in self.conjuncts if c.enabled or include_disabled)

    def failing(self, view: StateView, include_disabled: bool = False) -> list[str]:
        return [c.name for c in self.active(include_disabled) if not c.predicate(view)]

    def __getitem__(self, name: str) -> Conjunct:
        for c in self.conjuncts:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass
class SuiteReport:
    suite: str
    states: int = 0
    transitions: int = 0
    failures: dict[str, tuple] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    inductive_failures: dict[str, int] = field(default_factory=dict)
    verdict: str = "pass"
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.verdict == "pass"


def _suites() -> dict[str, Callable[[], PredicateSuite]]:
    from .hw_queue import hw_queue_suite
    from .snapshot import snapshot_suite
    from .union_find import union_find_suite

    return {"hw-queue-inv": hw_queue_suite, "uf-inv": union_find_suite, "snapshot-inv": snapshot_suite}


def suite_names() -> list[str]:
    return list(_suites())


def get_suite(name: str) -> PredicateSuite:
    table = _suites()
    if name not in table:
        raise ModelError(f"unknown suite {name!r}; known: {', '.join(table)}")
    return table[name]()


def sweep(scenario: Scenario, suite: PredicateSuite, include_disabled: bool = False) -> SuiteReport:
    """Evaluate ``suite`` at every reachable state of the scenario's tracked machine."""
    s = setup(scenario)
    machine, n, params = s.machine, scenario.processes, scenario.params()
    report = SuiteReport(suite.name)
    cache: dict[State, frozenset[str]] = {}
    start = time.perf_counter()

    def bad_at(state: State) -> frozenset[str]:
        if state not in cache:
            view = StateView(machine, state.config, state.meta, n, params)
            cache[state] = frozenset(suite.failing(view, include_disabled))
        return cache[state]

    def check(_machine, state: State) -> list[str]:
        return sorted(bad_at(state))

    def on_transition(pre: State, ev, post: State) -> None:
        report.transitions += 1
        for name in bad_at(post) - bad_at(pre):
            report.inductive_failures[name] = report.inductive_failures.get(name, 0) + 1

    result = explore(scenario, s.tracked, check=check, on_transition=on_transition, stop_at_first=False, expand_failing=True)
    report.states = result.states_visited
    for name, _, events in result.violations:
        report.counts[name] = report.counts.get(name, 0) + 1
        report.failures.setdefault(name, events)
    if result.verdict.value == "inconclusive":
        report.verdict = "inconclusive"
    elif report.failures or report.inductive_failures:
        report.verdict = "fail"
    report.elapsed = time.perf_counter() - start
    return report
