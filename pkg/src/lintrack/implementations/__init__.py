"""Case studies addressable by name.

Names: ``hw-queue``, ``jt-union-find``, ``jayanti-snapshot``,
``atomic-queue``, ``atomic-union-find``, ``atomic-snapshot``, and
``<name>:mutant:<bug>`` for the seeded bugs.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field

from ..model import ModelError, SequentialSpec, StepMachine
from ..seqtypes import queue_spec, snapshot_spec, uf_spec
from ..tracker import TrackedMachine, full_tracker
from .atomic import atomic_machine, atomic_tracker
from .hw_queue import hw_queue_machine, hw_queue_mutants, hw_queue_tracker
from .snapshot import snapshot_machine, snapshot_mutants, snapshot_tracker
from .union_find import uf_machine, uf_mutants, uf_tracker

MUTANT_SEP = ":mutant:"


@dataclass(frozen=True)
class Mutant:
    name: str
    description: str
    machine: StepMachine


@dataclass(frozen=True)
class CaseStudy:
    name: str
    machine: StepMachine
    spec: SequentialSpec
    partial_factory: Callable[[StepMachine, SequentialSpec], TrackedMachine] | None = None
    mutants: Mapping[str, Mutant] = field(default_factory=dict)
    suite: str | None = None

    @property
    def partial_tracker(self) -> TrackedMachine | None:
        return None if self.partial_factory is None else self.tracker("partial")

    def tracker(self, kind: str = "full", machine: StepMachine | None = None) -> TrackedMachine:
        """A tracker for ``machine`` (the case's own machine or one of its mutants)."""
        machine = machine or self.machine
        if kind == "full":
            return full_tracker(machine, self.spec)
        if kind == "partial":
            if self.partial_factory is None:
                raise ModelError(f"{self.name}: no partial tracker")
            return self.partial_factory(machine, self.spec)
        raise ModelError(f"tracker must be 'full' or 'partial', not {kind!r}")


@dataclass(frozen=True)
class Params:
    """Size parameters a case study is instantiated with."""

    processes: int = 2
    max_ops_per_process: int = 2
    values: tuple[int, ...] = (1, 2)
    n: int = 3
    m: int = 2
    max_tries: int = 2

    @property
    def capacity(self) -> int:
        return max(1, self.processes * self.max_ops_per_process)


def _mutants(table: dict[str, tuple[str, StepMachine]]) -> dict[str, Mutant]:
    return {bug: Mutant(bug, desc, machine) for bug, (desc, machine) in table.items()}


def _hw_queue(p: Params) -> CaseStudy:
    spec = queue_spec(p.values)
    machine = hw_queue_machine(p.capacity)
    return CaseStudy("hw-queue", machine, spec, hw_queue_tracker, _mutants(hw_queue_mutants(p.capacity)), "hw-queue-inv")


def _union_find(p: Params) -> CaseStudy:
    spec = uf_spec(p.n)
    machine = uf_machine(p.n, p.max_tries)
    return CaseStudy("jt-union-find", machine, spec, uf_tracker, _mutants(uf_mutants(p.n, p.max_tries)), "uf-inv")


def _snapshot(p: Params) -> CaseStudy:
    spec = snapshot_spec(p.m, p.values)
    machine = snapshot_machine(p.m)
    return CaseStudy("jayanti-snapshot", machine, spec, snapshot_tracker, _mutants(snapshot_mutants(p.m)), "snapshot-inv")


def _atomic(name: str, spec: SequentialSpec) -> CaseStudy:
    machine = atomic_machine(spec, name)
    return CaseStudy(name, machine, spec, atomic_tracker)


BUILDERS = {
    "hw-queue": _hw_queue,
    "jt-union-find": _union_find,
    "jayanti-snapshot": _snapshot,
    "atomic-queue": lambda p: _atomic("atomic-queue", queue_spec(p.values)),
    "atomic-union-find": lambda p: _atomic("atomic-union-find", uf_spec(p.n)),
    "atomic-snapshot": lambda p: _atomic("atomic-snapshot", snapshot_spec(p.m, p.values)),
}


def case_names() -> list[str]:
    return list(BUILDERS)


def build_case(name: str, params: Params | None = None) -> CaseStudy:
    base = name.split(MUTANT_SEP)[0]
    if base not in BUILDERS:
        raise ModelError(f"unknown case study {name!r}; known: {', '.join(BUILDERS)}")
    return BUILDERS[base](params or Params())


def resolve(name: str, params: Params | None = None) -> tuple[CaseStudy, StepMachine, Mutant | None]:
    """Split ``name`` into its case study and the machine it designates."""
    case = build_case(name, params)
    if MUTANT_SEP not in name:
        return case, case.machine, None
    bug = name.split(MUTANT_SEP, 1)[1]
    if bug not in case.mutants:
        raise ModelError(f"{case.name} has no mutant {bug!r}; known: {', '.join(case.mutants) or 'none'}")
    mutant = case.mutants[bug]
    return case, mutant.machine, mutant


def mutant_names(cases: Iterable[str] | None = None) -> list[str]:
    out = []
    for name in cases or case_names():
        case = build_case(name)
        out.extend(f"{name}{MUTANT_SEP}{bug}" for bug in case.mutants)
    return out


__all__ = [
    "CaseStudy",
    "Mutant",
    "Params",
    "atomic_machine",
    "build_case",
    "case_names",
    "hw_queue_machine",
    "mutant_names",
    "resolve",
    "snapshot_machine",
    "uf_machine",
]
