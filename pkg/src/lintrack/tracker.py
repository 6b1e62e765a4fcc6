"""Meta-configuration trackers.

A tracker augments every line of a step machine with an update of the
auxiliary variable ``M``, a set of atomic configurations.  The full tracker
keeps every configuration any linearization of the run so far could end
in; a partial tracker keeps a subset chosen by per-line rules.
"""

from __future__ import annotations

import functools
import itertools
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .model import (
    BOT,
    IDLE_STATUS,
    AtomicConfiguration,
    Config,
    Event,
    EventKind,
    LineKind,
    MetaConfiguration,
    ModelError,
    NOT_ENABLED,
    ProcessStatus,
    SequentialSpec,
    StepMachine,
    sorted_meta,
)

__all__ = [
    "AtomicConfiguration",
    "FULL",
    "MetaConfiguration",
    "ProcessStatus",
    "RawRule",
    "RuleContext",
    "TrackedMachine",
    "TrackerError",
    "TransitionSample",
    "ValidationReport",
    "Violation",
    "delta_star",
    "evolve",
    "evolve_inv",
    "evolve_ret",
    "full_tracker",
    "initial_meta",
    "invoke_cfg",
    "pending",
    "return_cfg",
    "subset_permutations",
    "validate_partial",
]


class TrackerError(ModelError):
    """A helper was applied outside its precondition."""


# -- helpers on single configurations ----------------------------------------


def invoke_cfg(c: AtomicConfiguration, pid: int, op: str, arg) -> AtomicConfiguration:
    if not c.f[pid].idle:
        raise TrackerError(f"process {pid} is not idle in {c}")
    return c.with_status(pid, ProcessStatus(op, arg, BOT))


def return_cfg(c: AtomicConfiguration, pid: int, res) -> AtomicConfiguration:
    status = c.f[pid]
    if not status.linearized or status.res != res:
        raise TrackerError(f"process {pid} is not linearized with response {res!r} in {c}")
    return c.with_status(pid, IDLE_STATUS)


def pending(c: AtomicConfiguration) -> frozenset[int]:
    return frozenset(p for p, s in enumerate(c.f) if s.pending)


def delta_star(spec: SequentialSpec, c: AtomicConfiguration, alpha: Iterable[int]):
    """Linearize the processes of ``alpha`` in order, or return NOT_ENABLED."""
    seen: set[int] = set()
    for pid in alpha:
        status = c.f[pid]
        if pid in seen or not status.pending:
            raise TrackerError(f"process {pid} is not pending in {c}")
        seen.add(pid)
        out = spec.apply(c.sigma, pid, status.op, status.arg)
        if out is NOT_ENABLED:
            return NOT_ENABLED
        sigma, res = out
        c = c.with_status(pid, status._replace(res=res), sigma=sigma)
    return c


def subset_permutations(pids: Iterable[int]) -> list[tuple[int, ...]]:
    """Every ordering of every subset, starting with the empty sequence."""
    pids = sorted(pids)
    return [perm for r in range(len(pids) + 1) for perm in itertools.permutations(pids, r)]


@functools.lru_cache(maxsize=1 << 18)
def _closure(spec: SequentialSpec, c: AtomicConfiguration) -> frozenset:
    out = set()
    for alpha in subset_permutations(pending(c)):
        d = delta_star(spec, c, alpha)
        if d is not NOT_ENABLED:
            out.add(d)
    return frozenset(out)


def linearize_any(spec: SequentialSpec, meta: Iterable[AtomicConfiguration]) -> frozenset:
    out: set = set()
    for c in meta:
        out |= _closure(spec, c)
    return frozenset(out)


# -- the three evolution operators -------------------------------------------


def evolve_inv(spec: SequentialSpec, meta, pid: int, op: str, arg) -> frozenset:
    return linearize_any(spec, (invoke_cfg(c, pid, op, arg) for c in meta))


def evolve(spec: SequentialSpec, meta) -> frozenset:
    return linearize_any(spec, meta)


def returned(meta, pid: int, res) -> frozenset:
    """Keep the configurations where pid already responded ``res``, then make pid idle."""
    return frozenset(return_cfg(c, pid, res) for c in meta if c.f[pid].linearized and c.f[pid].res == res)


def evolve_ret(spec: SequentialSpec, meta, pid: int, res) -> frozenset:
    return linearize_any(spec, returned(meta, pid, res))


def initial_meta(spec: SequentialSpec, nprocs: int) -> frozenset:
    return frozenset({AtomicConfiguration.initial(spec, nprocs)})


# -- tracked machines --------------------------------------------------------


class RuleContext(NamedTuple):
    """What a line's tracker update may look at: the step being taken."""

    pid: int
    event: Event
    pre: Config
    post: Config
    machine: StepMachine


class _Full:
    def __repr__(self) -> str:
        return "FULL"


FULL = _Full()
"""Rule sentinel: linearize every subset of pending processes in every order."""


@dataclass(frozen=True)
class RawRule:
    """A rule that rewrites the whole seed set; used for fault injection."""

    fn: Callable[[RuleContext, frozenset], Iterable[AtomicConfiguration]]


Rule = Any
"""``FULL``, ``None`` (no extra linearization), a :class:`RawRule`, or a
callable ``(ctx, C) -> iterable of pid sequences``."""


@dataclass(frozen=True, eq=False)
class TrackedMachine:
    base: StepMachine
    spec: SequentialSpec
    rules: Mapping[int, Rule] = field(default_factory=dict)
    full: bool = False
    name: str = ""

    def __hash__(self) -> int:
        return id(self)

    def rule(self, line: int) -> Rule:
        if self.full:
            return FULL
        return self.rules.get(line)

    def meta_init(self, nprocs: int) -> frozenset:
        return initial_meta(self.spec, nprocs)

    def seeds(self, meta, event: Event) -> frozenset:
        """The meta-configuration after the line's mandatory bookkeeping."""
        if event.kind is EventKind.INVOKE:
            return frozenset(invoke_cfg(c, event.pid, event.op, event.arg) for c in meta)
        if event.kind is EventKind.RESPONSE:
            return returned(meta, event.pid, event.res)
        return frozenset(meta)

    def advance(self, meta, event: Event, pre: Config, post: Config) -> frozenset:
        rule = self.rule(event.line)
        ctx = RuleContext(event.pid, event, pre, post, self.base)
        seeds = self.seeds(meta, event)
        if rule is FULL:
            return linearize_any(self.spec, seeds)
        if rule is None:
            return seeds
        if isinstance(rule, RawRule):
            return frozenset(rule.fn(ctx, seeds))
        out = set()
        for c in seeds:
            live = pending(c)
            for alpha in rule(ctx, c):
                alpha = tuple(alpha)
                if len(set(alpha)) != len(alpha) or not live.issuperset(alpha):
                    continue
                d = delta_star(self.spec, c, alpha)
                if d is not NOT_ENABLED:
                    out.add(d)
        return frozenset(out)

    def full_advance(self, meta, event: Event) -> frozenset:
        """The full tracker's update for the same event."""
        return linearize_any(self.spec, self.seeds(meta, event))


def _check_signature(base: StepMachine, spec: SequentialSpec) -> None:
    if set(base.operations) != set(spec.operations):
        raise ModelError(
            f"{base.name} implements {sorted(base.operations)}, "
            f"{spec.name} defines {sorted(spec.operations)}"
        )


def full_tracker(base: StepMachine, spec: SequentialSpec) -> TrackedMachine:
    _check_signature(base, spec)
    return TrackedMachine(base, spec, {n: FULL for n in base.lines}, full=True, name=f"{base.name}/full")


def partial_tracker(
    base: StepMachine, spec: SequentialSpec, rules: Mapping[int, Rule], name: str = ""
) -> TrackedMachine:
    _check_signature(base, spec)
    unknown = set(rules) - set(base.lines)
    if unknown:
        raise ModelError(f"rules for lines {sorted(unknown)} not in {base.name}")
    return TrackedMachine(base, spec, dict(rules), full=False, name=name or f"{base.name}/partial")


# -- validity of partial trackers --------------------------------------------


class TransitionSample(NamedTuple):
    """A tracked step observed during exploration: M before, and the step."""

    meta: frozenset
    pre: Config
    event: Event
    post: Config


class Violation(NamedTuple):
    line: int
    kind: LineKind | str
    event: Event | None
    witness: AtomicConfiguration | None
    meta: frozenset


@dataclass
class ValidationReport:
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_partial(
    tracked: TrackedMachine,
    spec: SequentialSpec,
    samples: Iterable[TransitionSample],
    nprocs: int | None = None,
    stop_at_first: bool = False,
) -> ValidationReport:
    """Check each sampled update against the full operator for its line.

    ``M`` must start at the singleton initial configuration, and for each
    step the rule's output must be a subset of what the full evolution of
    the same line would produce.
    """
    report = ValidationReport()
    if nprocs is not None:
        report.checked += 1
        if tracked.meta_init(nprocs) != initial_meta(spec, nprocs):
            report.violations.append(Violation(-1, "init", None, None, tracked.meta_init(nprocs)))
    for meta, pre, event, post in samples:
        report.checked += 1
        kind = tracked.base.lines[event.line].kind
        try:
            got = tracked.advance(meta, event, pre, post)
        except TrackerError:
            report.violations.append(Violation(event.line, kind, event, None, meta))
            continue
        if event.kind is EventKind.INVOKE:
            allowed = evolve_inv(spec, meta, event.pid, event.op, event.arg)
        elif event.kind is EventKind.RESPONSE:
            allowed = evolve_ret(spec, meta, event.pid, event.res)
        else:
            allowed = evolve(spec, meta)
        extra = got - allowed
        if extra:
            report.violations.append(Violation(event.line, kind, event, sorted_meta(extra)[0], meta))
            if stop_at_first:
                break
    return report
