"""Executable semantics for concurrent object implementations.

An implementation is a :class:`StepMachine`: numbered atomic lines over
shared base objects and per-process registers.  A :class:`Config` is a
value (shared cells plus every process's registers), and :func:`step`
enumerates the successors of a configuration when one process executes
the line its program counter points at.

Idle processes sit at ``pc == IDLE``.  Executing the invocation line of an
operation is the invocation event; executing a return line is the response
event and resets every register of the process to its initial value.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, NamedTuple

BOT = None
"""The undefined value, used for empty cells and unset status fields."""

ACK = "ack"

IDLE = 0
"""Program counter of a process that is between operations."""


class ModelError(ValueError):
    """A structural error in a machine, spec or configuration."""


class _NotEnabled:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_ENABLED"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_NotEnabled, ())


NOT_ENABLED = _NotEnabled()
"""Returned by a transition function where it is undefined."""


# ---------------------------------------------------------------------------
# Sequential object types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SequentialSpec:
    """An object type with a finite operation/argument domain.

    ``delta(state, pid, op, arg)`` returns ``(new_state, response)`` or
    :data:`NOT_ENABLED` where the operation has no transition.
    """

    name: str
    initial: Hashable
    arguments: Mapping[str, tuple]
    delta: Callable[[Any, int, str, Any], Any]
    contains: Callable[[Any], bool] | None = None

    @property
    def operations(self) -> tuple[str, ...]:
        return tuple(self.arguments)

    def apply(self, state, pid: int, op: str, arg):
        if op not in self.arguments:
            raise ModelError(f"{self.name}: unknown operation {op!r}")
        out = self.delta(state, pid, op, arg)
        if out is NOT_ENABLED:
            return out
        _, res = out
        if res is BOT:
            raise ModelError(f"{self.name}: delta produced the undefined response")
        return out

    def invocations(self) -> list[tuple[str, Any]]:
        return [(op, arg) for op, args in self.arguments.items() for arg in args]

    def __hash__(self) -> int:
        return id(self)


# ---------------------------------------------------------------------------
# Atomic configurations (shared by the tracker and the oracle)
# ---------------------------------------------------------------------------


class ProcessStatus(NamedTuple):
    op: Any = BOT
    arg: Any = BOT
    res: Any = BOT

    @property
    def idle(self) -> bool:
        return self.op is BOT

    @property
    def pending(self) -> bool:
        return self.op is not BOT and self.res is BOT

    @property
    def linearized(self) -> bool:
        return self.op is not BOT and self.res is not BOT


IDLE_STATUS = ProcessStatus()


class AtomicConfiguration(NamedTuple):
    """A sequential object state and the status of every process."""

    sigma: Any
    f: tuple[ProcessStatus, ...]

    @classmethod
    def initial(cls, spec: SequentialSpec, nprocs: int) -> AtomicConfiguration:
        return cls(spec.initial, (IDLE_STATUS,) * nprocs)

    def with_status(self, pid: int, status: ProcessStatus, sigma=...) -> AtomicConfiguration:
        f = self.f[:pid] + (status,) + self.f[pid + 1:]
        return AtomicConfiguration(self.sigma if sigma is ... else sigma, f)


MetaConfiguration = frozenset
"""A meta-configuration is a frozenset of :class:`AtomicConfiguration`."""


def sorted_meta(meta) -> list[AtomicConfiguration]:
    return sorted(meta, key=repr)


# ---------------------------------------------------------------------------
# Step machines
# ---------------------------------------------------------------------------


class LineKind(enum.Enum):
    INVOCATION = "invocation"
    INTERMEDIATE = "intermediate"
    RETURN = "return"


class Branch(NamedTuple):
    """One alternative outcome of executing a line.

    ``shared`` and ``local`` hold only the cells the line writes.  Return
    lines put the returned value in ``response``.
    """

    shared: Mapping[str, Any] = {}
    local: Mapping[str, Any] = {}
    label: str = ""
    response: Any = BOT


@dataclass(frozen=True)
class Line:
    number: int
    kind: LineKind
    run: Callable[..., Sequence[Branch]]
    op: str | None = None
    text: str = ""


class Config(NamedTuple):
    shared: tuple
    locals: tuple[tuple, ...]


class EventKind(str, enum.Enum):
    INVOKE = "invoke"
    RESPONSE = "response"
    INTERNAL = "internal"


class Event(NamedTuple):
    pid: int
    line: int
    kind: EventKind
    op: Any = BOT
    arg: Any = BOT
    res: Any = BOT
    label: str = ""

    def action(self) -> Action:
        return Action(self.pid, self.kind, self.op, self.arg, self.res)

    def to_json(self) -> dict:
        return {
            "pid": self.pid,
            "line": self.line,
            "kind": self.kind.value,
            "op": self.op,
            "arg": _jsonable(self.arg),
            "res": _jsonable(self.res),
            "label": self.label,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Event:
        return cls(
            data["pid"],
            data["line"],
            EventKind(data["kind"]),
            data.get("op"),
            _from_jsonable(data.get("arg")),
            _from_jsonable(data.get("res")),
            data.get("label", ""),
        )


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def _from_jsonable(value):
    if isinstance(value, list):
        return tuple(_from_jsonable(v) for v in value)
    return value


class Action(NamedTuple):
    """An invocation or response, stripped of implementation line numbers."""

    pid: int
    kind: EventKind
    op: Any = BOT
    arg: Any = BOT
    res: Any = BOT


Behavior = tuple
"""A behavior is a tuple of :class:`Action` values."""


@dataclass(frozen=True, eq=False)
class StepMachine:
    """An implementation as a table of atomic lines.

    Every local register map must contain ``pc`` (first), ``op`` and ``arg``.
    ``entry`` maps each operation to its invocation line.
    """

    name: str
    shared_init: Mapping[str, Hashable]
    local_init: Mapping[str, Hashable]
    lines: Mapping[int, Line]
    entry: Mapping[str, int]
    description: str = ""
    shared_names: tuple[str, ...] = field(init=False)
    local_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        for name in ("pc", "op", "arg"):
            if name not in self.local_init:
                raise ModelError(f"{self.name}: locals must include {name!r}")
        if next(iter(self.local_init)) != "pc":
            raise ModelError(f"{self.name}: 'pc' must be the first register")
        if self.local_init["pc"] != IDLE:
            raise ModelError(f"{self.name}: initial pc must be IDLE")
        for op, number in self.entry.items():
            line = self.lines.get(number)
            if line is None or line.kind is not LineKind.INVOCATION:
                raise ModelError(f"{self.name}: entry of {op!r} is not an invocation line")
        object.__setattr__(self, "shared_names", tuple(self.shared_init))
        object.__setattr__(self, "local_names", tuple(self.local_init))

    def __hash__(self) -> int:
        return id(self)

    @property
    def operations(self) -> tuple[str, ...]:
        return tuple(self.entry)

    def initial_config(self, nprocs: int) -> Config:
        lo = tuple(self.local_init.values())
        return Config(tuple(self.shared_init.values()), (lo,) * nprocs)

    def shared(self, config: Config) -> dict[str, Any]:
        return dict(zip(self.shared_names, config.shared))

    def local(self, config: Config, pid: int) -> dict[str, Any]:
        return dict(zip(self.local_names, config.locals[pid]))

    def pc(self, config: Config, pid: int) -> int:
        return config.locals[pid][0]

    def is_idle(self, config: Config, pid: int) -> bool:
        return self.pc(config, pid) == IDLE

    def with_shared(self, config: Config, **cells) -> Config:
        sh = self.shared(config)
        sh.update(cells)
        return Config(tuple(sh[n] for n in self.shared_names), config.locals)

    def with_local(self, config: Config, pid: int, **regs) -> Config:
        lo = self.local(config, pid)
        lo.update(regs)
        new = tuple(lo[n] for n in self.local_names)
        return Config(config.shared, config.locals[:pid] + (new,) + config.locals[pid + 1:])


def classify_line(machine: StepMachine, number: int) -> tuple[LineKind, str | None]:
    try:
        line = machine.lines[number]
    except KeyError:
        raise ModelError(f"{machine.name} has no line {number}") from None
    return line.kind, line.op


def _apply(machine: StepMachine, config: Config, pid: int, branch: Branch, reset: bool) -> Config:
    shared = config.shared
    if branch.shared:
        sh = dict(zip(machine.shared_names, shared))
        for k, v in branch.shared.items():
            if k not in sh:
                raise ModelError(f"{machine.name}: unknown shared cell {k!r}")
            sh[k] = v
        shared = tuple(sh[n] for n in machine.shared_names)
    if reset:
        new = tuple(machine.local_init.values())
    else:
        lo = dict(zip(machine.local_names, config.locals[pid]))
        for k, v in branch.local.items():
            if k not in lo:
                raise ModelError(f"{machine.name}: unknown register {k!r}")
            lo[k] = v
        new = tuple(lo[n] for n in machine.local_names)
    return Config(shared, config.locals[:pid] + (new,) + config.locals[pid + 1:])


def step(
    machine: StepMachine,
    config: Config,
    pid: int,
    invocation: tuple[str, Any] | None = None,
) -> list[tuple[Event, Config]]:
    """All (event, successor) pairs for ``pid`` executing its next line.

    An idle process needs an ``invocation = (op, arg)`` chosen by the
    generator; it then executes the operation's invocation line.
    """
    sh = dict(zip(machine.shared_names, config.shared))
    lo = dict(zip(machine.local_names, config.locals[pid]))
    pc = lo["pc"]
    if pc == IDLE:
        if invocation is None:
            raise ModelError(f"process {pid} is idle; an invocation must be chosen")
        op, arg = invocation
        if op not in machine.entry:
            raise ModelError(f"{machine.name} does not implement {op!r}")
        line = machine.lines[machine.entry[op]]
        branches = line.run(sh, lo, pid, arg)
        out = []
        for br in branches:
            local = {"op": op, "arg": arg, **br.local}
            nxt = _apply(machine, config, pid, br._replace(local=local), reset=False)
            out.append((Event(pid, line.number, EventKind.INVOKE, op, arg, label=br.label), nxt))
        return out

    if invocation is not None:
        raise ModelError(f"process {pid} is not idle")
    line = machine.lines.get(pc)
    if line is None:
        raise ModelError(f"{machine.name} has no line {pc}")
    out = []
    for br in line.run(sh, lo, pid):
        if line.kind is LineKind.RETURN:
            nxt = _apply(machine, config, pid, br, reset=True)
            ev = Event(pid, pc, EventKind.RESPONSE, lo["op"], lo["arg"], br.response, br.label)
        else:
            nxt = _apply(machine, config, pid, br, reset=False)
            ev = Event(pid, pc, EventKind.INTERNAL, lo["op"], lo["arg"], label=br.label)
        out.append((ev, nxt))
    if not out:
        raise ModelError(f"{machine.name} line {pc} has no successor")
    return out


def successor(machine: StepMachine, config: Config, event: Event) -> Config:
    """Replay one recorded event, selecting its branch by label."""
    invocation = (event.op, event.arg) if event.kind is EventKind.INVOKE else None
    for ev, nxt in step(machine, config, event.pid, invocation):
        if ev == event:
            return nxt
    raise ModelError(f"event {event} is not a step from this configuration")


# ---------------------------------------------------------------------------
# Runs and behaviors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Run:
    initial: Config
    events: tuple[Event, ...] = ()
    configs: tuple[Config, ...] = ()

    def __post_init__(self):
        if len(self.events) != len(self.configs):
            raise ModelError("a run needs one configuration per event")

    @property
    def final(self) -> Config:
        return self.configs[-1] if self.configs else self.initial

    def extend(self, event: Event, config: Config) -> Run:
        return Run(self.initial, self.events + (event,), self.configs + (config,))

    def __len__(self) -> int:
        return len(self.events)


def replay(machine: StepMachine, initial: Config, events: Sequence[Event]) -> Run:
    config = initial
    configs = []
    for ev in events:
        config = successor(machine, config, ev)
        configs.append(config)
    return Run(initial, tuple(events), tuple(configs))


def behavior(run: Run | Sequence[Event]) -> Behavior:
    events = run.events if isinstance(run, Run) else run
    return tuple(e.action() for e in events if e.kind is not EventKind.INTERNAL)


def well_formed(beh: Behavior) -> bool:
    """Per process, invocations and responses alternate starting with an invocation."""
    open_ops: dict[int, bool] = {}
    for a in beh:
        busy = open_ops.get(a.pid, False)
        if a.kind is EventKind.INVOKE:
            if busy:
                return False
            open_ops[a.pid] = True
        elif a.kind is EventKind.RESPONSE:
            if not busy:
                return False
            open_ops[a.pid] = False
        else:
            return False
    return True


def set_at(seq: tuple, index: int, value) -> tuple:
    return seq[:index] + (value,) + seq[index + 1:]
