"""Bounded exhaustive and randomized exploration of tracked machines.

The explorer plays the generator: every process repeatedly picks an
operation from the scenario's finite domain, invokes it, and runs it to
completion one line at a time, interleaved arbitrarily with the others.
Each step also advances the tracker's meta-configuration, and the mode's
invariant is checked in every reached state.  Search is breadth-first by
event count, so the first violation found has a shortest run.
"""

from __future__ import annotations

import enum
import random
import time
from collections import deque
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple

from .implementations import CaseStudy, Params, resolve
from .model import Action, Config, Event, EventKind, ModelError, StepMachine, step, successor
from .oracle import Answer, TreeResult, compare, final_configs, AtomicSemantics, strong_lin_tree_search
from .seqtypes import SCAN, WRITE
from .tracker import TrackedMachine, TransitionSample

MODES = ("full-lin", "partial-lin", "strong", "invariants", "oracle-diff", "random")
DEFAULT_MAX_STATES = 2_000_000
DEFAULT_ORACLE_BOUNDS = {"behavior_length": 12, "tree_nodes": 200_000}


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Scenario:
    case_study: str
    processes: int = 2
    max_ops_per_process: int = 2
    max_events: int | None = None
    values: tuple[int, ...] = (1, 2)
    mode: str = "full-lin"
    tracker: str = "full"
    mutant: str | None = None
    suite: str | None = None
    roles: tuple[tuple[str, ...] | None, ...] | None = None
    seed: int = 0
    runs: int = 100
    max_states: int = DEFAULT_MAX_STATES
    n: int = 3
    m: int = 2
    max_tries: int = 2
    oracle_bounds: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_ORACLE_BOUNDS))

    def __post_init__(self):
        if self.processes < 1 or self.max_ops_per_process < 1:
            raise ModelError("processes and max_ops_per_process must be at least 1")
        if self.max_events is not None and self.max_events < 0:
            raise ModelError("max_events must be non-negative")
        if self.mode not in MODES:
            raise ModelError(f"mode must be one of {', '.join(MODES)}")
        if self.tracker not in ("full", "partial"):
            raise ModelError("tracker must be 'full' or 'partial'")
        if self.roles is not None and len(self.roles) != self.processes:
            raise ModelError("roles needs one entry per process")
        object.__setattr__(self, "values", tuple(self.values))
        if self.roles is not None:
            object.__setattr__(self, "roles", tuple(None if r is None else tuple(r) for r in self.roles))

    @property
    def target(self) -> str:
        return f"{self.case_study}:mutant:{self.mutant}" if self.mutant else self.case_study

    def params(self) -> Params:
        return Params(self.processes, self.max_ops_per_process, self.values, self.n, self.m, self.max_tries)

    def bounds(self) -> dict[str, Any]:
        return {
            "processes": self.processes,
            "max_ops_per_process": self.max_ops_per_process,
            "max_events": self.max_events,
            "values": list(self.values),
            "max_states": self.max_states,
            "within_bounds_only": True,
        }


class Setup(NamedTuple):
    case: CaseStudy
    machine: StepMachine
    tracked: TrackedMachine


def setup(scenario: Scenario) -> Setup:
    case, machine, _ = resolve(scenario.target, scenario.params())
    tracked = case.tracker(scenario.tracker, machine)
    return Setup(case, machine, tracked)


# -- generator ---------------------------------------------------------------


def generator_choices(
    machine: StepMachine, config: Config, pid: int, scenario: Scenario, spec, budget: int
) -> list[tuple[str, Any]]:
    """Invocations process ``pid`` may start, given its remaining budget."""
    if not machine.is_idle(config, pid):
        raise ModelError(f"process {pid} is not idle")
    if budget <= 0:
        return []
    allowed = scenario.roles[pid] if scenario.roles else None
    out = [(op, arg) for op, arg in spec.invocations() if allowed is None or op in allowed]
    if spec.name == "snapshot":
        out = [inv for inv in out if _swss_ok(machine, config, pid, inv)]
    return out


def _swss_ok(machine: StepMachine, config: Config, pid: int, inv) -> bool:
    op, arg = inv
    for p in range(len(config.locals)):
        if p == pid or machine.is_idle(config, p):
            continue
        lo = machine.local(config, p)
        if lo["op"] == op == SCAN:
            return False
        if lo["op"] == op == WRITE and lo["arg"][0] == arg[0]:
            return False
    return True


class State(NamedTuple):
    config: Config
    meta: frozenset
    budgets: tuple[int, ...]


def initial_state(scenario: Scenario, tracked: TrackedMachine) -> State:
    n = scenario.processes
    return State(tracked.base.initial_config(n), tracked.meta_init(n), (scenario.max_ops_per_process,) * n)


def machine_moves(
    scenario: Scenario, machine: StepMachine, spec, config: Config, budgets: tuple[int, ...]
) -> list[tuple[Event, Config, tuple[int, ...]]]:
    """All (event, next config, next budgets) the generator allows."""
    out = []
    for pid in range(scenario.processes):
        if machine.is_idle(config, pid):
            budget = budgets[pid]
            choices = generator_choices(machine, config, pid, scenario, spec, budget)
            if not choices:
                continue
            nb = budgets[:pid] + (budget - 1,) + budgets[pid + 1:]
            for inv in choices:
                for ev, nxt in step(machine, config, pid, inv):
                    out.append((ev, nxt, nb))
        else:
            for ev, nxt in step(machine, config, pid):
                out.append((ev, nxt, budgets))
    return out


def moves(scenario: Scenario, tracked: TrackedMachine, state: State) -> list[tuple[Event, Config, tuple[int, ...]]]:
    return machine_moves(scenario, tracked.base, tracked.spec, state.config, state.budgets)


def advance(tracked: TrackedMachine, state: State, event: Event, config: Config, budgets) -> State:
    return State(config, tracked.advance(state.meta, event, state.config, config), budgets)


# -- reports -----------------------------------------------------------------


@dataclass
class TraceStep:
    event: Event
    pre_size: int
    post_size: int
    config: Config

    def to_json(self) -> dict:
        return {**self.event.to_json(), "pre_M": self.pre_size, "post_M": self.post_size}


@dataclass
class Counterexample:
    events: tuple[Event, ...]
    steps: list[TraceStep]
    violated: list[str]

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class ExplorationReport:
    verdict: Verdict
    states_visited: int = 0
    transitions: int = 0
    depth: int = 0
    counterexample: Counterexample | None = None
    violations: list[tuple[str, Any, tuple[Event, ...]]] = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    elapsed: float = 0.0
    runs: int = 0
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def violated_conjuncts(self) -> list[str]:
        seen: list[str] = []
        for name, _, _ in self.violations:
            if name not in seen:
                seen.append(name)
        return seen


Check = Callable[[StepMachine, State], list[str]]


def check_nonempty(machine: StepMachine, state: State) -> list[str]:
    return [] if state.meta else ["I_L: M is empty"]


def check_singleton(machine: StepMachine, state: State) -> list[str]:
    return [] if len(state.meta) == 1 else [f"I_S: |M| = {len(state.meta)}"]


def trace(tracked: TrackedMachine, scenario: Scenario, events: Sequence[Event]) -> list[TraceStep]:
    """Replay events through machine and tracker, recording |M| around each."""
    state = initial_state(scenario, tracked)
    out = []
    for ev in events:
        nxt = successor(tracked.base, state.config, ev)
        budgets = state.budgets
        if ev.kind is EventKind.INVOKE:
            budgets = budgets[: ev.pid] + (budgets[ev.pid] - 1,) + budgets[ev.pid + 1:]
        new = advance(tracked, state, ev, nxt, budgets)
        out.append(TraceStep(ev, len(state.meta), len(new.meta), nxt))
        state = new
    return out


def replay_state(tracked: TrackedMachine, scenario: Scenario, events: Sequence[Event]) -> State:
    state = initial_state(scenario, tracked)
    for ev in events:
        nxt = successor(tracked.base, state.config, ev)
        budgets = state.budgets
        if ev.kind is EventKind.INVOKE:
            if budgets[ev.pid] <= 0:
                raise ModelError(f"process {ev.pid} has no operations left")
            budgets = budgets[: ev.pid] + (budgets[ev.pid] - 1,) + budgets[ev.pid + 1:]
        state = advance(tracked, state, ev, nxt, budgets)
    return state


def _path(parents: dict, state: State) -> tuple[Event, ...]:
    events = []
    while True:
        entry = parents[state]
        if entry is None:
            break
        state, ev = entry
        events.append(ev)
    return tuple(reversed(events))


def explore(
    scenario: Scenario,
    tracked: TrackedMachine,
    check: Check | None = None,
    on_state: Callable[[State, int], None] | None = None,
    on_transition: Callable[[State, Event, State], None] | None = None,
    stop_at_first: bool = True,
    expand_failing: bool = False,
) -> ExplorationReport:
    """Breadth-first search over every run within the scenario's bounds.

    Failing states are leaves unless ``expand_failing`` is set, in which case
    the search continues through them (used by invariant sweeps).
    """
    check = check or check_nonempty
    start = time.perf_counter()
    root = initial_state(scenario, tracked)
    parents: dict[State, tuple[State, Event] | None] = {root: None}
    depth_of = {root: 0}
    queue = deque([root])
    report = ExplorationReport(Verdict.PASS, bounds=scenario.bounds())

    def visit(state: State, depth: int) -> bool:
        report.states_visited += 1
        report.depth = max(report.depth, depth)
        if on_state:
            on_state(state, depth)
        bad = check(tracked.base, state)
        if bad:
            events = _path(parents, state)
            report.violations.extend((name, hash(state), events) for name in bad)
            if report.counterexample is None:
                report.counterexample = Counterexample(events, trace(tracked, scenario, events), bad)
            return True
        return False

    failed = visit(root, 0)
    while queue and not (failed and stop_at_first):
        state = queue.popleft()
        depth = depth_of[state]
        if scenario.max_events is not None and depth >= scenario.max_events:
            continue
        for ev, nxt_cfg, budgets in moves(scenario, tracked, state):
            nxt = advance(tracked, state, ev, nxt_cfg, budgets)
            report.transitions += 1
            if on_transition:
                on_transition(state, ev, nxt)
            if nxt in parents:
                continue
            parents[nxt] = (state, ev)
            depth_of[nxt] = depth + 1
            if visit(nxt, depth + 1):
                failed = True
                if stop_at_first:
                    break
                if not expand_failing:
                    continue
            if len(parents) > scenario.max_states:
                report.verdict = Verdict.INCONCLUSIVE
                report.note = f"bound exceeded: more than {scenario.max_states} states"
                report.elapsed = time.perf_counter() - start
                return report
            queue.append(nxt)
    if failed:
        report.verdict = Verdict.FAIL
    report.elapsed = time.perf_counter() - start
    return report


def check_strong(scenario: Scenario, tracked: TrackedMachine, **kw) -> ExplorationReport:
    """Explore with the invariant |M| = 1."""
    return explore(scenario, tracked, check=check_singleton, **kw)


def random_walk(
    scenario: Scenario,
    tracked: TrackedMachine,
    seed: int | None = None,
    num_runs: int | None = None,
    check: Check | None = None,
    run_length: int | None = None,
) -> ExplorationReport:
    """Sample runs by picking uniformly among enabled steps."""
    check = check or check_nonempty
    rng = random.Random(scenario.seed if seed is None else seed)
    num_runs = scenario.runs if num_runs is None else num_runs
    length = run_length or scenario.max_events or 200
    start = time.perf_counter()
    report = ExplorationReport(Verdict.PASS, bounds={**scenario.bounds(), "runs": num_runs, "run_length": length})
    seen: set[State] = set()
    for _ in range(num_runs):
        report.runs += 1
        state = initial_state(scenario, tracked)
        events: list[Event] = []
        for _ in range(length):
            options = moves(scenario, tracked, state)
            if not options:
                break
            ev, cfg, budgets = rng.choice(options)
            state = advance(tracked, state, ev, cfg, budgets)
            events.append(ev)
            report.transitions += 1
            report.depth = max(report.depth, len(events))
            seen.add(state)
            bad = check(tracked.base, state)
            if bad:
                report.verdict = Verdict.FAIL
                report.violations.extend((name, hash(state), tuple(events)) for name in bad)
                report.counterexample = Counterexample(tuple(events), trace(tracked, scenario, events), bad)
                report.states_visited = len(seen)
                report.elapsed = time.perf_counter() - start
                return report
    report.states_visited = len(seen)
    report.elapsed = time.perf_counter() - start
    return report


# -- coupled exploration (partial vs full) -----------------------------------


@dataclass
class CoupledReport:
    states_visited: int = 0
    samples: list[TransitionSample] = field(default_factory=list)
    not_dominated: list[tuple[Event, ...]] = field(default_factory=list)
    verdict: Verdict = Verdict.PASS


def explore_coupled(scenario: Scenario, partial: TrackedMachine, full: TrackedMachine, keep_samples: bool = True) -> CoupledReport:
    """Run both trackers over every run and check the partial M stays inside the full one."""
    if partial.base is not full.base:
        raise ModelError("coupled trackers must augment the same machine")
    machine = partial.base
    n = scenario.processes
    root = (machine.initial_config(n), partial.meta_init(n), full.meta_init(n), (scenario.max_ops_per_process,) * n)
    parents: dict = {root: None}
    depth = {root: 0}
    queue = deque([root])
    report = CoupledReport()
    samples: dict = {}
    while queue:
        node = queue.popleft()
        cfg, pm, fm, budgets = node
        report.states_visited += 1
        if len(parents) > scenario.max_states:
            report.verdict = Verdict.INCONCLUSIVE
            break
        if scenario.max_events is not None and depth[node] >= scenario.max_events:
            continue
        for ev, nxt_cfg, nb in moves(scenario, partial, State(cfg, pm, budgets)):
            if keep_samples:
                samples.setdefault((pm, cfg, ev, nxt_cfg), None)
            npm = partial.advance(pm, ev, cfg, nxt_cfg)
            nfm = full.advance(fm, ev, cfg, nxt_cfg)
            child = (nxt_cfg, npm, nfm, nb)
            if child in parents:
                continue
            parents[child] = (node, ev)
            depth[child] = depth[node] + 1
            if not npm <= nfm:
                events, cur = [], child
                while parents[cur] is not None:
                    cur, e = parents[cur]
                    events.append(e)
                report.not_dominated.append(tuple(reversed(events)))
                report.verdict = Verdict.FAIL
            queue.append(child)
    report.samples = [TransitionSample(*k) for k in samples]
    return report


def collect_samples(scenario: Scenario, tracked: TrackedMachine) -> list[TransitionSample]:
    """Every distinct (M, step) pair met while exploring ``tracked``."""
    found: dict = {}

    def record(state: State, ev: Event, nxt: State) -> None:
        found.setdefault((state.meta, state.config, ev, nxt.config), None)

    explore(scenario, tracked, check=lambda m, s: [], on_transition=record)
    return [TransitionSample(*k) for k in found]


def with_bound(scenario: Scenario, max_events: int | None) -> Scenario:
    return replace(scenario, max_events=max_events)


# -- cross-checks against the oracle -----------------------------------------


@dataclass
class LemmaSweep:
    runs_checked: int = 0
    behaviors: int = 0
    mismatches: list[tuple[tuple[Event, ...], Any]] = field(default_factory=list)
    verdict: Verdict = Verdict.PASS
    elapsed: float = 0.0


def lemma_sweep(scenario: Scenario, tracked: TrackedMachine, behavior_bound: int | None = None) -> LemmaSweep:
    """Compare the tracker's M with the oracle at the end of every bounded run.

    Runs are enumerated breadth-first and merged when they agree on the
    machine configuration, budgets, tracker M and behavior, since the
    oracle's answer and every continuation depend on nothing else.
    """
    bound = behavior_bound or scenario.oracle_bounds.get("behavior_length", DEFAULT_ORACLE_BOUNDS["behavior_length"])
    start = time.perf_counter()
    sem = AtomicSemantics(tracked.spec, scenario.processes)
    oracle_memo: dict[tuple[Action, ...], frozenset] = {(): frozenset(sem.to_atomic(c) for c in final_configs(sem, ()))}
    root = initial_state(scenario, tracked)
    rootkey = (root, ())
    parents: dict = {rootkey: None}
    depth = {rootkey: 0}
    queue = deque([rootkey])
    out = LemmaSweep()
    while queue:
        node = queue.popleft()
        state, beh = node
        out.runs_checked += 1
        if beh not in oracle_memo:
            prev = oracle_memo[beh[:-1]]
            cfgs = sem.after((sem.from_atomic(c) for c in prev), beh[-1])
            oracle_memo[beh] = frozenset(sem.to_atomic(c) for c in cfgs)
        result = compare(state.meta, oracle_memo[beh])
        if result.answer is not Answer.EQUAL:
            events, cur = [], node
            while parents[cur] is not None:
                cur, ev = parents[cur]
                events.append(ev)
            out.mismatches.append((tuple(reversed(events)), result.witness))
            out.verdict = Verdict.FAIL
            continue
        if scenario.max_events is not None and depth[node] >= scenario.max_events:
            continue
        if len(parents) > scenario.max_states:
            out.verdict = Verdict.INCONCLUSIVE
            break
        for ev, cfg, budgets in moves(scenario, tracked, state):
            nb = beh if ev.kind is EventKind.INTERNAL else beh + (ev.action(),)
            if len(nb) > bound:
                continue
            child = (advance(tracked, state, ev, cfg, budgets), nb)
            if child not in parents:
                parents[child] = (node, ev)
                depth[child] = depth[node] + 1
                queue.append(child)
    out.behaviors = len(oracle_memo)
    out.elapsed = time.perf_counter() - start
    return out


def tree_search(scenario: Scenario, machine: StepMachine | None = None, spec=None) -> TreeResult:
    """Prefix-preserving linearization search over the scenario's run tree."""
    if machine is None or spec is None:
        s = setup(scenario)
        machine, spec = machine or s.machine, spec or s.case.spec
    budget = scenario.oracle_bounds.get("tree_nodes", DEFAULT_ORACLE_BOUNDS["tree_nodes"])
    return strong_lin_tree_search(
        machine,
        spec,
        scenario.processes,
        (scenario.max_ops_per_process,) * scenario.processes,
        lambda cfg, bud: machine_moves(scenario, machine, spec, cfg, bud),
        max_events=scenario.max_events,
        node_budget=budget,
    )


@dataclass
class LabelingCheck:
    nodes: int = 0
    disagreements: list[tuple[Event, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.nodes > 0 and not self.disagreements


def check_labeling(scenario: Scenario, result: TreeResult, tracked: TrackedMachine) -> LabelingCheck:
    """Walk the run tree with ``tracked`` and check its M is a singleton inside the search's label.

    Each node is labeled with the configurations a prefix-preserving
    linearization may be committed to there; a strongly linearizable
    tracker must sit at exactly one of them.
    """
    if result.labeling is None:
        raise ModelError(f"tree search answered {result.answer.value}; there is no labeling to check")
    labeling = result.labeling
    root = initial_state(scenario, tracked)
    oracle_root = frozenset(labeling.sem.to_atomic(c) for c in labeling.sem.close([labeling.sem.initial()]))
    start = (root, oracle_root, 0)
    parents: dict = {start: None}
    queue = deque([start])
    out = LabelingCheck()
    while queue:
        node = queue.popleft()
        state, oracle_meta, depth = node
        out.nodes += 1
        good = labeling.choices(state.config, state.budgets, oracle_meta, depth)
        if len(state.meta) != 1 or not state.meta <= good:
            events, cur = [], node
            while parents[cur] is not None:
                cur, ev = parents[cur]
                events.append(ev)
            out.disagreements.append(tuple(reversed(events)))
            continue
        if scenario.max_events is not None and depth >= scenario.max_events:
            continue
        for ev, cfg, budgets in moves(scenario, tracked, state):
            if ev.kind is EventKind.INTERNAL:
                nxt_oracle = oracle_meta
            else:
                nxt_oracle = frozenset().union(*(labeling.step(c, ev) for c in oracle_meta))
            child = (advance(tracked, state, ev, cfg, budgets), nxt_oracle, depth + 1 if scenario.max_events is not None else 0)
            if child not in parents:
                parents[child] = (node, ev)
                queue.append(child)
    return out
