"""Command-line front end.

Subcommands: ``check``, ``oracle-diff``, ``list`` and ``validate-tracker``.
Exit codes: 0 pass, 1 fail, 2 inconclusive, 64 usage or schema error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .explorer import (
    DEFAULT_ORACLE_BOUNDS,
    MODES,
    Counterexample,
    ExplorationReport,
    Scenario,
    Verdict,
    check_nonempty,
    check_singleton,
    check_strong,
    collect_samples,
    explore,
    explore_coupled,
    initial_state,
    lemma_sweep,
    random_walk,
    replay_state,
    setup,
    trace,
    tree_search,
)
from .implementations import build_case, case_names
from .model import BOT, Event, ModelError
from .oracle import Answer

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
EXIT_CODES = {Verdict.PASS: EXIT_PASS, Verdict.FAIL: EXIT_FAIL, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}
THREADS_ENV = "LINTRACK_THREADS"


class UsageError(Exception):
    """Bad arguments or an invalid scenario file (exit 64)."""


# -- scenario files ------------------------------------------------------------


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int_list(x) -> bool:
    return isinstance(x, list) and bool(x) and all(_is_int(v) for v in x)


def _roles(x) -> bool:
    return isinstance(x, list) and all(r is None or (isinstance(r, list) and all(isinstance(o, str) for o in r)) for r in x)


def _bounds(x) -> bool:
    return isinstance(x, dict) and all(k in DEFAULT_ORACLE_BOUNDS and _is_int(v) and v > 0 for k, v in x.items())


_FIELDS: dict[str, tuple[Any, str]] = {
    "case_study": (lambda x: isinstance(x, str), "a case-study name"),
    "mutant": (lambda x: x is None or isinstance(x, str), "a mutant name or null"),
    "processes": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "max_ops_per_process": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "max_events": (lambda x: x is None or (_is_int(x) and x >= 1), "an integer >= 1 or null"),
    "values": (_int_list, "a non-empty list of integers"),
    "mode": (lambda x: x in MODES, f"one of {', '.join(MODES)}"),
    "tracker": (lambda x: x in ("full", "partial"), "'full' or 'partial'"),
    "suite": (lambda x: x is None or isinstance(x, str), "a suite name or null"),
    "seed": (_is_int, "an integer"),
    "runs": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "oracle_bounds": (_bounds, f"an object with positive integer keys among {', '.join(DEFAULT_ORACLE_BOUNDS)}"),
    "n": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "m": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "max_tries": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
    "roles": (_roles, "a list with one entry (list of operation names or null) per process"),
    "max_states": (lambda x: _is_int(x) and x >= 1, "an integer >= 1"),
}
_REQUIRED = ("case_study",)
_PARTIAL_MODES = ("partial-lin", "strong", "invariants")


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, dict):
        raise UsageError("scenario: top level must be a JSON object")
    for key in data:
        if key not in _FIELDS:
            raise UsageError(f"scenario field {key!r}: unknown key")
    for key in _REQUIRED:
        if key not in data:
            raise UsageError(f"scenario field {key!r}: missing")
    for key, value in data.items():
        ok, expected = _FIELDS[key]
        if not ok(value):
            raise UsageError(f"scenario field {key!r}: expected {expected}, got {value!r}")
    if data["case_study"] not in case_names():
        raise UsageError(f"scenario field 'case_study': unknown case study {data['case_study']!r}")
    kw = dict(data)
    mode = kw.get("mode", "full-lin")
    kw.setdefault("tracker", "partial" if mode in _PARTIAL_MODES else "full")
    if "values" in kw:
        kw["values"] = tuple(kw["values"])
    if "roles" in kw:
        kw["roles"] = tuple(None if r is None else tuple(r) for r in kw["roles"])
    if "oracle_bounds" in kw:
        kw["oracle_bounds"] = {**DEFAULT_ORACLE_BOUNDS, **kw["oracle_bounds"]}
    try:
        scenario = Scenario(**kw)
        case = build_case(scenario.case_study, scenario.params())
    except ModelError as exc:
        raise UsageError(f"scenario: {exc}") from exc
    if scenario.mutant is not None and scenario.mutant not in case.mutants:
        raise UsageError(f"scenario field 'mutant': {case.name} has no mutant {scenario.mutant!r}")
    if scenario.tracker == "partial" and case.partial_factory is None:
        raise UsageError(f"scenario field 'tracker': {case.name} has no partial tracker")
    if scenario.mode == "invariants":
        from .invariants import get_suite, suite_names

        suite = scenario.suite or case.suite
        if suite not in suite_names() or get_suite(suite).case_study != case.name:
            raise UsageError(f"scenario field 'suite': no invariant suite {suite!r} for {case.name}")
        if scenario.tracker != "partial":
            raise UsageError("scenario field 'tracker': invariant suites run against the partial tracker")
    return scenario


def load_json(path: str, what: str) -> Any:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"{what} {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_scenario(path: str) -> Scenario:
    return scenario_from_dict(load_json(path, "scenario"))


def scenario_to_dict(s: Scenario) -> dict:
    out = {
        "case_study": s.case_study,
        "mutant": s.mutant,
        "processes": s.processes,
        "max_ops_per_process": s.max_ops_per_process,
        "max_events": s.max_events,
        "values": list(s.values),
        "mode": s.mode,
        "tracker": s.tracker,
        "suite": s.suite,
        "seed": s.seed,
        "runs": s.runs,
        "oracle_bounds": dict(s.oracle_bounds),
        "n": s.n,
        "m": s.m,
        "max_tries": s.max_tries,
        "max_states": s.max_states,
    }
    if s.roles is not None:
        out["roles"] = [None if r is None else list(r) for r in s.roles]
    return out


# -- reports -----------------------------------------------------------------


@dataclass
class Outcome:
    verdict: Verdict
    report: dict
    pretty: str = ""


def _cex_json(cex: Counterexample | None) -> list[dict] | None:
    if cex is None:
        return None
    return [step.to_json() for step in cex.steps]


def report_json(scenario: Scenario, result: ExplorationReport, command: str, **extra) -> dict:
    out = {
        "command": command,
        "scenario": scenario_to_dict(scenario),
        "verdict": result.verdict.value,
        "states_visited": result.states_visited,
        "transitions": result.transitions,
        "depth": result.depth,
        "bounds": result.bounds,
        "counterexample": _cex_json(result.counterexample),
        "violated_conjuncts": result.violated_conjuncts(),
        "timing": {"elapsed_s": round(result.elapsed, 6)},
    }
    if result.note:
        out["note"] = result.note
    out.update(extra)
    return out


def _fmt(value) -> str:
    if value is BOT:
        return "⊥"
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def render_trace(scenario: Scenario, cex: Counterexample | None) -> str:
    """Per-event line numbers, shared-state deltas and |M| sizes."""
    if cex is None:
        return ""
    s = setup(scenario)
    prev = s.machine.shared(initial_state(scenario, s.tracked).config)
    lines = [f"counterexample ({len(cex.events)} events, violated: {', '.join(cex.violated)})"]
    for i, st in enumerate(cex.steps, start=1):
        ev = st.event
        what = {"invoke": f"invoke {ev.op}({_fmt(ev.arg) if ev.arg is not BOT else ''})", "response": f"return {_fmt(ev.res)}"}
        desc = what.get(ev.kind.value, "step" + (f" [{ev.label}]" if ev.label else ""))
        now = s.machine.shared(st.config)
        delta = ", ".join(f"{k}: {_fmt(prev[k])} -> {_fmt(now[k])}" for k in now if now[k] != prev[k])
        lines.append(f"{i:4d}. p{ev.pid} L{ev.line:<3d} {desc:<28s} |M| {st.pre_size} -> {st.post_size}" + (f"   {delta}" if delta else ""))
        prev = now
    return "\n".join(lines)


def _check_for(scenario: Scenario):
    if scenario.mode == "strong":
        return check_singleton
    if scenario.mode == "invariants":
        from .invariants import StateView, get_suite

        s = setup(scenario)
        suite = get_suite(scenario.suite or s.case.suite)
        params, n = scenario.params(), scenario.processes
        return lambda machine, state: suite.failing(StateView(machine, state.config, state.meta, n, params))
    return check_nonempty


def run_check(scenario: Scenario) -> Outcome:
    s = setup(scenario)
    if scenario.mode == "invariants":
        from .invariants import get_suite, sweep

        suite = get_suite(scenario.suite or s.case.suite or "")
        swept = sweep(scenario, suite)
        verdict = Verdict(swept.verdict)
        events = next(iter(swept.failures.values()), None)
        cex = None
        if events is not None:
            cex = Counterexample(events, trace(s.tracked, scenario, events), sorted(swept.failures))
        result = ExplorationReport(
            verdict, states_visited=swept.states, transitions=swept.transitions, bounds=scenario.bounds(), elapsed=swept.elapsed
        )
        result.counterexample = cex
        result.violations = [(name, None, ev) for name, ev in swept.failures.items()]
        result.violations += [(name, None, ()) for name in swept.inductive_failures if name not in swept.failures]
        extra = {"suite": suite.name, "failing_states": swept.counts, "inductive_failures": swept.inductive_failures}
        return Outcome(verdict, report_json(scenario, result, "check", **extra), render_trace(scenario, cex))
    if scenario.mode == "random":
        result = random_walk(scenario, s.tracked)
    elif scenario.mode == "strong":
        result = check_strong(scenario, s.tracked)
    elif scenario.mode == "oracle-diff":
        return run_oracle_diff(scenario)
    else:
        result = explore(scenario, s.tracked, check=_check_for(scenario))
    return Outcome(result.verdict, report_json(scenario, result, "check"), render_trace(scenario, result.counterexample))


def run_replay(scenario: Scenario, recorded: Any) -> Outcome:
    """Re-execute a recorded counterexample without search."""
    if not isinstance(recorded, dict) or "counterexample" not in recorded:
        raise UsageError("replay: report has no 'counterexample' field")
    raw = recorded["counterexample"]
    if not raw:
        raise UsageError("replay: report has an empty counterexample")
    try:
        events = [Event.from_json(e) for e in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"replay: malformed event: {exc}") from exc
    s = setup(scenario)
    check = _check_for(scenario)
    try:
        steps = trace(s.tracked, scenario, events)
        state = replay_state(s.tracked, scenario, events)
    except ModelError as exc:
        raise UsageError(f"replay: {exc}") from exc
    bad = check(s.machine, state)
    result = ExplorationReport(Verdict.FAIL if bad else Verdict.PASS, states_visited=len(events) + 1, bounds=scenario.bounds())
    result.depth = len(events)
    if bad:
        result.counterexample = Counterexample(tuple(events), steps, bad)
        result.violations = [(name, hash(state), tuple(events)) for name in bad]
    return Outcome(result.verdict, report_json(scenario, result, "replay"), render_trace(scenario, result.counterexample))


def run_oracle_diff(scenario: Scenario, with_tree: bool = False) -> Outcome:
    """Compare the full tracker's M with the brute-force oracle on every bounded run."""
    s = setup(scenario)
    full = s.case.tracker("full", s.machine)
    sweep_ = lemma_sweep(scenario, full)
    mismatches = [
        {"events": [e.to_json() for e in events], "witness": repr(witness)} for events, witness in sweep_.mismatches
    ]
    verdict = sweep_.verdict
    extra: dict[str, Any] = {"behaviors": sweep_.behaviors, "mismatches": mismatches}
    if with_tree:
        res = tree_search(scenario)
        extra["tree_search"] = {"answer": res.answer.value, "nodes": res.nodes, "note": res.note}
        if res.answer is Answer.INCONCLUSIVE and verdict is Verdict.PASS:
            verdict = Verdict.INCONCLUSIVE
    result = ExplorationReport(verdict, states_visited=sweep_.runs_checked, bounds=scenario.bounds(), elapsed=sweep_.elapsed)
    result.violations = [("lemma: M differs from C(Linearizations)", None, ()) for _ in sweep_.mismatches]
    if sweep_.mismatches:
        events = sweep_.mismatches[0][0]
        result.counterexample = Counterexample(events, trace(full, scenario, events), ["lemma mismatch"])
    return Outcome(verdict, report_json(scenario, result, "oracle-diff", **extra), render_trace(scenario, result.counterexample))


def run_validate(scenario: Scenario) -> Outcome:
    """Check the partial tracker against the full operators at every reached step."""
    from .tracker import validate_partial

    s = setup(scenario)
    if s.case.partial_factory is None:
        raise UsageError(f"{s.case.name} has no partial tracker to validate")
    partial = s.case.tracker("partial", s.machine)
    full = s.case.tracker("full", s.machine)
    start = time.perf_counter()
    samples = collect_samples(scenario, partial)
    report = validate_partial(partial, s.case.spec, samples, nprocs=scenario.processes)
    coupled = explore_coupled(scenario, partial, full, keep_samples=False)
    bad = not report.ok or coupled.verdict is Verdict.FAIL
    verdict = Verdict.FAIL if bad else coupled.verdict
    result = ExplorationReport(
        verdict, states_visited=coupled.states_visited, bounds=scenario.bounds(), elapsed=time.perf_counter() - start
    )
    result.violations = [
        (f"line {v.line}: partial output not inside the full operator's", None, (v.event,) if v.event else ())
        for v in report.violations
    ]
    result.violations += [("partial M not inside full M", None, ev) for ev in coupled.not_dominated]
    if coupled.not_dominated:
        ev = coupled.not_dominated[0]
        result.counterexample = Counterexample(ev, trace(partial, scenario, ev), ["partial M not inside full M"])
    extra = {"samples_checked": report.checked, "not_dominated": len(coupled.not_dominated)}
    return Outcome(verdict, report_json(scenario, result, "validate-tracker", **extra), render_trace(scenario, result.counterexample))


# -- argument parsing ----------------------------------------------------------


def _threads(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lintrack", description="Bounded linearizability checking with trackers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("scenario", help="scenario JSON file ('-' for standard input)")
        p.add_argument("--out", help="write the JSON report here instead of standard output")
        p.add_argument("--pretty", action="store_true", help="also print a readable counterexample trace")
        p.add_argument(
            "--threads",
            type=_threads,
            default=None,
            help=f"worker cap (default: ${THREADS_ENV} or 1); exploration currently runs on one thread",
        )

    check = sub.add_parser("check", help="explore a scenario and report pass/fail")
    common(check)
    check.add_argument("--replay", metavar="REPORT", help="re-execute the counterexample recorded in REPORT")

    diff = sub.add_parser("oracle-diff", help="compare the full tracker with the brute-force oracle")
    common(diff)
    diff.add_argument("--tree", action="store_true", help="also run the strong-linearizability tree search")

    val = sub.add_parser("validate-tracker", help="check a partial tracker against the full tracker")
    common(val)

    ls = sub.add_parser("list", help="list case studies, mutants and invariant suites")
    ls.add_argument("--mutants", nargs="?", const="", metavar="CASE", help="list mutants (of CASE, or of every case)")
    ls.add_argument("--suites", action="store_true", help="list invariant suites")
    return parser


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        return _threads(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"${THREADS_ENV}: {exc}") from exc


def cmd_list(args, out) -> int:
    from .invariants import get_suite, suite_names

    if args.suites:
        for name in suite_names():
            suite = get_suite(name)
            print(f"{name}\t{suite.case_study}\t{len(suite.active())} conjuncts", file=out)
        return EXIT_PASS
    if args.mutants is not None:
        cases = [args.mutants] if args.mutants else case_names()
        for name in cases:
            if name not in case_names():
                raise UsageError(f"unknown case study {name!r}")
            for bug, mutant in build_case(name).mutants.items():
                print(f"{name}:mutant:{bug}\t{mutant.description}", file=out)
        return EXIT_PASS
    for name in case_names():
        case = build_case(name)
        extras = [f"{len(case.mutants)} mutants"] if case.mutants else []
        if case.suite:
            extras.append(f"suite {case.suite}")
        print(name + ("\t" + ", ".join(extras) if extras else ""), file=out)
    return EXIT_PASS


def _emit(outcome: Outcome, args, out) -> int:
    text = json.dumps(outcome.report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text, file=out)
    if args.pretty and outcome.pretty:
        print(outcome.pretty, file=sys.stderr if not args.out else out)
    return EXIT_CODES[outcome.verdict]


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            return cmd_list(args, out)
        args.threads = _resolve_threads(args)
        scenario = load_scenario(args.scenario)
        if args.command == "check":
            if args.replay:
                outcome = run_replay(scenario, load_json(args.replay, "report"))
            else:
                outcome = run_check(scenario)
        elif args.command == "oracle-diff":
            outcome = run_oracle_diff(scenario, with_tree=args.tree)
        else:
            outcome = run_validate(scenario)
        return _emit(outcome, args, out)
    except UsageError as exc:
        print(f"lintrack: {exc}", file=sys.stderr)
        return EXIT_USAGE
