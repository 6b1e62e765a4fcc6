"""Acceptance criteria, each at its stated tolerance.

Every test logs one ``criterion N: PASS|FAIL (...)`` line; the lines are
repeated in the terminal summary.  Run ``python tests/test_acceptance.py``
to execute only this file.
"""

from __future__ import annotations

import time
from dataclasses import replace

import pytest
from _support import record
from hypothesis import settings

from lintrack.explorer import (
    Scenario,
    Verdict,
    check_labeling,
    check_strong,
    collect_samples,
    explore,
    explore_coupled,
    lemma_sweep,
    replay_state,
    setup,
    tree_search,
    with_bound,
)
from lintrack.implementations import mutant_names
from lintrack.invariants import get_suite, sweep
from lintrack.oracle import Answer
from lintrack.tracker import validate_partial

SNAPSHOT_ROLES = (("Write",), ("Scan",))
MINUTE = 60.0

LINEARIZABILITY = {
    "hw-queue/full": Scenario("hw-queue"),
    "hw-queue/partial": Scenario("hw-queue", tracker="partial", mode="partial-lin"),
    "jayanti-snapshot/partial": Scenario("jayanti-snapshot", tracker="partial", mode="partial-lin", roles=SNAPSHOT_ROLES),
    "atomic-queue": Scenario("atomic-queue"),
    "atomic-union-find": Scenario("atomic-union-find"),
    "atomic-snapshot": Scenario("atomic-snapshot"),
}

STRONG = {
    t: Scenario(
        "jt-union-find",
        n=3,
        max_tries=t,
        tracker="partial",
        mode="strong",
        oracle_bounds={"tree_nodes": 5_000_000, "behavior_length": 12},
    )
    for t in (1, 2)
}


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


# 1 -------------------------------------------------------------------------


@pytest.mark.parametrize("case", ["atomic-queue", "hw-queue"])
def test_criterion_1_lemma_equality(case):
    scenario = Scenario(case, processes=2, max_ops_per_process=2, values=(1, 2))
    sweep_, elapsed = _timed(lambda: lemma_sweep(scenario, setup(scenario).tracked, behavior_bound=10))
    ok = sweep_.verdict is Verdict.PASS and not sweep_.mismatches and elapsed < 5 * MINUTE
    record(
        f"1 [{case}]",
        ok,
        f"{sweep_.runs_checked} runs, {sweep_.behaviors} behaviors, {len(sweep_.mismatches)} mismatches, {elapsed:.1f}s",
    )
    assert ok


# 2 -------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(LINEARIZABILITY))
def test_criterion_2_linearizability(name):
    scenario = LINEARIZABILITY[name]
    report, elapsed = _timed(lambda: explore(scenario, setup(scenario).tracked))
    ok = report.verdict is Verdict.PASS and not report.violations and elapsed < 10 * MINUTE
    record(f"2 [{name}]", ok, f"{report.states_visited} states, {len(report.violations)} violations, {elapsed:.1f}s")
    assert ok


# 3 -------------------------------------------------------------------------


@pytest.mark.parametrize("tries", [1, 2])
def test_criterion_3_strong_linearizability(tries):
    scenario = STRONG[tries]
    tracked = setup(scenario).tracked
    start = time.perf_counter()
    strong = check_strong(scenario, tracked)
    tree = tree_search(scenario)
    labels = check_labeling(scenario, tree, tracked) if tree.labeling is not None else None
    elapsed = time.perf_counter() - start
    ok = (
        strong.verdict is Verdict.PASS
        and tree.answer is Answer.YES
        and labels is not None
        and labels.ok
        and elapsed < 10 * MINUTE
    )
    record(
        f"3 [max_tries={tries}]",
        ok,
        f"|M| = 1 on {strong.states_visited} states; tree {tree.answer.value} in {tree.nodes} nodes; "
        f"labeling agrees at {labels.nodes if labels else 0} nodes; {elapsed:.1f}s",
    )
    assert ok


# 4 -------------------------------------------------------------------------

VALIDITY = {
    "hw-queue": LINEARIZABILITY["hw-queue/partial"],
    "jayanti-snapshot": LINEARIZABILITY["jayanti-snapshot/partial"],
    "jt-union-find/1": STRONG[1],
    "jt-union-find/2": STRONG[2],
}


@pytest.mark.parametrize("name", list(VALIDITY))
def test_criterion_4_partial_tracker_validity(name):
    scenario = VALIDITY[name]
    s = setup(scenario)
    full = s.case.tracker("full", s.machine)
    samples = collect_samples(scenario, s.tracked)
    report = validate_partial(s.tracked, s.case.spec, samples, nprocs=scenario.processes)
    coupled = explore_coupled(scenario, s.tracked, full, keep_samples=False)
    ok = report.ok and coupled.verdict is Verdict.PASS and not coupled.not_dominated
    record(
        f"4 [{name}]",
        ok,
        f"{report.checked} updates checked, {len(report.violations)} violations; "
        f"coupled replay over {coupled.states_visited} states, {len(coupled.not_dominated)} not dominated",
    )
    assert ok


# 5 -------------------------------------------------------------------------


def _mutant_scenario(name: str) -> Scenario:
    case, _, bug = name.split(":")
    if case == "jt-union-find":
        return Scenario(case, mutant=bug, tracker="partial", mode="strong", max_tries=1)
    roles = SNAPSHOT_ROLES if case == "jayanti-snapshot" else None
    return Scenario(case, mutant=bug, tracker="partial", mode="partial-lin", roles=roles)


@pytest.mark.parametrize("name", mutant_names(["hw-queue", "jt-union-find", "jayanti-snapshot"]))
def test_criterion_5_counterexamples(name):
    scenario = _mutant_scenario(name)
    tracked = setup(scenario).tracked
    run = (lambda sc: check_strong(sc, tracked)) if scenario.mode == "strong" else (lambda sc: explore(sc, tracked))
    bad = (lambda st: len(st.meta) != 1) if scenario.mode == "strong" else (lambda st: not st.meta)
    report = run(scenario)
    cex = report.counterexample
    failed = report.verdict is Verdict.FAIL and cex is not None
    replays = failed and all(bad(replay_state(tracked, scenario, cex.events)) for _ in range(3))
    minimal = failed and run(with_bound(scenario, len(cex) - 1)).verdict is Verdict.PASS
    ok = failed and replays and minimal
    record(
        f"5 [{name}]",
        ok,
        f"{'FAIL' if failed else report.verdict.value} found, {len(cex) if cex else 0} events, "
        f"replay {'reproduces' if replays else 'differs'}, "
        f"{'no shorter violation' if minimal else 'not minimal'}",
    )
    assert ok


# 6 -------------------------------------------------------------------------

SUITES = {
    "hw-queue-inv": replace(LINEARIZABILITY["hw-queue/partial"], mode="invariants", suite="hw-queue-inv"),
    "uf-inv/max_tries=1": replace(STRONG[1], mode="invariants", suite="uf-inv"),
    "uf-inv/max_tries=2": replace(STRONG[2], mode="invariants", suite="uf-inv"),
    "snapshot-inv": replace(LINEARIZABILITY["jayanti-snapshot/partial"], mode="invariants", suite="snapshot-inv"),
}


@pytest.mark.parametrize("name", list(SUITES))
def test_criterion_6_invariant_suites(name):
    scenario = SUITES[name]
    suite = get_suite(scenario.suite)
    report = sweep(scenario, suite)
    key = {"hw-queue-inv": "I_b", "snapshot-inv": "I_return"}.get(scenario.suite, "I_S")
    ok = report.ok and not report.inductive_failures and suite[key].enabled
    record(
        f"6 [{name}]",
        ok,
        f"{len(suite.active())} conjuncts incl. {key} on {report.states} states / {report.transitions} transitions; "
        f"failing {sorted(report.failures) or 'none'}; inductive failures {sum(report.inductive_failures.values())}",
    )
    assert ok


# 7 -------------------------------------------------------------------------


def _properties():
    import test_explorer
    import test_oracle
    import test_seqtypes
    import test_tracker

    return {
        "evolve extensive/idempotent": test_tracker.test_evolve_is_extensive_and_idempotent,
        "evolve monotone": test_tracker.test_evolve_is_monotone_and_distributes,
        "evolve_inv monotone": test_tracker.test_evolve_inv_is_monotone,
        "evolve_ret monotone": test_tracker.test_evolve_ret_is_monotone,
        "behavior preservation": test_explorer.test_augmentation_preserves_behavior,
        "FIFO law": test_seqtypes.test_queue_is_fifo,
        "union-find monotone": test_seqtypes.test_union_find_partitions_only_coarsen,
        "scan pure read": test_seqtypes.test_snapshot_scan_is_a_pure_read,
        "replay determinism": test_explorer.test_replay_is_deterministic,
        "oracle cross-consistency": test_oracle.test_linearizable_iff_some_linearization,
    }


@pytest.mark.parametrize("name", list(_properties()))
def test_criterion_7_property_suites(name):
    prop = _properties()[name]
    assert hasattr(prop, "hypothesis"), "not a property test"
    max_examples, derandomized = settings.default.max_examples, settings.default.derandomize
    try:
        prop()
        passed = True
    except Exception as exc:  # noqa: BLE001
        passed, error = False, exc
    ok = passed and max_examples >= 1000 and derandomized
    record(f"7 [{name}]", ok, f"{max_examples} examples, fixed seed" + ("" if passed else f", {error!r}"))
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
