"""
Invariant sweep for the single-scanner snapshot
===============================================

Evaluate every conjunct of the snapshot suite at every reachable state,
with one writer and one scanner.
"""

from lintrack.explorer import Scenario, initial_state, setup
from lintrack.invariants import StateView, get_suite, sweep
from lintrack.invariants.snapshot import scan_return_set

scenario = Scenario(
    "jayanti-snapshot",
    roles=(("Write",), ("Scan",)),
    tracker="partial",
    mode="invariants",
    suite="snapshot-inv",
)
suite = get_suite("snapshot-inv")

# before anything runs, a scan can only return the initial array
s = setup(scenario)
state = initial_state(scenario, s.tracked)
print("initial ScanReturnSet:", scan_return_set(StateView(s.machine, state.config, state.meta, 2, scenario.params())))

# enabled conjuncts hold everywhere and are preserved by every transition
report = sweep(scenario, suite)
print(f"{len(suite.active())} conjuncts, {report.states} states, verdict {report.verdict}")

# the disabled variants are kept for reference; here is where they break
loose = sweep(scenario, suite, include_disabled=True)
for name, events in loose.failures.items():
    print(f"  disabled {name}: first fails after {len(events)} events ({suite[name].note})")
