"""
Tracking the Herlihy-Wing queue
===============================

Explore every bounded run of the queue with two trackers, then watch a
seeded bug empty the meta-configuration.
"""

from lintrack.explorer import Scenario, check_strong, explore, setup
from lintrack.cli import render_trace

# two processes, two operations each, values {1, 2}
full = Scenario("hw-queue")
partial = Scenario("hw-queue", tracker="partial")

# M never empties under either tracker, so every run is linearizable
for scenario in (full, partial):
    report = explore(scenario, setup(scenario).tracked)
    print(f"{scenario.tracker:8s} tracker: {report.verdict.value} over {report.states_visited} states")

# the full tracker keeps several candidate configurations at once
strong = check_strong(full, setup(full).tracked)
last = strong.counterexample.steps[-1]
print(f"full tracker reaches |M| = {last.post_size} after {len(strong.counterexample)} events")

# a dequeue that forgets to swap the slot out can return a value twice
buggy = Scenario("hw-queue", tracker="partial", mutant="dequeue-no-swap")
report = explore(buggy, setup(buggy).tracked)
print(render_trace(buggy, report.counterexample))
