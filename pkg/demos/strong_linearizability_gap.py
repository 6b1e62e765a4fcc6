"""
Linearizable but not strongly linearizable
==========================================

Two enqueuers and one dequeuer on the Herlihy-Wing queue.  Every run has
a linearization, but no choice of linearizations can be extended
consistently as the run grows.
"""

from lintrack.explorer import Scenario, explore, setup, tree_search

scenario = Scenario(
    "hw-queue",
    processes=3,
    max_ops_per_process=1,
    roles=(("Enqueue",), ("Enqueue",), ("Dequeue",)),
    max_events=12,
    oracle_bounds={"tree_nodes": 2_000_000},
)

# the full tracker never empties: linearizable
print("linearizable:", explore(scenario, setup(scenario).tracked).verdict.value)

# the tree search finds a prefix no commitment survives
result = tree_search(scenario)
print("strongly linearizable:", result.answer.value, f"({result.nodes} nodes)")
for ev in result.witness:
    print(f"  p{ev.pid} line {ev.line} {ev.kind.value} {ev.op}")
