"""
A singleton tracker for concurrent union-find
=============================================

The union-find tracker commits each operation at a fixed step, so M holds
exactly one configuration in every reachable state.  The tree search
confirms this independently of any tracker.
"""

from lintrack.explorer import Scenario, check_labeling, check_strong, setup, tree_search

for tries in (1, 2):
    scenario = Scenario("jt-union-find", n=3, max_tries=tries, tracker="partial", mode="strong")
    tracked = setup(scenario).tracked

    # |M| = 1 everywhere
    report = check_strong(scenario, tracked)
    print(f"max_tries={tries}: |M| = 1 on {report.states_visited} states -> {report.verdict.value}")

    # prefix-preserving linearization search over the same run tree
    tree = tree_search(scenario)
    print(f"  tree search: {tree.answer.value} ({tree.nodes} nodes)")

    # the tracker's single configuration is always one the search allows
    agree = check_labeling(scenario, tree, tracked)
    print(f"  tracker inside the search's labels at {agree.nodes} nodes: {agree.ok}")
