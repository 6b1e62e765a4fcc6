"""Sequential specifications: queue, union-find and snapshot.

Every transition function takes ``(state, pid, op, arg)``; the process id
is accepted for signature fidelity and ignored by all three types.
"""

from __future__ import annotations

from collections.abc import Iterable

from .model import ACK, BOT, NOT_ENABLED, ModelError, SequentialSpec

ENQUEUE, DEQUEUE = "Enqueue", "Dequeue"
FIND, UNITE = "Find", "Unite"
WRITE, SCAN = "Write", "Scan"


# -- queue -------------------------------------------------------------------


def queue_delta(state: tuple, pid: int, op: str, arg):
    if op == ENQUEUE:
        return state + (arg,), ACK
    if op == DEQUEUE:
        if not state:
            return NOT_ENABLED
        return state[1:], state[0]
    raise ModelError(f"queue has no operation {op!r}")


def queue_spec(values: Iterable[int] = (1, 2)) -> SequentialSpec:
    values = tuple(values)
    if not values or any(not isinstance(v, int) or v < 1 for v in values):
        raise ModelError("queue values must be positive integers")
    return SequentialSpec(
        name="queue",
        initial=(),
        arguments={ENQUEUE: values, DEQUEUE: (BOT,)},
        delta=queue_delta,
        contains=lambda s: isinstance(s, tuple) and all(v in values for v in s),
    )


# -- union-find --------------------------------------------------------------
#
# A partition of [n] is stored as the tuple canon with canon[x - 1] the
# maximum element of x's part.  Equal partitions have equal tuples.


def singletons(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def canon_of(state: tuple[int, ...], x: int) -> int:
    if not 1 <= x <= len(state):
        raise ModelError(f"element {x} outside [1, {len(state)}]")
    return state[x - 1]


def is_partition(state) -> bool:
    if not isinstance(state, tuple):
        return False
    n = len(state)
    for x, c in enumerate(state, start=1):
        if not (isinstance(c, int) and x <= c <= n and state[c - 1] == c):
            return False
    return all(c == max(y for y in range(1, n + 1) if state[y - 1] == c) for c in set(state))


def parts(state: tuple[int, ...]) -> list[frozenset[int]]:
    groups: dict[int, set[int]] = {}
    for x, c in enumerate(state, start=1):
        groups.setdefault(c, set()).add(x)
    return [frozenset(g) for _, g in sorted(groups.items())]


def uf_delta(state: tuple[int, ...], pid: int, op: str, arg):
    if op == FIND:
        return state, canon_of(state, arg)
    if op == UNITE:
        x, y = arg
        cx, cy = canon_of(state, x), canon_of(state, y)
        if cx == cy:
            return state, ACK
        lo, hi = min(cx, cy), max(cx, cy)
        return tuple(hi if c == lo else c for c in state), ACK
    raise ModelError(f"union-find has no operation {op!r}")


def uf_spec(n: int = 3) -> SequentialSpec:
    if n < 1:
        raise ModelError("union-find needs at least one element")
    elems = singletons(n)
    return SequentialSpec(
        name="union-find",
        initial=elems,
        arguments={FIND: elems, UNITE: tuple((x, y) for x in elems for y in elems)},
        delta=uf_delta,
        contains=lambda s: is_partition(s) and len(s) == n,
    )


# -- single-writer single-scanner snapshot -----------------------------------

SNAPSHOT_INITIAL = 0
"""Component value before any write."""


def snapshot_delta(state: tuple, pid: int, op: str, arg):
    if op == WRITE:
        i, v = arg
        if not 0 <= i < len(state):
            raise ModelError(f"component {i} outside [0, {len(state)})")
        return state[:i] + (v,) + state[i + 1:], ACK
    if op == SCAN:
        return state, tuple(state)
    raise ModelError(f"snapshot has no operation {op!r}")


def snapshot_spec(m: int = 2, values: Iterable[int] = (1, 2)) -> SequentialSpec:
    values = tuple(values)
    if m < 1:
        raise ModelError("a snapshot needs at least one component")
    domain = set(values) | {SNAPSHOT_INITIAL}
    return SequentialSpec(
        name="snapshot",
        initial=(SNAPSHOT_INITIAL,) * m,
        arguments={WRITE: tuple((i, v) for i in range(m) for v in values), SCAN: (BOT,)},
        delta=snapshot_delta,
        contains=lambda s: isinstance(s, tuple) and len(s) == m and all(v in domain for v in s),
    )
