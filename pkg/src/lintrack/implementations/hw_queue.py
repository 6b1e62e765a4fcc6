"""The Herlihy-Wing queue as a step machine.

Shared state is a counter ``X`` (next free slot, starting at 1) and an
array ``Q`` of slots ``1..capacity``.  Enqueue reserves a slot with a
fetch-and-increment and then fills it; Dequeue snapshots ``X`` and sweeps
the slots below it with atomic swaps until one yields a value.

    1  Enqueue(v)    invoke
    2                i <- X; X <- X + 1
    3                Q[i] <- v
    4                return ack
    5  Dequeue()     invoke
    6                l <- X
    7                if l = 1 goto 6 else j <- 1
    8                x <- swap(Q[j], bot); if x != bot goto 9
                     elif j = l - 1 goto 6 else j <- j + 1, goto 8
    9                return x
"""

from __future__ import annotations

from ..model import ACK, BOT, Branch, Line, LineKind, ModelError, StepMachine, set_at
from ..seqtypes import DEQUEUE, ENQUEUE
from ..tracker import TrackedMachine, partial_tracker, subset_permutations

LOCALS = {"pc": 0, "op": BOT, "arg": BOT, "v": BOT, "i": BOT, "l": BOT, "j": BOT, "x": BOT}


def _enq_invoke(sh, lo, pid, arg):
    return [Branch(local={"pc": 2, "v": arg})]


def _reserve(capacity):
    def run(sh, lo, pid):
        i = sh["X"]
        if i > capacity:
            raise ModelError(f"queue capacity {capacity} exceeded")
        return [Branch(shared={"X": i + 1}, local={"pc": 3, "i": i})]

    return run


def _store(sh, lo, pid):
    return [Branch(shared={"Q": set_at(sh["Q"], lo["i"] - 1, lo["v"])}, local={"pc": 4})]


def _enq_return(sh, lo, pid):
    return [Branch(response=ACK)]


def _deq_invoke(sh, lo, pid, arg):
    return [Branch(local={"pc": 6})]


def _read_x(sh, lo, pid):
    return [Branch(local={"pc": 7, "l": sh["X"]})]


def _check_l(sh, lo, pid):
    if lo["l"] == 1:
        return [Branch(local={"pc": 6}, label="empty")]
    return [Branch(local={"pc": 8, "j": 1})]


def _swap(sh, lo, pid):
    j = lo["j"]
    x = sh["Q"][j - 1]
    cleared = {"Q": set_at(sh["Q"], j - 1, BOT)}
    if x is not BOT:
        return [Branch(shared=cleared, local={"pc": 9, "x": x}, label="hit")]
    if j == lo["l"] - 1:
        return [Branch(shared=cleared, local={"pc": 6}, label="rescan")]
    return [Branch(shared=cleared, local={"j": j + 1}, label="next")]


def _deq_return(sh, lo, pid):
    return [Branch(response=lo["x"])]


def hw_queue_lines(capacity: int) -> dict[int, Line]:
    inter = LineKind.INTERMEDIATE
    return {
        1: Line(1, LineKind.INVOCATION, _enq_invoke, ENQUEUE, "invoke Enqueue(v)"),
        2: Line(2, inter, _reserve(capacity), ENQUEUE, "i <- X; X <- X + 1"),
        3: Line(3, inter, _store, ENQUEUE, "Q[i] <- v"),
        4: Line(4, LineKind.RETURN, _enq_return, ENQUEUE, "return ack"),
        5: Line(5, LineKind.INVOCATION, _deq_invoke, DEQUEUE, "invoke Dequeue()"),
        6: Line(6, inter, _read_x, DEQUEUE, "l <- X"),
        7: Line(7, inter, _check_l, DEQUEUE, "if l = 1 goto 6 else j <- 1"),
        8: Line(8, inter, _swap, DEQUEUE, "x <- swap(Q[j], bot); branch"),
        9: Line(9, LineKind.RETURN, _deq_return, DEQUEUE, "return x"),
    }


def hw_queue_machine(capacity: int, lines: dict[int, Line] | None = None, name: str = "hw-queue") -> StepMachine:
    if capacity < 1:
        raise ModelError("queue capacity must be positive")
    return StepMachine(
        name=name,
        shared_init={"X": 1, "Q": (BOT,) * capacity},
        local_init=dict(LOCALS),
        lines=lines or hw_queue_lines(capacity),
        entry={ENQUEUE: 1, DEQUEUE: 5},
        description="Herlihy-Wing queue",
    )


# -- partial tracker ---------------------------------------------------------


def _enqueuers_after_reserve(ctx, c):
    m, post = ctx.machine, ctx.post
    ready = [
        p
        for p in range(len(post.locals))
        if m.pc(post, p) in (3, 4) and m.local(post, p)["op"] == ENQUEUE and c.f[p].pending
    ]
    return subset_permutations(ready)


def _dequeue_hit(ctx, c):
    if ctx.machine.local(ctx.post, ctx.pid)["x"] is not BOT:
        return [(ctx.pid,)]
    return [()]


HW_RULE_LINES = (2, 8)


def hw_queue_tracker(machine: StepMachine, spec) -> TrackedMachine:
    return partial_tracker(machine, spec, {2: _enqueuers_after_reserve, 8: _dequeue_hit}, name=f"{machine.name}/partial")


# -- mutants -----------------------------------------------------------------


def _swap_keep(sh, lo, pid):
    j = lo["j"]
    x = sh["Q"][j - 1]
    if x is not BOT:
        return [Branch(local={"pc": 9, "x": x}, label="hit")]
    if j == lo["l"] - 1:
        return [Branch(local={"pc": 6}, label="rescan")]
    return [Branch(local={"j": j + 1}, label="next")]


def _check_l_reverse(sh, lo, pid):
    if lo["l"] == 1:
        return [Branch(local={"pc": 6}, label="empty")]
    return [Branch(local={"pc": 8, "j": lo["l"] - 1})]


def _swap_reverse(sh, lo, pid):
    j = lo["j"]
    x = sh["Q"][j - 1]
    cleared = {"Q": set_at(sh["Q"], j - 1, BOT)}
    if x is not BOT:
        return [Branch(shared=cleared, local={"pc": 9, "x": x}, label="hit")]
    if j == 1:
        return [Branch(shared=cleared, local={"pc": 6}, label="rescan")]
    return [Branch(shared=cleared, local={"j": j - 1}, label="next")]


def hw_queue_mutants(capacity: int) -> dict[str, tuple[str, StepMachine]]:
    inter = LineKind.INTERMEDIATE

    def variant(bug: str, replaced: dict[int, Line]) -> StepMachine:
        lines = hw_queue_lines(capacity)
        lines.update(replaced)
        return hw_queue_machine(capacity, lines, name=f"hw-queue:mutant:{bug}")

    return {
        "dequeue-no-swap": (
            "line 8 reads Q[j] without clearing it, so two dequeues can take one value",
            variant("dequeue-no-swap", {8: Line(8, inter, _swap_keep, DEQUEUE, "x <- Q[j]")}),
        ),
        "dequeue-reverse-scan": (
            "dequeue sweeps slots from l - 1 down to 1, returning the newest value first",
            variant(
                "dequeue-reverse-scan",
                {
                    7: Line(7, inter, _check_l_reverse, DEQUEUE, "if l = 1 goto 6 else j <- l - 1"),
                    8: Line(8, inter, _swap_reverse, DEQUEUE, "x <- swap(Q[j], bot); j <- j - 1"),
                },
            ),
        ),
    }
