"""Jayanti's single-writer single-scanner snapshot as a step machine.

Shared state: the main array ``A``, a forwarding array ``B`` (cleared to
bot by each scan) and a flag ``X`` raised while a scan is collecting.

    1  Write(i, v)   invoke
    2                A[i] <- v
    3                if X goto 4 else goto 5
    4                B[i] <- v
    5                return ack
    6  Scan()        invoke
    7                X <- true; j <- 0
    8                B[j] <- bot; j <- j + 1 (loop over all components)
    9                a[j] <- A[j]; j <- j + 1 (loop)
    10               X <- false
    11               if B[j] != bot then a[j] <- B[j]; j <- j + 1 (loop)
    12               return a
"""

from __future__ import annotations

from ..model import ACK, BOT, Branch, Line, LineKind, ModelError, StepMachine, set_at
from ..seqtypes import SCAN, SNAPSHOT_INITIAL, WRITE
from ..tracker import TrackedMachine, partial_tracker

SCANNER_PCS = frozenset(range(7, 13))
LOCALS = {"pc": 0, "op": BOT, "arg": BOT, "i": BOT, "v": BOT, "j": BOT, "a": BOT}


def _loop(m: int, lo, after: int, **extra):
    j = lo["j"]
    if j + 1 < m:
        return {"j": j + 1, **extra}
    return {"pc": after, "j": 0, **extra}


def snapshot_lines(m: int) -> dict[int, Line]:
    def write_invoke(sh, lo, pid, arg):
        i, v = arg
        return [Branch(local={"pc": 2, "i": i, "v": v})]

    def write_main(sh, lo, pid):
        return [Branch(shared={"A": set_at(sh["A"], lo["i"], lo["v"])}, local={"pc": 3})]

    def read_flag(sh, lo, pid):
        return [Branch(local={"pc": 4 if sh["X"] else 5}, label="forward" if sh["X"] else "skip")]

    def forward(sh, lo, pid):
        return [Branch(shared={"B": set_at(sh["B"], lo["i"], lo["v"])}, local={"pc": 5})]

    def write_return(sh, lo, pid):
        return [Branch(response=ACK)]

    def scan_invoke(sh, lo, pid, arg):
        return [Branch(local={"pc": 7, "a": (BOT,) * m})]

    def raise_flag(sh, lo, pid):
        return [Branch(shared={"X": True}, local={"pc": 8, "j": 0})]

    def clear(sh, lo, pid):
        return [Branch(shared={"B": set_at(sh["B"], lo["j"], BOT)}, local=_loop(m, lo, 9))]

    def collect(sh, lo, pid):
        a = set_at(lo["a"], lo["j"], sh["A"][lo["j"]])
        return [Branch(local=_loop(m, lo, 10, a=a))]

    def lower_flag(sh, lo, pid):
        return [Branch(shared={"X": False}, local={"pc": 11, "j": 0})]

    def patch(sh, lo, pid):
        b = sh["B"][lo["j"]]
        a = lo["a"] if b is BOT else set_at(lo["a"], lo["j"], b)
        return [Branch(local=_loop(m, lo, 12, a=a))]

    def scan_return(sh, lo, pid):
        return [Branch(response=tuple(lo["a"]))]

    inter = LineKind.INTERMEDIATE
    return {
        1: Line(1, LineKind.INVOCATION, write_invoke, WRITE, "invoke Write(i, v)"),
        2: Line(2, inter, write_main, WRITE, "A[i] <- v"),
        3: Line(3, inter, read_flag, WRITE, "if X goto 4 else goto 5"),
        4: Line(4, inter, forward, WRITE, "B[i] <- v"),
        5: Line(5, LineKind.RETURN, write_return, WRITE, "return ack"),
        6: Line(6, LineKind.INVOCATION, scan_invoke, SCAN, "invoke Scan()"),
        7: Line(7, inter, raise_flag, SCAN, "X <- true"),
        8: Line(8, inter, clear, SCAN, "B[j] <- bot"),
        9: Line(9, inter, collect, SCAN, "a[j] <- A[j]"),
        10: Line(10, inter, lower_flag, SCAN, "X <- false"),
        11: Line(11, inter, patch, SCAN, "if B[j] != bot then a[j] <- B[j]"),
        12: Line(12, LineKind.RETURN, scan_return, SCAN, "return a"),
    }


def snapshot_machine(m: int, lines: dict[int, Line] | None = None, name: str = "jayanti-snapshot") -> StepMachine:
    if m < 1:
        raise ModelError("a snapshot needs at least one component")
    return StepMachine(
        name=name,
        shared_init={"A": (SNAPSHOT_INITIAL,) * m, "B": (BOT,) * m, "X": False},
        local_init=dict(LOCALS),
        lines=lines or snapshot_lines(m),
        entry={WRITE: 1, SCAN: 6},
        description=f"Jayanti single-writer single-scanner snapshot, m={m}",
    )


# -- partial tracker ---------------------------------------------------------


def _scanner(machine, config, exclude=None):
    for p in range(len(config.locals)):
        if p != exclude and machine.pc(config, p) in SCANNER_PCS:
            return p
    return None


def _write_main(ctx, c):
    """Linearize the write now, or also keep the option of deferring it.

    Deferring is offered only when the scanner could still return the
    component's previous value: it already collected it, or a forwarded
    value in B may override the collect.
    """
    m, post = ctx.machine, ctx.post
    s = _scanner(m, post, exclude=ctx.pid)
    if s is not None:
        pc_s, j_s = m.pc(post, s), m.local(post, s)["j"]
        i = m.local(post, ctx.pid)["i"]
        forwarded = m.shared(post)["B"][i] is not BOT
        if (
            pc_s == 10
            or (pc_s == 9 and (forwarded or i < j_s))
            or (pc_s == 8 and forwarded and i < j_s)
        ):
            return [(), (ctx.pid,)]
    return [(ctx.pid,)]


def _scan_commit(ctx, c):
    """The scan takes effect, followed by every write already stored in A."""
    m, post = ctx.machine, ctx.post
    writes = tuple(
        p
        for p in range(len(post.locals))
        if c.f[p].pending and c.f[p].op == WRITE and m.pc(post, p) in (3, 4, 5)
    )
    return [(ctx.pid,) + writes]


SNAPSHOT_RULE_LINES = (2, 10)


def snapshot_tracker(machine: StepMachine, spec) -> TrackedMachine:
    return partial_tracker(machine, spec, {2: _write_main, 10: _scan_commit}, name=f"{machine.name}/partial")


# -- mutants -----------------------------------------------------------------


def snapshot_mutants(m: int) -> dict[str, tuple[str, StepMachine]]:
    inter = LineKind.INTERMEDIATE

    def skip_patch(sh, lo, pid):
        return [Branch(local=_loop(m, lo, 12))]

    def never_forward(sh, lo, pid):
        return [Branch(local={"pc": 5}, label="skip")]

    def keep_b(sh, lo, pid):
        return [Branch(local=_loop(m, lo, 9))]

    def variant(bug: str, replaced: dict[int, Line]) -> StepMachine:
        lines = snapshot_lines(m)
        lines.update(replaced)
        return snapshot_machine(m, lines, name=f"jayanti-snapshot:mutant:{bug}")

    return {
        "scan-skips-B-overwrite": (
            "line 11 ignores forwarded values and returns the raw collect",
            variant("scan-skips-B-overwrite", {11: Line(11, inter, skip_patch, SCAN, "j <- j + 1")}),
        ),
        "write-no-forward": (
            "writers never forward into B, even while a scan is collecting",
            variant("write-no-forward", {3: Line(3, inter, never_forward, WRITE, "goto 5")}),
        ),
        "scan-no-clear": (
            "line 8 leaves stale forwarded values in B from an earlier scan",
            variant("scan-no-clear", {8: Line(8, inter, keep_b, SCAN, "j <- j + 1")}),
        ),
    }
