"""The atomic implementation of an arbitrary sequential type.

Line 0 is the shared invocation line, line 1 applies the transition
function to a single shared cell holding the object state, and line 2
returns what line 1 computed.  Where the transition function is undefined,
line 1 leaves everything unchanged and the process retries.
"""

from __future__ import annotations

from .model import NOT_ENABLED, Branch, Line, LineKind, ProcessStatus, SequentialSpec, StepMachine

INVOKE_LINE, APPLY_LINE, RETURN_LINE = 0, 1, 2


def atomic_machine(spec: SequentialSpec, name: str | None = None) -> StepMachine:
    def invoke(sh, lo, pid, arg):
        return [Branch(local={"pc": APPLY_LINE})]

    def apply(sh, lo, pid):
        out = spec.apply(sh["sigma"], pid, lo["op"], lo["arg"])
        if out is NOT_ENABLED:
            return [Branch(label="wait")]
        sigma, res = out
        return [Branch(shared={"sigma": sigma}, local={"pc": RETURN_LINE, "r": res})]

    def ret(sh, lo, pid):
        return [Branch(response=lo["r"])]

    lines = {
        INVOKE_LINE: Line(INVOKE_LINE, LineKind.INVOCATION, invoke, None, "invoke op(arg)"),
        APPLY_LINE: Line(APPLY_LINE, LineKind.INTERMEDIATE, apply, None, "sigma, r <- delta(sigma, op, arg)"),
        RETURN_LINE: Line(RETURN_LINE, LineKind.RETURN, ret, None, "return r"),
    }
    return StepMachine(
        name=name or f"atomic-{spec.name}",
        shared_init={"sigma": spec.initial},
        local_init={"pc": 0, "op": None, "arg": None, "r": None},
        lines=lines,
        entry={op: INVOKE_LINE for op in spec.operations},
        description=f"atomic {spec.name}",
    )


def status_of(machine: StepMachine, config, pid: int):
    """Read a process's (op, arg, res) status off an atomic-machine configuration."""
    lo = machine.local(config, pid)
    if lo["pc"] == INVOKE_LINE:
        return ProcessStatus()
    if lo["pc"] == APPLY_LINE:
        return ProcessStatus(lo["op"], lo["arg"], None)
    return ProcessStatus(lo["op"], lo["arg"], lo["r"])
