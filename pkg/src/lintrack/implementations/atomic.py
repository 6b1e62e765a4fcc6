"""Partial tracker for the atomic implementation."""

from __future__ import annotations

from ..atomic import APPLY_LINE, INVOKE_LINE, RETURN_LINE, atomic_machine
from ..model import SequentialSpec, StepMachine
from ..tracker import TrackedMachine, partial_tracker

__all__ = ["APPLY_LINE", "INVOKE_LINE", "RETURN_LINE", "atomic_machine", "atomic_tracker"]


def _at_apply(ctx, c):
    if ctx.event.label == "wait":
        return [()]
    return [(ctx.pid,)]


def atomic_tracker(machine: StepMachine, spec: SequentialSpec) -> TrackedMachine:
    """Linearize each operation exactly when line 1 takes effect."""
    return partial_tracker(machine, spec, {APPLY_LINE: _at_apply}, name=f"{machine.name}/partial")
