"""Invariant conjuncts for Jayanti's snapshot and its two-line partial tracker.

The central object is the per-component set of values a scan may still
return, :func:`snapshot_kth_return_set`.  Before the scanner lowers the flag
(pc <= 10) the relevant field of a tracked configuration is its abstract
array ``sigma``; afterwards it is the scan's recorded response.  The enabled
conjunct asks that every combination in the product set be present in M,
so that whichever value the scan ends up returning is still tracked.
"""

from __future__ import annotations

from itertools import product

from ..implementations.snapshot import SCANNER_PCS
from ..model import ACK, BOT, IDLE
from ..seqtypes import SCAN, SNAPSHOT_INITIAL, WRITE
from . import Conjunct, ContractError, PredicateSuite, StateView

WRITER_PCS = frozenset({2, 3, 4, 5})
PCS = frozenset({IDLE}) | WRITER_PCS | SCANNER_PCS


def _m(view: StateView) -> int:
    return len(view.shared["A"])


def _domain(view: StateView) -> frozenset:
    vals = view.params.values if view.params is not None else (1, 2)
    return frozenset(vals) | {SNAPSHOT_INITIAL}


def scanner(view: StateView):
    found = [p for p in view.procs if view.pc(p) in SCANNER_PCS]
    if len(found) > 1:
        raise ContractError(f"more than one scanner: {found}")
    return found[0] if found else None


def writer_at_forward(view: StateView, k: int) -> bool:
    """Some writer is about to forward into B[k]."""
    return any(view.pc(p) == 4 and view.local(p)["i"] == k for p in view.procs)


def snapshot_kth_return_set(view: StateView, k: int) -> frozenset:
    if not 0 <= k < _m(view):
        raise ContractError(f"component {k} outside [0, {_m(view)})")
    A, B = view.shared["A"], view.shared["B"]
    s = scanner(view)
    if s is None or view.pc(s) == 7:
        return frozenset({A[k]})
    pc, lo = view.pc(s), view.local(s)
    j, a = lo["j"], lo["a"]
    if pc == 8:
        return frozenset({A[k], B[k]}) if k < j and B[k] is not BOT else frozenset({A[k]})
    if pc == 9:
        if B[k] is not BOT:
            return frozenset({A[k], B[k]})
        # the middle case is read with B[k] = bot: the collected value may stand
        if k < j:
            return frozenset({A[k], a[k]})
        return frozenset({A[k]})
    if pc == 10:
        return frozenset({A[k], B[k]}) if B[k] is not BOT else frozenset({A[k], a[k]})
    if pc == 11:
        if k >= j:
            wb = writer_at_forward(view, k)
            if wb and B[k] is not BOT:
                return frozenset({A[k], B[k]})
            if wb:
                return frozenset({A[k], a[k]})
            if B[k] is not BOT:
                return frozenset({B[k]})
        return frozenset({a[k]})
    return frozenset({a[k]})


def scan_return_set(view: StateView) -> set[tuple]:
    return set(product(*(sorted(snapshot_kth_return_set(view, k), key=repr) for k in range(_m(view)))))


def _scan_relevant(view: StateView, c):
    """sigma before the scan lowers the flag, the scan's response after."""
    s = scanner(view)
    if s is not None and view.pc(s) in (11, 12):
        return c.f[s].res
    return c.sigma


def _I_return_all(view):
    allowed = scan_return_set(view)
    return all(_scan_relevant(view, c) in allowed for c in view.meta)


def _I_return_cover(view):
    """Every candidate return is realized by some tracked configuration."""
    seen = {_scan_relevant(view, c) for c in view.meta}
    return scan_return_set(view) <= seen


# -- type and structural conjuncts ---------------------------------------------


def _I_A(view):
    dom = _domain(view)
    return len(view.shared["A"]) == _m(view) and all(x in dom for x in view.shared["A"])


def _I_B(view):
    dom = _domain(view)
    return all(x is BOT or x in dom for x in view.shared["B"])


def _I_pc(view):
    return all(view.pc(p) in PCS for p in view.procs)


def _I_SWSS(view):
    scans = [p for p in view.procs if view.pc(p) in SCANNER_PCS]
    comps = [view.local(p)["i"] for p in view.procs if view.pc(p) in WRITER_PCS]
    return len(scans) <= 1 and len(comps) == len(set(comps))


def _I_X(view):
    s = scanner(view)
    return view.shared["X"] == (s is not None and view.pc(s) in (8, 9, 10))


def _I_M(view):
    dom, m = _domain(view), _m(view)
    return all(
        isinstance(c.sigma, tuple) and len(c.sigma) == m and all(x in dom for x in c.sigma) and len(c.f) == view.nprocs
        for c in view.meta
    )


def _status_all(view, pcs, test):
    return all(test(view, p, st) for p in view.procs if view.pc(p) in pcs for c in view.meta for st in (c.f[p],))


def _arg(view, p):
    lo = view.local(p)
    return (lo["i"], lo["v"])


def _I_idle(view):
    return _status_all(view, {IDLE}, lambda v, p, st: st.idle)


def _I_2(view):
    return _status_all(view, {2}, lambda v, p, st: st == (WRITE, _arg(v, p), BOT))


def _I_345(view):
    return _status_all(view, {3, 4, 5}, lambda v, p, st: st.op == WRITE and st.arg == _arg(v, p) and st.res in (BOT, ACK))


def _I_345_strict(view):
    return _status_all(view, {3, 4, 5}, lambda v, p, st: st == (WRITE, _arg(v, p), ACK))


def _I_7_10(view):
    return _status_all(view, {7, 8, 9, 10}, lambda v, p, st: st == (SCAN, BOT, BOT))


def _I_11_12(view):
    m = _m(view)
    return _status_all(
        view, {11, 12}, lambda v, p, st: st.op == SCAN and isinstance(st.res, tuple) and len(st.res) == m
    )


def _I_sigma_after(view):
    """Once the scan has taken effect every C agrees with A on the abstract array."""
    s = scanner(view)
    if s is not None and view.pc(s) <= 10:
        return True
    return all(c.sigma == view.shared["A"] for c in view.meta)


def _I_L(view):
    return bool(view.meta)


def snapshot_suite() -> PredicateSuite:
    return PredicateSuite(
        "snapshot-inv",
        "jayanti-snapshot",
        (
            Conjunct("I_A", _I_A),
            Conjunct("I_B", _I_B),
            Conjunct("I_pc", _I_pc),
            Conjunct("I_SWSS", _I_SWSS),
            Conjunct("I_X", _I_X, note="the flag is up exactly while the scanner is at 8, 9 or 10"),
            Conjunct("I_M", _I_M),
            Conjunct("I_idle", _I_idle),
            Conjunct("I_2", _I_2),
            Conjunct("I_345", _I_345, note="a write past line 2 may still be deferred in some C"),
            Conjunct(
                "I_345_strict",
                _I_345_strict,
                enabled=False,
                note="every C has the write linearized; fails whenever line 2 defers behind an active scan",
            ),
            Conjunct("I_7_10", _I_7_10),
            Conjunct("I_11_12", _I_11_12),
            Conjunct("I_sigma", _I_sigma_after),
            Conjunct("I_return", _I_return_cover, note="every element of ScanReturnSet is realized by some C in M"),
            Conjunct(
                "I_return_all",
                _I_return_all,
                enabled=False,
                note="every C lies in ScanReturnSet; fails while a deferred write that has since forwarded is still tracked",
            ),
            Conjunct("I_L", _I_L),
        ),
    )
