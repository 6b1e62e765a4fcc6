"""Invariant conjuncts for the Herlihy-Wing queue and its partial tracker.

Program counters follow the step machine in
:mod:`lintrack.implementations.hw_queue`; an idle process sits at pc 0,
which plays the role of the invocation lines 1 and 5.
"""

from __future__ import annotations

from itertools import combinations, permutations

from ..model import ACK, BOT, IDLE
from ..seqtypes import DEQUEUE, ENQUEUE
from . import Conjunct, ContractError, PredicateSuite, StateView

PCS = frozenset({IDLE, 2, 3, 4, 6, 7, 8, 9})


def _values(view: StateView) -> tuple:
    return tuple(view.params.values) if view.params is not None else (1, 2)


def _claimants(view: StateView, k: int) -> list[int]:
    return [p for p in view.procs if view.pc(p) == 3 and view.local(p)["i"] == k]


def index_range(view: StateView) -> range:
    return range(1, view.shared["X"])


def good_enq_set(view: StateView, A) -> bool:
    """Every filled slot is in A, and every empty slot in A is claimed at line 3."""
    A = frozenset(A)
    rng = index_range(view)
    if not A <= set(rng):
        raise ContractError(f"{sorted(A)} is not a subset of [X - 1]")
    Q = view.shared["Q"]
    for k in rng:
        if Q[k - 1] is not BOT and k not in A:
            return False
        if Q[k - 1] is BOT and k in A and not _claimants(view, k):
            return False
    return True


def expected_res(view: StateView, A, pid: int):
    pc = view.pc(pid)
    lo = view.local(pid)
    if pc == 3 and lo["i"] in A:
        return ACK
    if pc == 4:
        return ACK
    if pc == 9:
        return lo["x"]
    return BOT


def good_res(view: StateView, A, c) -> bool:
    A = frozenset(A)
    return all(c.f[p].res == expected_res(view, A, p) for p in view.procs)


def values_match_inds(view: StateView, s, c) -> bool:
    Q = view.shared["Q"]
    alpha = []
    for k in s:
        if Q[k - 1] is not BOT:
            alpha.append(Q[k - 1])
            continue
        owners = _claimants(view, k)
        if len(owners) != 1:
            raise ContractError(f"index {k} is empty and has {len(owners)} claimants at line 3")
        alpha.append(view.local(owners[0])["v"])
    return c.sigma == tuple(alpha)


def j_inv_seq(view: StateView, s) -> bool:
    """Every inversion of s over a filled slot is justified by a dequeuer at line 8."""
    Q = view.shared["Q"]
    sweepers = [view.local(p) for p in view.procs if view.pc(p) == 8]
    for m in range(len(s)):
        for n in range(m):
            if s[m] < s[n] and Q[s[m] - 1] is not BOT:
                if not any(s[n] < lo["l"] and s[m] < lo["j"] for lo in sweepers):
                    return False
    return True


def candidate_sequences(view: StateView):
    """Pairs (A, s) with GoodEnqSet(A), s a permutation of A, and JInvSeq(s)."""
    rng = list(index_range(view))
    for r in range(len(rng) + 1):
        for A in combinations(rng, r):
            if not good_enq_set(view, A):
                continue
            for s in permutations(A):
                if j_inv_seq(view, s):
                    yield frozenset(A), s


def _I_b(view: StateView) -> bool:
    for A, s in candidate_sequences(view):
        if any(good_res(view, A, c) and values_match_inds(view, s, c) for c in view.meta):
            return True
    return False


def _I_b_all(view: StateView) -> bool:
    seqs = list(candidate_sequences(view))
    return all(any(good_res(view, A, c) and values_match_inds(view, s, c) for A, s in seqs) for c in view.meta)


# -- type conjuncts ----------------------------------------------------------


def _I_X(view):
    X = view.shared["X"]
    return isinstance(X, int) and 1 <= X <= len(view.shared["Q"]) + 1


def _I_Q(view):
    vals = _values(view)
    return all(q is BOT or q in vals for q in view.shared["Q"])


def _I_v(view):
    vals = _values(view)
    return all(view.local(p)["v"] in vals for p in view.procs if view.local(p)["op"] == ENQUEUE)


def _I_i(view):
    X = view.shared["X"]
    return all(1 <= view.local(p)["i"] < X for p in view.procs if view.pc(p) in (3, 4))


def _I_l(view):
    X = view.shared["X"]
    return all(1 <= view.local(p)["l"] <= X for p in view.procs if view.pc(p) in (7, 8))


def _I_j(view):
    return all(1 <= view.local(p)["j"] <= view.local(p)["l"] - 1 for p in view.procs if view.pc(p) == 8)


def _I_x(view):
    vals = _values(view)
    ok = True
    for p in view.procs:
        x = view.local(p)["x"]
        if view.pc(p) == 9:
            ok &= x in vals
        elif view.pc(p) in (6, 7, 8):
            ok &= x is BOT
    return ok


def _I_pc(view):
    return all(view.pc(p) in PCS for p in view.procs)


def _I_M(view):
    vals = _values(view)
    for c in view.meta:
        if not (isinstance(c.sigma, tuple) and all(v in vals for v in c.sigma)):
            return False
        if len(c.f) != view.nprocs:
            return False
    return True


# -- per-pc conjuncts --------------------------------------------------------


def _status_all(view, pcs, test):
    return all(test(view, p, c.f[p]) for p in view.procs if view.pc(p) in pcs for c in view.meta)


def _I_idle(view):
    return _status_all(view, {IDLE}, lambda v, p, st: st.idle)


def _I_2(view):
    return _status_all(view, {2}, lambda v, p, st: st == (ENQUEUE, v.local(p)["v"], BOT))


def _I_3(view):
    Q = view.shared["Q"]
    for p in view.procs:
        if view.pc(p) == 3:
            i = view.local(p)["i"]
            if Q[i - 1] is not BOT or len(_claimants(view, i)) != 1:
                return False
    return _status_all(view, {3}, lambda v, p, st: st.op == ENQUEUE and st.arg == v.local(p)["v"] and st.res in (BOT, ACK))


def _I_4(view):
    return _status_all(view, {4}, lambda v, p, st: st.op == ENQUEUE and st.arg == v.local(p)["v"] and st.res in (BOT, ACK))


def _I_4_strict(view):
    return _status_all(view, {4}, lambda v, p, st: st == (ENQUEUE, v.local(p)["v"], ACK))


def _I_678(pcs):
    return lambda view: _status_all(view, pcs, lambda v, p, st: st == (DEQUEUE, BOT, BOT))


def _I_9(view):
    """Line 9: the dequeue is linearized in every C (its response may differ from x)."""
    return _status_all(view, {9}, lambda v, p, st: st.op == DEQUEUE and st.arg is BOT and st.res is not BOT)


def _I_9_exact(view):
    return _status_all(view, {9}, lambda v, p, st: st == (DEQUEUE, BOT, v.local(p)["x"]))


def _I_a(view):
    Q, X = view.shared["Q"], view.shared["X"]
    return all(Q[k - 1] is BOT for k in range(X, len(Q) + 1))


def _I_L(view):
    return bool(view.meta)


def hw_queue_suite() -> PredicateSuite:
    return PredicateSuite(
        "hw-queue-inv",
        "hw-queue",
        (
            Conjunct("I_X", _I_X),
            Conjunct("I_Q", _I_Q),
            Conjunct("I_v", _I_v),
            Conjunct("I_i", _I_i),
            Conjunct("I_l", _I_l),
            Conjunct("I_j", _I_j),
            Conjunct("I_x", _I_x),
            Conjunct("I_pc", _I_pc),
            Conjunct("I_M", _I_M),
            Conjunct("I_1,5", _I_idle, note="idle processes are idle in every C"),
            Conjunct("I_2", _I_2),
            Conjunct("I_3", _I_3, note="slot i is empty, claimed once, and the enqueue may or may not be linearized"),
            Conjunct("I_4", _I_4),
            Conjunct(
                "I_4_strict",
                _I_4_strict,
                enabled=False,
                note="every C has the enqueue linearized at line 4; fails because line 3 carries no rule",
            ),
            Conjunct("I_6", _I_678({6})),
            Conjunct("I_7", _I_678({7})),
            Conjunct("I_8", _I_678({8})),
            Conjunct("I_9", _I_9),
            Conjunct(
                "I_9_exact",
                _I_9_exact,
                enabled=False,
                note="every C records x as the response; fails because the line-2 rule also keeps orders the swap later rules out",
            ),
            Conjunct("I_a", _I_a),
            Conjunct("I_b", _I_b),
            Conjunct(
                "I_b_all",
                _I_b_all,
                enabled=False,
                note="universal variant of I_b; fails for the same reason as I_9_exact",
            ),
            Conjunct("I_L", _I_L),
        ),
    )
