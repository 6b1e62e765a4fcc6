"""Invariant conjuncts for the Jayanti-Tarjan union-find and its singleton tracker."""

from __future__ import annotations

from ..implementations.union_find import FIND_RETURN, UNITE_LINK, UNITE_RETURN
from ..model import ACK, BOT, IDLE
from ..seqtypes import FIND, UNITE, is_partition
from . import Conjunct, PredicateSuite, StateView

FIND_PCS = frozenset(range(2, FIND_RETURN))
UNITE_PCS = frozenset(range(UNITE_LINK, UNITE_RETURN))
PCS = frozenset({IDLE, FIND_RETURN, UNITE_RETURN}) | FIND_PCS | UNITE_PCS


def _n(view: StateView) -> int:
    return len(view.shared["par"])


def _par(view: StateView, z: int) -> int:
    return view.shared["par"][z - 1]


def _roots(view: StateView) -> list[int]:
    return [z for z in range(1, _n(view) + 1) if _par(view, z) == z]


def _I_par(view):
    n = _n(view)
    return all(isinstance(p, int) and 1 <= p <= n for p in view.shared["par"])


def _I_pc(view):
    return all(view.pc(p) in PCS for p in view.procs)


def _I_reg(view):
    """u, v, a and b hold elements of [n] wherever they are live."""
    n = _n(view)
    ok = lambda x: isinstance(x, int) and 1 <= x <= n  # noqa: E731
    for p in view.procs:
        pc, lo = view.pc(p), view.local(p)
        if pc in FIND_PCS | {FIND_RETURN} and not ok(lo["u"]):
            return False
        if pc in UNITE_PCS and not (ok(lo["u"]) and ok(lo["v"])):
            return False
        if pc in (3, 4, 10, 11, 14, 15) and not ok(lo["a"]):
            return False
        if pc in (4, 11, 15) and not ok(lo["b"]):
            return False
    return True


def _I_M(view):
    return all(is_partition(c.sigma) and len(c.sigma) == _n(view) and len(c.f) == view.nprocs for c in view.meta)


def _I_a(view):
    """Every node shares a part with its parent."""
    n = _n(view)
    return all(c.sigma[z - 1] == c.sigma[_par(view, z) - 1] for c in view.meta for z in range(1, n + 1))


def _I_b(view):
    """Distinct roots lie in distinct parts."""
    roots = _roots(view)
    return all(len({c.sigma[r - 1] for r in roots}) == len(roots) for c in view.meta)


def _I_c(view):
    """Parent pointers never point to smaller nodes."""
    return all(_par(view, z) >= z for z in range(1, _n(view) + 1))


def _I_walk(view):
    """A splitting walk only ever visits ancestors: a = par-chain successor of u, b of a."""
    for p in view.procs:
        pc, lo = view.pc(p), view.local(p)
        for grand, cas, reg in ((3, 4, "u"), (10, 11, "u"), (14, 15, "v")):
            if pc in (grand, cas) and not (lo["a"] > lo[reg]):
                return False
            if pc == cas and not (lo["b"] >= lo["a"]):
                return False
    return True


def _status_all(view, pcs, test):
    return all(test(view, p, c, c.f[p]) for p in view.procs if view.pc(p) in pcs for c in view.meta)


def _same_part(c, x, y):
    return c.sigma[x - 1] == c.sigma[y - 1]


def _I_idle(view):
    return _status_all(view, {IDLE}, lambda v, p, c, st: st.idle)


def _I_find(view):
    """Lines 2-5: Find(x) pending, u still in x's part."""
    return _status_all(
        view,
        FIND_PCS,
        lambda v, p, c, st: st == (FIND, v.local(p)["arg"], BOT) and _same_part(c, v.local(p)["u"], v.local(p)["arg"]),
    )


def _I_find_return(view):
    """Line 6: Find linearized with response u."""
    return _status_all(view, {FIND_RETURN}, lambda v, p, c, st: st == (FIND, v.local(p)["arg"], v.local(p)["u"]))


def _I_unite(view):
    """Lines 8-16: Unite(x, y) pending, u in x's part and v in y's part."""

    def test(v, p, c, st):
        lo = v.local(p)
        x, y = lo["arg"]
        return st == (UNITE, (x, y), BOT) and _same_part(c, lo["u"], x) and _same_part(c, lo["v"], y)

    return _status_all(view, UNITE_PCS, test)


def _I_unite_return(view):
    """Line 17: Unite linearized, x and y now share a part."""

    def test(v, p, c, st):
        x, y = v.local(p)["arg"]
        return st == (UNITE, (x, y), ACK)

    return _status_all(view, {UNITE_RETURN}, test)


def _I_S(view):
    return len(view.meta) == 1


def _I_L(view):
    return bool(view.meta)


def union_find_suite() -> PredicateSuite:
    return PredicateSuite(
        "uf-inv",
        "jt-union-find",
        (
            Conjunct("I_par", _I_par),
            Conjunct("I_pc", _I_pc),
            Conjunct("I_reg", _I_reg),
            Conjunct("I_M", _I_M),
            Conjunct("I_a", _I_a),
            Conjunct("I_b", _I_b),
            Conjunct("I_c", _I_c),
            Conjunct("I_walk", _I_walk, note="a > u before a split and b >= a at the CAS"),
            Conjunct("I_idle", _I_idle),
            Conjunct("I_find", _I_find),
            Conjunct("I_find_ret", _I_find_return),
            Conjunct("I_unite", _I_unite),
            Conjunct("I_unite_ret", _I_unite_return),
            Conjunct("I_S", _I_S),
            Conjunct("I_L", _I_L),
        ),
    )
