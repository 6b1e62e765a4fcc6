"""Jayanti-Tarjan concurrent union-find with any-try splitting.

Each element ``z`` of ``[n]`` has a parent pointer ``par[z]`` (initially
``z``); roots are the maxima of their parts.  Lines 4, 11 and 15 choose
nondeterministically between retrying the splitting CAS on the same node
and moving on.  ``max_tries`` caps the attempts per node: 1 gives one-try
splitting, 2 gives two-try splitting.

    1  Find(x)       invoke; u <- x
    2                a <- par[u]; if a = u goto 6
    3                b <- par[a]
    4                CAS(par[u], a, b); goto 2 (retry) or goto 5
    5                u <- a; goto 2
    6                return u
    7  Unite(x, y)   invoke; u <- x; v <- y
    8                if u = v goto 17
                     elif u < v: if CAS(par[u], u, v) goto 17
                     else:       if CAS(par[v], v, u) goto 17
    9-12             walk u to its root, splitting (as 2-5)
    13-16            walk v to its root, splitting (as 2-5); then goto 8
    17               return ack
"""

from __future__ import annotations

from ..model import ACK, BOT, Branch, Line, LineKind, ModelError, StepMachine, set_at
from ..seqtypes import FIND, UNITE
from ..tracker import TrackedMachine, partial_tracker

FIND_RETURN, UNITE_LINK, UNITE_RETURN = 6, 8, 17
LOCALS = {"pc": 0, "op": BOT, "arg": BOT, "u": BOT, "v": BOT, "a": BOT, "b": BOT, "t": 0}


def _par(sh, z):
    return sh["par"][z - 1]


def _cas(sh, z, expected, new):
    """Shared-cell update for CAS(par[z], expected, new), or None on failure."""
    if _par(sh, z) != expected:
        return None
    return {"par": set_at(sh["par"], z - 1, new)}


def _walk(reg: str, read_line: int, done: int, max_tries: int):
    """Lines read_line .. read_line + 3: split-walk register ``reg`` to its root."""
    grand, cas_line, step = read_line + 1, read_line + 2, read_line + 3

    def read(sh, lo, pid):
        a = _par(sh, lo[reg])
        if a == lo[reg]:
            return [Branch(local={"pc": done, "a": a, "t": 0}, label="root")]
        return [Branch(local={"pc": grand, "a": a})]

    def read_grand(sh, lo, pid):
        return [Branch(local={"pc": cas_line, "b": _par(sh, lo["a"])})]

    def split(sh, lo, pid):
        upd = _cas(sh, lo[reg], lo["a"], lo["b"]) or {}
        tag = "ok" if upd else "fail"
        out = []
        if lo["t"] + 1 < max_tries:
            out.append(Branch(shared=upd, local={"pc": read_line, "t": lo["t"] + 1}, label=f"{tag}-retry"))
        out.append(Branch(shared=upd, local={"pc": step}, label=f"{tag}-advance"))
        return out

    def advance(sh, lo, pid):
        return [Branch(local={"pc": read_line, reg: lo["a"], "t": 0})]

    inter = LineKind.INTERMEDIATE
    return {
        read_line: Line(read_line, inter, read, None, f"a <- par[{reg}]; if a = {reg} goto {done}"),
        grand: Line(grand, inter, read_grand, None, "b <- par[a]"),
        cas_line: Line(cas_line, inter, split, None, f"CAS(par[{reg}], a, b); retry or advance"),
        step: Line(step, inter, advance, None, f"{reg} <- a"),
    }


def _find_invoke(sh, lo, pid, arg):
    return [Branch(local={"pc": 2, "u": arg, "t": 0})]


def _find_return(sh, lo, pid):
    return [Branch(response=lo["u"])]


def _unite_invoke(sh, lo, pid, arg):
    x, y = arg
    return [Branch(local={"pc": 8, "u": x, "v": y, "t": 0})]


def _link(sh, lo, pid):
    u, v = lo["u"], lo["v"]
    if u == v:
        return [Branch(local={"pc": UNITE_RETURN}, label="same")]
    upd = _cas(sh, u, u, v) if u < v else _cas(sh, v, v, u)
    if upd is not None:
        return [Branch(shared=upd, local={"pc": UNITE_RETURN}, label="linked")]
    return [Branch(local={"pc": 9, "t": 0}, label="fail")]


def _unite_return(sh, lo, pid):
    return [Branch(response=ACK)]


def uf_lines(max_tries: int) -> dict[int, Line]:
    if max_tries < 1:
        raise ModelError("max_tries must be at least 1")
    lines = {
        1: Line(1, LineKind.INVOCATION, _find_invoke, FIND, "invoke Find(x); u <- x"),
        FIND_RETURN: Line(FIND_RETURN, LineKind.RETURN, _find_return, FIND, "return u"),
        7: Line(7, LineKind.INVOCATION, _unite_invoke, UNITE, "invoke Unite(x, y); u <- x; v <- y"),
        UNITE_LINK: Line(UNITE_LINK, LineKind.INTERMEDIATE, _link, UNITE, "equal, or CAS-link smaller under larger"),
        UNITE_RETURN: Line(UNITE_RETURN, LineKind.RETURN, _unite_return, UNITE, "return ack"),
    }
    for number, line in _walk("u", 2, FIND_RETURN, max_tries).items():
        lines[number] = Line(number, line.kind, line.run, FIND, line.text)
    for number, line in _walk("u", 9, 13, max_tries).items():
        lines[number] = Line(number, line.kind, line.run, UNITE, line.text)
    for number, line in _walk("v", 13, UNITE_LINK, max_tries).items():
        lines[number] = Line(number, line.kind, line.run, UNITE, line.text)
    return dict(sorted(lines.items()))


def uf_machine(n: int, max_tries: int, lines: dict[int, Line] | None = None, name: str = "jt-union-find") -> StepMachine:
    if n < 1:
        raise ModelError("union-find needs at least one element")
    return StepMachine(
        name=name,
        shared_init={"par": tuple(range(1, n + 1))},
        local_init=dict(LOCALS),
        lines=lines or uf_lines(max_tries),
        entry={FIND: 1, UNITE: 7},
        description=f"Jayanti-Tarjan union-find, n={n}, max_tries={max_tries}",
    )


# -- partial tracker: one linearization point per operation ------------------


def _find_root_seen(ctx, c):
    return [(ctx.pid,)] if ctx.event.label == "root" else [()]


def _unite_done(ctx, c):
    return [(ctx.pid,)] if ctx.event.label in ("same", "linked") else [()]


UF_RULE_LINES = (2, UNITE_LINK)


def uf_tracker(machine: StepMachine, spec) -> TrackedMachine:
    return partial_tracker(machine, spec, {2: _find_root_seen, UNITE_LINK: _unite_done}, name=f"{machine.name}/partial")


# -- mutants -----------------------------------------------------------------


def _link_backwards(sh, lo, pid):
    u, v = lo["u"], lo["v"]
    if u == v:
        return [Branch(local={"pc": UNITE_RETURN}, label="same")]
    upd = _cas(sh, v, v, u) if u < v else _cas(sh, u, u, v)
    if upd is not None:
        return [Branch(shared=upd, local={"pc": UNITE_RETURN}, label="linked")]
    return [Branch(local={"pc": 9, "t": 0}, label="fail")]


RACY_WRITE = 18


def _link_check(sh, lo, pid):
    u, v = lo["u"], lo["v"]
    if u == v:
        return [Branch(local={"pc": UNITE_RETURN}, label="same")]
    lo_ = min(u, v)
    if _par(sh, lo_) == lo_:
        return [Branch(local={"pc": RACY_WRITE}, label="looks-root")]
    return [Branch(local={"pc": 9, "t": 0}, label="fail")]


def _link_write(sh, lo, pid):
    u, v = lo["u"], lo["v"]
    lo_, hi = min(u, v), max(u, v)
    return [Branch(shared={"par": set_at(sh["par"], lo_ - 1, hi)}, local={"pc": UNITE_RETURN}, label="linked")]


def uf_mutants(n: int, max_tries: int) -> dict[str, tuple[str, StepMachine]]:
    inter = LineKind.INTERMEDIATE

    def variant(bug: str, replaced: dict[int, Line]) -> StepMachine:
        lines = uf_lines(max_tries)
        lines.update(replaced)
        return uf_machine(n, max_tries, lines, name=f"jt-union-find:mutant:{bug}")

    return {
        "link-larger-under-smaller": (
            "line 8 links the larger root under the smaller one",
            variant(
                "link-larger-under-smaller",
                {UNITE_LINK: Line(UNITE_LINK, inter, _link_backwards, UNITE, "CAS-link larger under smaller")},
            ),
        ),
        "unite-racy-link": (
            "line 8 checks for a root and a separate line writes the link without CAS",
            variant(
                "unite-racy-link",
                {
                    UNITE_LINK: Line(UNITE_LINK, inter, _link_check, UNITE, "if par[min] = min goto 18"),
                    RACY_WRITE: Line(RACY_WRITE, inter, _link_write, UNITE, "par[min] <- max"),
                },
            ),
        ),
    }
