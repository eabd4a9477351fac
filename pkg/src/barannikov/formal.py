"""Framed diagrams as combinatorial states, their legal moves, and a
breadth-first reachability solver targeting the standard diagram.

A state is a rank-ordered list of points (degree, arrow, partner).  Crossings
swap two rank-adjacent points whose arrows sweep toward each other (lower one
up, upper one down); an exchange outcome additionally swaps partners when the
two points have equal degree and the roles match one of the crossing cases.
Cancellations remove a rank-adjacent standard pair.  Births insert one.

The solver searches without births: if the standard diagram is reachable at
all, it is reachable birth-free, so the no-birth state space (finite, since
crossings are monotone and cancels shrink the diagram) decides the problem.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Union


class FramedDiagramError(ValueError):
    pass


class IllegalMoveError(ValueError):
    pass


class SearchLimitExceeded(RuntimeError):
    """The state budget ran out before the search space was exhausted."""


@dataclass(frozen=True)
class FramedPoint:
    id: str
    degree: int
    rank: int
    frame: str  # "up" | "down"
    partner: str | None


@dataclass(frozen=True)
class FramedDiagram:
    ambient_dim: int
    points: tuple[FramedPoint, ...]  # sorted by rank

    def by_rank(self, rank: int) -> FramedPoint:
        return self.points[rank - 1]

    def by_id(self, pid: str) -> FramedPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def pairs(self) -> list[tuple[FramedPoint, FramedPoint]]:
        """(upper, lower) by degree, each couple once, ordered by upper rank."""
        by_id = {p.id: p for p in self.points}
        out = []
        for p in self.points:
            if p.partner is not None:
                mate = by_id[p.partner]
                if p.degree == mate.degree + 1:
                    out.append((p, mate))
        return sorted(out, key=lambda ul: ul[0].rank)


@dataclass(frozen=True)
class PairClass:
    kind: str  # "standard" | "invertedI" | "invertedII"
    index: int  # degree of the upper point


@dataclass(frozen=True)
class Cross:
    a: str  # lower-rank point, framed up
    b: str  # next rank up, framed down
    outcome: str  # "keep" | "exchange"


@dataclass(frozen=True)
class Cancel:
    upper: str
    lower: str


@dataclass(frozen=True)
class BirthPair:
    degree: int  # degree of the lower point; the upper gets degree + 1
    at_rank: int
    frame: str


Move = Union[Cross, Cancel, BirthPair]


@dataclass(frozen=True)
class SolveOutcome:
    reachable: bool
    moves: tuple[Move, ...] = ()
    certificate: str | None = None  # "parity" | "exhausted"
    states_visited: int = 0


# -- validation ----------------------------------------------------------------


def validate_framed(d: FramedDiagram) -> None:
    n = d.ambient_dim
    if n < 0:
        raise FramedDiagramError("ambient dimension must be non-negative")
    m = len(d.points)
    if sorted(p.rank for p in d.points) != list(range(1, m + 1)):
        raise FramedDiagramError("ranks must form a permutation of 1..m")
    if [p.rank for p in d.points] != list(range(1, m + 1)):
        raise FramedDiagramError("points must be listed in rank order")
    ids = [p.id for p in d.points]
    if len(set(ids)) != m:
        raise FramedDiagramError("point ids must be unique")
    by_id = {p.id: p for p in d.points}
    for p in d.points:
        if p.frame not in ("up", "down"):
            raise FramedDiagramError(f"point {p.id}: frame must be up or down")
        if not (0 <= p.degree <= n):
            raise FramedDiagramError(f"point {p.id}: degree out of range 0..{n}")
        if p.partner is None:
            if p.degree not in (0, n):
                raise FramedDiagramError(
                    f"point {p.id}: unpartnered point at intermediate degree {p.degree}"
                )
            continue
        mate = by_id.get(p.partner)
        if mate is None:
            raise FramedDiagramError(f"point {p.id}: unknown partner {p.partner}")
        if mate.partner != p.id:
            raise FramedDiagramError(f"pair {p.id}/{p.partner} is not symmetric")
        if abs(p.degree - mate.degree) != 1:
            raise FramedDiagramError(f"pair {p.id}/{p.partner} does not span adjacent degrees")
        upper, lower = (p, mate) if p.degree > mate.degree else (mate, p)
        if upper.rank <= lower.rank:
            raise FramedDiagramError(
                f"pair {upper.id}/{lower.id}: the higher-degree point must sit above"
            )


def classify_pairs(d: FramedDiagram) -> dict[tuple[str, str], PairClass]:
    out = {}
    for upper, lower in d.pairs():
        if upper.frame == lower.frame:
            kind = "standard"
        elif upper.frame == "up":
            kind = "invertedI"
        else:
            kind = "invertedII"
        out[(upper.id, lower.id)] = PairClass(kind, upper.degree)
    return out


def inverted_pair_count(d: FramedDiagram) -> int:
    return sum(1 for pc in classify_pairs(d).values() if pc.kind != "standard")


# -- canonical state core --------------------------------------------------------
#
# A state is a tuple of (degree, up: bool, partner_index or -1), rank order.
# All move logic runs on states; the id layer is rebuilt on top of it.

State = tuple[tuple[int, bool, int], ...]


def state_of(d: FramedDiagram) -> State:
    index = {p.id: i for i, p in enumerate(d.points)}
    return tuple(
        (p.degree, p.frame == "up", -1 if p.partner is None else index[p.partner])
        for p in d.points
    )


def standard_state(n: int) -> State:
    return ((0, True, -1), (n, False, -1))


def _is_upper_end(state: State, i: int) -> bool:
    deg, _, pr = state[i]
    return pr >= 0 and state[pr][0] == deg - 1


def _is_lower_end(state: State, i: int) -> bool:
    deg, _, pr = state[i]
    return pr >= 0 and state[pr][0] == deg + 1


def _swap_positions(state: State, i: int) -> list[tuple[int, bool, int]]:
    pts = []
    for deg, up, pr in state:
        if pr == i:
            pr = i + 1
        elif pr == i + 1:
            pr = i
        pts.append((deg, up, pr))
    pts[i], pts[i + 1] = pts[i + 1], pts[i]
    return pts


def state_children(state: State, n: int, allow_births: bool):
    """All (rank-level move, child state) pairs, in deterministic order.

    Move encodings: ("cross", i, outcome), ("cancel", i), ("birth", k, i, up)
    with i a 0-based position.
    """
    m = len(state)
    out = []
    for i in range(m - 1):
        deg_a, up_a, pr_a = state[i]
        deg_b, up_b, pr_b = state[i + 1]
        if pr_a == i + 1:
            # a coupled pair cannot cross itself: cancel is the only way out
            if up_a == up_b:
                pts = []
                for j, (deg, up, pr) in enumerate(state):
                    if j in (i, i + 1):
                        continue
                    pts.append((deg, up, pr if pr < i else pr - 2))
                out.append((("cancel", i), tuple(pts)))
            continue
        if not (up_a and not up_b):
            continue
        out.append((("cross", i, "keep"), tuple(_swap_positions(state, i))))
        if deg_a == deg_b and pr_a >= 0 and pr_b >= 0:
            a_upper = _is_upper_end(state, i)
            b_upper = _is_upper_end(state, i + 1)
            if not (not a_upper and b_upper):  # everything except the dead case
                pts = _swap_positions(state, i)
                # after the swap, the original a sits at i+1 and b at i
                bd, bu, bp = pts[i]
                ad, au, ap = pts[i + 1]
                pts[i] = (bd, bu, ap)
                pts[i + 1] = (ad, au, bp)
                xd, xu, _ = pts[ap]
                pts[ap] = (xd, xu, i)
                yd, yu, _ = pts[bp]
                pts[bp] = (yd, yu, i + 1)
                out.append((("cross", i, "exchange"), tuple(pts)))
    if allow_births:
        for k in range(n):
            for i in range(m + 1):
                for up in (True, False):
                    pts = [
                        (deg, u, pr if pr < i else pr + 2)
                        for deg, u, pr in state
                    ]
                    pts[i:i] = [(k, up, i + 1), (k + 1, up, i)]
                    out.append((("birth", k, i, up), tuple(pts)))
    return out


def state_inverted_parity(state: State) -> int:
    odd = 0
    for i, (deg, up, pr) in enumerate(state):
        if pr > i and state[pr][0] != deg:  # count each pair once
            if up != state[pr][1]:
                odd ^= 1
    return odd


# -- id-level moves ---------------------------------------------------------------


def _rebuild(d: FramedDiagram, ids: list[str], pts: Iterable[tuple[int, bool, int]]) -> FramedDiagram:
    pts = list(pts)
    points = tuple(
        FramedPoint(
            id=ids[i],
            degree=deg,
            rank=i + 1,
            frame="up" if up else "down",
            partner=None if pr < 0 else ids[pr],
        )
        for i, (deg, up, pr) in enumerate(pts)
    )
    return FramedDiagram(d.ambient_dim, points)


def _fresh_ids(d: FramedDiagram, count: int) -> list[str]:
    used = {p.id for p in d.points}
    out, k = [], 1
    while len(out) < count:
        cand = f"n{k}"
        if cand not in used:
            out.append(cand)
            used.add(cand)
        k += 1
    return out


def _move_to_rank_form(d: FramedDiagram, m: Move):
    if isinstance(m, Cross):
        a = d.by_id(m.a)
        b = d.by_id(m.b)
        if b.rank != a.rank + 1:
            raise IllegalMoveError(f"cross: {m.a} and {m.b} are not rank-adjacent in this order")
        if m.outcome not in ("keep", "exchange"):
            raise IllegalMoveError(f"cross: unknown outcome {m.outcome!r}")
        return ("cross", a.rank - 1, m.outcome)
    if isinstance(m, Cancel):
        upper = d.by_id(m.upper)
        lower = d.by_id(m.lower)
        if upper.rank != lower.rank + 1:
            raise IllegalMoveError("cancel: pair is not rank-adjacent")
        return ("cancel", lower.rank - 1)
    if isinstance(m, BirthPair):
        if not (1 <= m.at_rank <= len(d.points) + 1):
            raise IllegalMoveError("birth: rank out of range")
        if not (0 <= m.degree <= d.ambient_dim - 1):
            raise IllegalMoveError("birth: degree out of range")
        if m.frame not in ("up", "down"):
            raise IllegalMoveError("birth: bad frame")
        return ("birth", m.degree, m.at_rank - 1, m.frame == "up")
    raise IllegalMoveError(f"unknown move {m!r}")


def _rank_move_to_ids(d: FramedDiagram, desc) -> Move:
    kind = desc[0]
    if kind == "cross":
        _, i, outcome = desc
        return Cross(d.points[i].id, d.points[i + 1].id, outcome)
    if kind == "cancel":
        _, i = desc
        return Cancel(upper=d.points[i + 1].id, lower=d.points[i].id)
    _, k, i, up = desc
    return BirthPair(k, i + 1, "up" if up else "down")


def enumerate_moves(d: FramedDiagram, allow_births: bool = False) -> list[Move]:
    validate_framed(d)
    state = state_of(d)
    return [
        _rank_move_to_ids(d, desc)
        for desc, _child in state_children(state, d.ambient_dim, allow_births)
    ]


def apply_move(d: FramedDiagram, m: Move) -> FramedDiagram:
    validate_framed(d)
    desc = _move_to_rank_form(d, m)
    state = state_of(d)
    legal = dict(state_children(state, d.ambient_dim, allow_births=True))
    child = legal.get(desc)
    if child is None:
        raise IllegalMoveError(f"move {m} is not legal here")
    if desc[0] == "cross":
        i = desc[1]
        ids = [p.id for p in d.points]
        ids[i], ids[i + 1] = ids[i + 1], ids[i]
    elif desc[0] == "cancel":
        i = desc[1]
        ids = [p.id for p in d.points if p.rank - 1 not in (i, i + 1)]
    else:
        i = desc[2]
        ids = [p.id for p in d.points]
        ids[i:i] = _fresh_ids(d, 2)
    out = _rebuild(d, ids, child)
    validate_framed(out)
    return out


# -- solver -----------------------------------------------------------------------


def solve(d: FramedDiagram, max_states: int = 2_000_000) -> SolveOutcome:
    """Shortest birth-free move sequence to the standard diagram, or an
    unreachability certificate (odd inverted-pair parity, or exhaustion)."""
    validate_framed(d)
    n = d.ambient_dim
    start = state_of(d)
    goal = standard_state(n)
    if state_inverted_parity(start) == 1:
        return SolveOutcome(reachable=False, certificate="parity", states_visited=0)
    parents: dict[State, tuple[State, tuple] | None] = {start: None}
    queue = deque([start])
    found = None
    while queue:
        state = queue.popleft()
        if state == goal:
            found = state
            break
        for desc, child in state_children(state, n, allow_births=False):
            if child not in parents:
                if len(parents) >= max_states:
                    raise SearchLimitExceeded(
                        f"state budget of {max_states} exceeded; raise --max-states"
                    )
                parents[child] = (state, desc)
                queue.append(child)
    if found is None:
        return SolveOutcome(
            reachable=False, certificate="exhausted", states_visited=len(parents)
        )
    descs = []
    cur = found
    while parents[cur] is not None:
        prev, desc = parents[cur]
        descs.append(desc)
        cur = prev
    descs.reverse()
    moves: list[Move] = []
    walker = d
    for desc in descs:
        move = _rank_move_to_ids(walker, desc)
        moves.append(move)
        walker = apply_move(walker, move)
    if state_of(walker) != goal:
        raise AssertionError("internal: certificate replay does not reach the goal")
    return SolveOutcome(reachable=True, moves=tuple(moves), states_visited=len(parents))


# -- text format --------------------------------------------------------------------


def parse_framed(text: str | bytes) -> FramedDiagram:
    """Parse ``dim n`` / ``point <id> <degree> <rank> <up|down>`` /
    ``pair <upper-id> <lower-id>`` lines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n: int | None = None
    rows: list[tuple[str, int, int, str]] = []
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "dim" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "point" and len(parts) == 5:
                rows.append((parts[1], int(parts[2]), int(parts[3]), parts[4]))
            elif parts[0] == "pair" and len(parts) == 3:
                pairs.append((parts[1], parts[2]))
            else:
                raise ValueError(f"unknown directive {parts[0]!r}")
        except ValueError as exc:
            raise FramedDiagramError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise FramedDiagramError("missing 'dim' declaration")
    partner: dict[str, str] = {}
    for upper, lower in pairs:
        partner[upper] = lower
        partner[lower] = upper
    points = tuple(
        FramedPoint(id=pid, degree=deg, rank=rank, frame=frame, partner=partner.get(pid))
        for pid, deg, rank, frame in sorted(rows, key=lambda r: r[2])
    )
    d = FramedDiagram(n, points)
    validate_framed(d)
    return d


def print_framed(d: FramedDiagram) -> str:
    lines = [f"dim {d.ambient_dim}"]
    for p in d.points:
        lines.append(f"point {p.id} {p.degree} {p.rank} {p.frame}")
    for upper, lower in d.pairs():
        lines.append(f"pair {upper.id} {lower.id}")
    return "\n".join(lines) + "\n"


def format_move(m: Move) -> str:
    if isinstance(m, Cross):
        return f"cross {m.a} {m.b} {m.outcome}"
    if isinstance(m, Cancel):
        return f"cancel {m.upper} {m.lower}"
    return f"birth {m.degree} {m.at_rank} {m.frame}"
