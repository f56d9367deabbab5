"""Quivers, bigraded arrows, paths and the text format.

Paths are stored source to target: ``p * q`` means "p then q" and is defined
when ``p.target == q.source``. Trivial paths ``e_i`` have no arrows.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from graphlib import CycleError
from typing import Iterable, NamedTuple


class QuiverError(ValueError):
    pass


class QuiverParseError(QuiverError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class WeightZeroCycleError(QuiverError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str
    weight: int = 0
    degree: int = 0


@dataclass(frozen=True)
class Quiver:
    """A finite quiver whose arrows carry a bidegree (weight, degree).

    Plain quivers simply have every arrow at (0, 0).
    """

    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)
    _out: dict = field(init=False, repr=False, compare=False, hash=False)
    _in: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vs = tuple(str(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(set(vs)) != len(vs):
            raise QuiverError("duplicate vertex id")
        known = set(vs)
        by_id, out, inc = {}, {v: [] for v in vs}, {v: [] for v in vs}
        for a in self.arrows:
            if a.id in by_id:
                raise QuiverError(f"duplicate arrow id {a.id!r}")
            for end in (a.source, a.target):
                if end not in known:
                    raise QuiverError(f"arrow {a.id!r} uses unknown vertex {end!r}")
            if a.weight < 0:
                raise QuiverError(f"arrow {a.id!r} has negative weight")
            by_id[a.id] = a
            out[a.source].append(a)
            inc[a.target].append(a)
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_out", {v: tuple(x) for v, x in out.items()})
        object.__setattr__(self, "_in", {v: tuple(x) for v, x in inc.items()})

    def arrow(self, arrow_id: str) -> Arrow:
        return self._by_id[arrow_id]

    def has_arrow(self, arrow_id: str) -> bool:
        return arrow_id in self._by_id

    def outgoing(self, v: str) -> tuple[Arrow, ...]:
        return self._out[v]

    def incoming(self, v: str) -> tuple[Arrow, ...]:
        return self._in[v]

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        for a in self.arrows:
            extra = ""
            if a.weight:
                extra += f" weight {a.weight}"
            if a.degree:
                extra += f" degree {a.degree}"
            lines.append(f"arrow {a.id}: {a.source} -> {a.target}{extra}")
        return "\n".join(lines) + "\n"


BigradedQuiver = Quiver


class Path(NamedTuple):
    source: str
    target: str
    arrows: tuple[str, ...] = ()

    @classmethod
    def trivial(cls, v: str) -> "Path":
        return cls(v, v, ())

    def then(self, other: "Path") -> "Path | None":
        if self.target != other.source:
            return None
        return Path(self.source, other.target, self.arrows + other.arrows)

    def label(self) -> str:
        return ".".join(self.arrows) if self.arrows else f"e{self.source}"

    def __str__(self) -> str:
        return self.label()


def path_weight(q: Quiver, p: Path) -> int:
    return sum(q.arrow(a).weight for a in p.arrows)


def path_degree(q: Quiver, p: Path) -> int:
    return sum(q.arrow(a).degree for a in p.arrows)


def path_of(q: Quiver, arrow_ids: Iterable[str], start: str | None = None) -> Path:
    """Build a path from arrow ids, checking composability."""
    ids = tuple(arrow_ids)
    if not ids:
        if start is None:
            raise QuiverError("a trivial path needs a vertex")
        return Path.trivial(start)
    arrows = [q.arrow(a) for a in ids]
    for x, y in zip(arrows, arrows[1:]):
        if x.target != y.source:
            raise QuiverError(f"arrows {x.id!r} and {y.id!r} do not compose")
    return Path(arrows[0].source, arrows[-1].target, ids)


_VERTEX = re.compile(r"^vertex\s+(\S+)$")
_ARROW = re.compile(
    r"^arrow\s+(\S+?)\s*:\s*(\S+)\s*->\s*(\S+)((?:\s+(?:weight|degree)\s+-?\d+)*)$"
)
_OPTION = re.compile(r"(weight|degree)\s+(-?\d+)")


def parse_quiver(text: str) -> Quiver:
    """Parse the line-based format.

    ``vertex <id>`` and ``arrow <id>: <src> -> <tgt> [weight <w>] [degree <d>]``;
    ``#`` starts a comment.
    """
    vertices: list[str] = []
    arrows: list[Arrow] = []
    seen_v: set[str] = set()
    seen_a: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _VERTEX.match(line)
        if m:
            v = m.group(1)
            if v in seen_v:
                raise QuiverParseError(lineno, f"duplicate vertex {v!r}")
            seen_v.add(v)
            vertices.append(v)
            continue
        m = _ARROW.match(line)
        if not m:
            raise QuiverParseError(lineno, f"cannot parse {line!r}")
        aid, src, tgt, opts = m.groups()
        if aid in seen_a:
            raise QuiverParseError(lineno, f"duplicate arrow {aid!r}")
        for end in (src, tgt):
            if end not in seen_v:
                raise QuiverParseError(lineno, f"unknown vertex {end!r}")
        values = {"weight": 0, "degree": 0}
        for key, val in _OPTION.findall(opts or ""):
            values[key] = int(val)
        if values["weight"] < 0:
            raise QuiverParseError(lineno, "weight must be non-negative")
        seen_a.add(aid)
        arrows.append(Arrow(aid, src, tgt, values["weight"], values["degree"]))
    return Quiver(tuple(vertices), tuple(arrows))


def topological_order(q: Quiver, arrows: Iterable[Arrow] | None = None) -> list[str]:
    """Kahn's algorithm with ties broken by declaration order; raises CycleError."""
    arrows = list(q.arrows if arrows is None else arrows)
    rank = {v: i for i, v in enumerate(q.vertices)}
    indeg = {v: 0 for v in q.vertices}
    succ: dict[str, list[str]] = {v: [] for v in q.vertices}
    for a in arrows:
        indeg[a.target] += 1
        succ[a.source].append(a.target)
    ready = sorted((v for v in q.vertices if indeg[v] == 0), key=rank.get)
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                ready.sort(key=rank.get)
    if len(out) != len(q.vertices):
        raise CycleError("quiver has a directed cycle")
    return out


def is_acyclic(q: Quiver) -> bool:
    try:
        topological_order(q)
    except CycleError:
        return False
    return True


def _underlying_edges(q: Quiver) -> list[frozenset]:
    return [frozenset((a.source, a.target)) for a in q.arrows]


def dynkin_type(q: Quiver) -> str | None:
    """Return "A3", "D4", "E6", ... for a simply laced Dynkin diagram, else None.

    Orientation is ignored; loops or multiple edges rule a diagram out.
    """
    n = len(q.vertices)
    edges = _underlying_edges(q)
    if n == 0 or any(len(e) == 1 for e in edges) or len(set(edges)) != len(edges):
        return None
    if len(edges) != n - 1:
        return None
    adj: dict[str, set[str]] = {v: set() for v in q.vertices}
    for e in edges:
        x, y = tuple(e)
        adj[x].add(y)
        adj[y].add(x)
    # connected?
    seen, stack = {q.vertices[0]}, [q.vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != n:
        return None
    branch = [v for v in q.vertices if len(adj[v]) >= 3]
    if not branch:
        return f"A{n}"
    if len(branch) > 1 or len(adj[branch[0]]) > 3:
        return None
    centre = branch[0]
    legs = []
    for start in sorted(adj[centre]):
        length, prev, cur = 1, centre, start
        while len(adj[cur]) == 2:
            prev, cur = cur, next(w for w in adj[cur] if w != prev)
            length += 1
        legs.append(length)
    legs.sort()
    if legs[:2] == [1, 1]:
        return f"D{n}"
    if legs[0] == 1 and legs[1] == 2 and legs[2] in (2, 3, 4):
        return f"E{n}"
    return None


def coxeter_number(kind: str) -> int:
    family, rank = kind[0], int(kind[1:])
    if family == "A":
        return rank + 1
    if family == "D":
        return 2 * rank - 2
    return {6: 12, 7: 18, 8: 30}[rank]


def positive_root_count(kind: str) -> int:
    family, rank = kind[0], int(kind[1:])
    if family == "A":
        return rank * (rank + 1) // 2
    if family == "D":
        return rank * (rank - 1)
    return {6: 36, 7: 63, 8: 120}[rank]


def _check_weight_zero_acyclic(q: Quiver) -> None:
    try:
        topological_order(q, [a for a in q.arrows if a.weight == 0])
    except CycleError as exc:
        raise WeightZeroCycleError("weight-0 arrows form a cycle") from exc


def path_sort_key(q: Quiver):
    def key(p: Path):
        return (path_weight(q, p), len(p.arrows), p.arrows)

    return key


def paths_from(q: Quiver, source: str, max_weight: int) -> list[Path]:
    """All paths starting at ``source`` with weight at most ``max_weight``."""
    _check_weight_zero_acyclic(q)
    out = []
    stack = [(Path.trivial(source), 0)]
    while stack:
        p, w = stack.pop()
        out.append(p)
        for a in q.outgoing(p.target):
            if w + a.weight <= max_weight:
                stack.append((Path(p.source, a.target, p.arrows + (a.id,)), w + a.weight))
    out.sort(key=path_sort_key(q))
    return out


def enumerate_paths(q: Quiver, source: str, target: str, max_weight: int) -> list[Path]:
    """Paths source -> target of weight at most ``max_weight``.

    Ordered by weight, then length, then lexicographically by arrow ids.
    """
    if max_weight < 0:
        raise QuiverError("max_weight must be non-negative")
    for v in (source, target):
        if v not in q._out:
            raise QuiverError(f"unknown vertex {v!r}")
    return [p for p in paths_from(q, source, max_weight) if p.target == target]
