"""Knitting, the repetitive quiver and its mesh category.

Conventions. ``tau`` raises the level: ``tau(i, n) = (i, n + 1)``, and the
repetitive vertex ``(i, n)`` stands for ``tau^n P_i``; knitted objects
``tau^{-k} P_i`` therefore sit at level ``-k``. Arrows of the repetitive quiver
point against morphisms: a path ``x -> y`` is a morphism ``h(y) -> h(x)``.

Knitting works with signed classes in the Grothendieck group, where every
mesh gives ``[tau^{-1} X] = sum [middle] - [X]``. A class that is minus a
dimension vector belongs to a once shifted module; the first such object in
the orbit of ``P_k`` is ``P_i[1]``, which defines ``nu(i) = k`` and ``N(i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .algebra import GradedQuotientAlgebra, PathVector, build_quotient
from .quiver import (
    Arrow, Path, Quiver, QuiverError, coxeter_number, dynkin_type, is_acyclic, topological_order,
)

DEFAULT_MAX_DEPTH = 200


class NotDynkinError(QuiverError):
    pass


class KnittingDivergenceError(QuiverError):
    pass


class OutOfFragmentError(QuiverError):
    pass


class RepetitiveVertex(NamedTuple):
    vertex: str
    level: int

    def tau(self, k: int = 1) -> "RepetitiveVertex":
        return RepetitiveVertex(self.vertex, self.level + k)

    def id(self) -> str:
        return f"{self.vertex}@{self.level}"


@dataclass(frozen=True)
class KnitObject:
    vertex: str
    power: int  # the object is tau^{-power} P_vertex
    klass: tuple[int, ...]  # signed class, coordinates in declaration order
    shift: int

    @property
    def dim(self) -> tuple[int, ...]:
        return tuple(abs(x) for x in self.klass)

    @property
    def position(self) -> RepetitiveVertex:
        return RepetitiveVertex(self.vertex, -self.power)


@dataclass
class MeshFragment:
    quiver: Quiver
    depth: int
    objects: dict[tuple[str, int], KnitObject]
    order: list[str]

    def object(self, vertex: str, power: int) -> KnitObject:
        try:
            return self.objects[(vertex, power)]
        except KeyError:
            raise OutOfFragmentError(f"tau^-{power} P_{vertex} is not knitted (depth {self.depth})") from None

    def unshifted(self) -> list[KnitObject]:
        return [o for o in self.objects.values() if o.shift == 0]

    def first_shifted(self) -> dict[str, KnitObject]:
        """First shifted object of each orbit."""
        out = {}
        for v in self.quiver.vertices:
            for k in range(self.depth + 1):
                o = self.objects.get((v, k))
                if o is not None and o.shift:
                    out[v] = o
                    break
        return out

    def mesh_additivity_holds(self) -> bool:
        q = self.quiver
        for (i, k), obj in self.objects.items():
            if k == 0:
                continue
            total = [0] * len(q.vertices)
            for a in q.incoming(i):
                _acc(total, self.objects[(a.source, k - 1)].klass)
            for a in q.outgoing(i):
                _acc(total, self.objects[(a.target, k)].klass)
            _acc(total, self.objects[(i, k - 1)].klass, -1)
            if tuple(total) != obj.klass:
                return False
        return True

    def to_json(self) -> dict:
        q = self.quiver
        objs = sorted(self.objects.values(), key=lambda o: (o.power, self.order.index(o.vertex)))
        arrows = []
        for k in range(self.depth + 1):
            for a in q.arrows:
                arrows.append({"id": f"({a.id},{-k})", "source": f"{a.source}@{-k}", "target": f"{a.target}@{-k}",
                               "weight": 0, "degree": 0})
                if k < self.depth:
                    arrows.append({"id": f"({a.id}*,{-k - 1})", "source": f"{a.target}@{-k - 1}",
                                   "target": f"{a.source}@{-k}", "weight": 1, "degree": 0})
        return {
            "quiver": q.to_text(),
            "depth": self.depth,
            "vertex_order": list(q.vertices),
            "objects": [
                {"id": o.position.id(), "vertex": o.vertex, "tau_inverse_power": o.power,
                 "dim": list(o.dim), "class": list(o.klass), "shift": o.shift}
                for o in objs
            ],
            "arrows": arrows,
        }

    def to_dot(self) -> str:
        lines = ["digraph ar {", "  rankdir=LR;"]
        for o in sorted(self.objects.values(), key=lambda o: (o.power, o.vertex)):
            dim = "".join(str(x) for x in o.dim)
            mark = f"[{o.shift}]" if o.shift else ""
            lines.append(f'  "{o.position.id()}" [label="{dim}{mark}"];')
        q = self.quiver
        for k in range(self.depth + 1):
            for a in q.arrows:
                # morphism direction: P_target -> P_source, and tau^-k P_source -> tau^-(k+1) P_target
                lines.append(f'  "{a.target}@{-k}" -> "{a.source}@{-k}";')
                if k < self.depth:
                    lines.append(f'  "{a.source}@{-k}" -> "{a.target}@{-k - 1}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _acc(total: list[int], v, scale: int = 1) -> None:
    for n, x in enumerate(v):
        total[n] += scale * x


def projective_classes(q: Quiver) -> dict[str, tuple[int, ...]]:
    """``(P_i)_v`` = number of paths ``i -> v``."""
    order = topological_order(q)
    index = {v: n for n, v in enumerate(q.vertices)}
    out: dict[str, tuple[int, ...]] = {}
    for i in reversed(order):
        vec = [0] * len(q.vertices)
        vec[index[i]] = 1
        for a in q.outgoing(i):
            _acc(vec, out[a.target])
        out[i] = tuple(vec)
    return out


def knit(q: Quiver, depth: int, max_depth: int = DEFAULT_MAX_DEPTH) -> MeshFragment:
    """Classes of ``tau^{-k} P_i`` for ``0 <= k <= depth``."""
    if not is_acyclic(q):
        raise QuiverError("quiver is not acyclic")
    if depth < 1:
        raise QuiverError("depth must be at least 1")
    if depth > max_depth:
        raise KnittingDivergenceError(f"depth {depth} exceeds the bound {max_depth}")
    order = list(reversed(topological_order(q)))  # sinks first
    proj = projective_classes(q)
    objects: dict[tuple[str, int], KnitObject] = {}
    for i in q.vertices:
        objects[(i, 0)] = KnitObject(i, 0, proj[i], 0)
    for k in range(1, depth + 1):
        for i in order:
            total = [0] * len(q.vertices)
            for a in q.incoming(i):
                _acc(total, objects[(a.source, k - 1)].klass)
            for a in q.outgoing(i):
                _acc(total, objects[(a.target, k)].klass)
            prev = objects[(i, k - 1)]
            _acc(total, prev.klass, -1)
            klass = tuple(total)
            if not any(klass):
                raise QuiverError("knitting produced a zero class")
            sign = 1 if prev.shift % 2 == 0 else -1
            flipped = any(x * sign < 0 for x in klass)
            if flipped and any(x * sign > 0 for x in klass):
                raise QuiverError(f"class {klass} is neither a module nor a shifted module")
            objects[(i, k)] = KnitObject(i, k, klass, prev.shift + (1 if flipped else 0))
    return MeshFragment(q, depth, objects, list(q.vertices))


@dataclass(frozen=True)
class DynkinData:
    kind: str
    nu: dict[str, str] = field(hash=False)
    N: dict[str, int] = field(hash=False)
    coxeter: int
    depth: int

    def nu_inverse(self, i: str) -> str:
        return next(k for k, v in self.nu.items() if v == i)


def nakayama_and_N(q: Quiver, max_depth: int = DEFAULT_MAX_DEPTH) -> DynkinData:
    """``nu`` and ``N`` from ``tau^{-N(i)} P_{nu(i)} = P_i[1]``."""
    kind = dynkin_type(q)
    if kind is None or not is_acyclic(q):
        raise NotDynkinError("quiver is not of Dynkin type")
    h = coxeter_number(kind)
    depth = min(h, max_depth)
    frag = knit(q, depth, max_depth)
    proj = projective_classes(q)
    by_class = {v: k for k, v in proj.items()}
    nu: dict[str, str] = {}
    N: dict[str, int] = {}
    for k, obj in frag.first_shifted().items():
        i = by_class.get(tuple(-x for x in obj.klass))
        if i is None:
            raise QuiverError(f"first shifted object of orbit {k} is not a shifted projective")
        nu[i] = k
        N[i] = obj.power
    if sorted(nu) != sorted(q.vertices):
        raise QuiverError("not every shifted projective appeared")
    for i in q.vertices:
        if nu[nu[i]] != i:
            raise QuiverError("nu is not an involution")
        if N[i] + N[nu[i]] != h:
            raise QuiverError("N(i) + N(nu(i)) differs from the Coxeter number")
    return DynkinData(kind, nu, N, h, depth)


def happel_hom_dim(frag: MeshFragment, j: str, i: str, w: int) -> int:
    """``dim Hom(P_j, tau^{-w} P_i)``: the ``j`` entry if unshifted, else 0."""
    obj = frag.object(i, w)
    return obj.dim[frag.order.index(j)] if obj.shift == 0 else 0


def shift_count(frag: MeshFragment, i: str, w: int) -> int:
    return frag.object(i, w).shift


# -- repetitive quiver --------------------------------------------------------


def rep_vertex_id(v: str, level: int) -> str:
    return f"{v}@{level}"


def rep_arrow_id(a: str, level: int) -> str:
    return f"{a}@{level}"


def repetitive_window(q: Quiver, lowest: int, extra: tuple[Arrow, ...] = ()) -> Quiver:
    """Levels ``lowest..0``: ``(a, n): (i, n) -> (j, n)`` and ``(a*, n): (j, n) -> (i, n+1)``.

    Starred arrows have weight 1 so a path's weight is its level increase.
    """
    vertices = [rep_vertex_id(v, n) for n in range(lowest, 1) for v in q.vertices]
    arrows = []
    for n in range(lowest, 1):
        for a in q.arrows:
            arrows.append(Arrow(rep_arrow_id(a.id, n), rep_vertex_id(a.source, n), rep_vertex_id(a.target, n), 0, 0))
            if n < 0:
                arrows.append(Arrow(rep_arrow_id(a.id + "*", n), rep_vertex_id(a.target, n),
                                    rep_vertex_id(a.source, n + 1), 1, 0))
    return Quiver(tuple(vertices), tuple(arrows) + tuple(extra))


def sigma(q: Quiver, arrow_id: str) -> str:
    """The arrow ``sigma(gamma)``: ``y -> tau x`` for ``gamma: x -> y``."""
    base, level = arrow_id.rsplit("@", 1)
    n = int(level)
    if base.endswith("*"):
        return rep_arrow_id(base[:-1], n + 1)
    return rep_arrow_id(base + "*", n)


def mesh_relators(q: Quiver, lowest: int) -> list[PathVector]:
    """``rho_(i,n)``: outgoing ``(a,n)(a*,n)`` with +, incoming ``(b*,n)(b,n+1)`` with -."""
    rels = []
    for n in range(lowest, 0):
        for i in q.vertices:
            x, tx = rep_vertex_id(i, n), rep_vertex_id(i, n + 1)
            v = PathVector()
            for a in q.outgoing(i):
                v[Path(x, tx, (rep_arrow_id(a.id, n), rep_arrow_id(a.id + "*", n)))] = 1
            for b in q.incoming(i):
                v[Path(x, tx, (rep_arrow_id(b.id + "*", n), rep_arrow_id(b.id, n + 1)))] = -1
            if v:
                rels.append(v)
    return rels


@dataclass
class MeshHom:
    source: RepetitiveVertex
    target: RepetitiveVertex
    basis: list[Path]
    predicted: int

    @property
    def dim(self) -> int:
        return len(self.basis)


def mesh_category(q: Quiver, lowest: int) -> GradedQuotientAlgebra:
    window = repetitive_window(q, lowest)
    return build_quotient(window, mesh_relators(q, lowest), -lowest)


def mesh_hom(frag: MeshFragment, x: RepetitiveVertex, y: RepetitiveVertex,
             category: GradedQuotientAlgebra | None = None) -> MeshHom:
    """Paths ``x -> y`` modulo mesh relators, with the Happel prediction.

    The result is ``Hom(h(y), h(x)) = Hom(P_q(y), tau^{-(l(y)-l(x))} P_q(x))``.
    """
    q = frag.quiver
    for z in (x, y):
        if z.vertex not in q.vertices or not (-frag.depth <= z.level <= 0):
            raise OutOfFragmentError(f"{z.id()} is outside the knitted fragment")
    if x.level > y.level:
        raise QuiverError("mesh_hom needs level(x) <= level(y)")
    w = y.level - x.level
    # translate so the target sits at level 0; the window only needs depth w
    sx, sy = RepetitiveVertex(x.vertex, -w), RepetitiveVertex(y.vertex, 0)
    if category is None:
        window = repetitive_window(q, -w)
        keep = {(sx.id(), sy.id())}
        category = build_quotient(window, mesh_relators(q, -w), w, block_filter=lambda s, t: (s, t) in keep)
    basis = category.basis((sx.id(), sy.id(), w, 0))
    return MeshHom(x, y, basis, happel_hom_dim(frag, y.vertex, x.vertex, w))


def mesh_hom_table(frag: MeshFragment, max_weight: int) -> dict[tuple[str, str, int], tuple[int, int]]:
    """``(i, j, w) -> (mesh dimension, Happel prediction)`` for targets at level 0."""
    cat = mesh_category(frag.quiver, -max_weight)
    out = {}
    for w in range(max_weight + 1):
        for i in frag.quiver.vertices:
            for j in frag.quiver.vertices:
                h = mesh_hom(frag, RepetitiveVertex(i, -w), RepetitiveVertex(j, 0), cat)
                out[(i, j, w)] = (h.dim, h.predicted)
    return out

