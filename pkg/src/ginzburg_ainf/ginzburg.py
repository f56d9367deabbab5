"""The Ginzburg dg algebra of an acyclic quiver, truncated by weight.

Arrows: ``a`` at (0, 0), ``a*`` at (1, 0) and a loop ``t<i>`` at (1, 1) for each
vertex, with ``d(t_i) = rho_i``. The differential has bidegree (0, -1) and is
extended by the Leibniz rule with sign ``(-1)^degree``; weight carries no sign.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import PathVector, double_quiver, preprojective_relators
from .linalg import sparse_add
from .quiver import Arrow, Path, Quiver, QuiverError, is_acyclic, path_degree, path_weight, paths_from

ChainBlock = tuple[str, str, int]


class NotAcyclicError(QuiverError):
    pass


class DifferentialError(AssertionError):
    pass


def loop_id(v: str) -> str:
    return f"t{v}"


@dataclass(frozen=True)
class GinzburgQuiver:
    base: Quiver
    quiver: Quiver
    differential: dict[str, PathVector] = field(hash=False, compare=False)

    def is_loop(self, arrow_id: str) -> bool:
        return arrow_id in self.differential


def build_ginzburg(q: Quiver) -> GinzburgQuiver:
    if not is_acyclic(q):
        raise NotAcyclicError("quiver is not acyclic")
    loops = [Arrow(loop_id(v), v, v, 1, 1) for v in q.vertices]
    hat = double_quiver(q, loops)
    rho = preprojective_relators(q)
    return GinzburgQuiver(q, hat, {loop_id(v): rho[v] for v in q.vertices})


@dataclass
class BlockComplex:
    """Truncated free dg path algebra split into blocks (source, target, weight).

    ``chains[block][d]`` lists the paths of degree ``d`` in that block, in
    the fixed order (length, then arrow ids).
    """

    ginzburg: GinzburgQuiver
    max_weight: int
    chains: dict[ChainBlock, list[list[Path]]]
    _d_cache: dict = field(default_factory=dict, repr=False)

    @property
    def quiver(self) -> Quiver:
        return self.ginzburg.quiver

    def degree(self, p: Path) -> int:
        return path_degree(self.quiver, p)

    def weight(self, p: Path) -> int:
        return path_weight(self.quiver, p)

    def block_of(self, p: Path) -> ChainBlock:
        return (p.source, p.target, self.weight(p))

    def d_path(self, p: Path) -> PathVector:
        hit = self._d_cache.get(p)
        if hit is not None:
            return hit
        out = PathVector()
        sign = 1
        for k, a in enumerate(p.arrows):
            image = self.ginzburg.differential.get(a)
            if image is not None:
                pre, post = p.arrows[:k], p.arrows[k + 1:]
                for r, c in image.items():
                    sparse_add(out, {Path(p.source, p.target, pre + r.arrows + post): c * sign})
            if self.quiver.arrow(a).degree % 2:
                sign = -sign
        self._d_cache[p] = out
        return out

    def d(self, v: dict) -> PathVector:
        out = PathVector()
        for p, c in v.items():
            sparse_add(out, self.d_path(p), c)
        return out

    def dims(self) -> dict[tuple[str, str, int, int], int]:
        return {
            (s, t, w, d): len(ps)
            for (s, t, w), degs in self.chains.items()
            for d, ps in enumerate(degs)
            if ps
        }

    def paths(self):
        for degs in self.chains.values():
            for ps in degs:
                yield from ps

    def verify(self) -> dict[str, int]:
        """Check d^2 = 0 and the Leibniz rule on every basis path and split.

        Raises DifferentialError on the first failure; returns counts.
        """
        squares = leibniz = 0
        for p in self.paths():
            if self.d(self.d_path(p)):
                raise DifferentialError(f"d^2 != 0 on {p.label()}")
            squares += 1
            for k in range(len(p.arrows) + 1):
                x = Path(p.source, self._target_after(p, k), p.arrows[:k])
                y = Path(x.target, p.target, p.arrows[k:])
                lhs = self.d_path(p)
                sign = -1 if self.degree(x) % 2 else 1
                rhs = PathVector(self.d_path(x)) * {y: 1}
                sparse_add(rhs, PathVector({x: sign}) * self.d_path(y))
                if PathVector(lhs) - rhs:
                    raise DifferentialError(f"Leibniz fails on {x.label()} * {y.label()}")
                leibniz += 1
        return {"d_squared_checked": squares, "leibniz_checked": leibniz}

    def _target_after(self, p: Path, k: int) -> str:
        return p.source if k == 0 else self.quiver.arrow(p.arrows[k - 1]).target

    def to_json(self) -> dict:
        blocks = []
        for (s, t, w), degs in sorted(self.chains.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            for d, ps in enumerate(degs):
                if not ps:
                    continue
                index = {p: i for i, p in enumerate(degs[d - 1])} if d else {}
                entries = []
                for col, p in enumerate(ps):
                    for r, c in sorted(self.d_path(p).items(), key=lambda kv: index[kv[0]]):
                        entries.append({"row": index[r], "col": col, "coeff": fraction_str(c)})
                blocks.append({
                    "source": s, "target": t, "weight": w, "degree": d,
                    "basis": [p.label() for p in ps],
                    "differential": entries,
                })
        return {
            "quiver": self.ginzburg.base.to_text(),
            "max_weight": self.max_weight,
            "arrows": [
                {"id": a.id, "source": a.source, "target": a.target, "weight": a.weight, "degree": a.degree}
                for a in self.quiver.arrows
            ],
            "differential": {
                t: [{"path": p.label(), "coeff": fraction_str(c)} for p, c in sorted(v.items())]
                for t, v in self.ginzburg.differential.items()
            },
            "product": "concatenation of basis paths",
            "blocks": blocks,
        }


def fraction_str(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def truncate_dg(gq: GinzburgQuiver, max_weight: int, verify: bool = True) -> BlockComplex:
    if max_weight < 0:
        raise QuiverError("max_weight must be non-negative")
    q = gq.quiver
    chains: dict[ChainBlock, list[list[Path]]] = defaultdict(lambda: [[] for _ in range(max_weight + 1)])
    for v in q.vertices:
        for p in paths_from(q, v, max_weight):
            chains[(p.source, p.target, path_weight(q, p))][path_degree(q, p)].append(p)
    for degs in chains.values():
        for ps in degs:
            ps.sort(key=lambda p: (len(p.arrows), p.arrows))
    c = BlockComplex(gq, max_weight, dict(chains))
    if verify:
        c.verify()
    return c
