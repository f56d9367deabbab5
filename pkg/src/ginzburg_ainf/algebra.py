"""Bigraded path algebras, their quotients by homogeneous relators, and the
preprojective algebra.

A block is ``(source, target, weight, degree)``. Each block of a quotient is
the path space modulo the span of ``p * r * q`` over relators ``r``; the
normal-form basis is the set of paths that are not pivots of the reduced
echelon form of that span (paths ordered by weight, length, arrow ids).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .linalg import Echelon, exact, sparse_add
from .quiver import Arrow, Path, Quiver, QuiverError, path_degree, path_weight, paths_from

Block = tuple[str, str, int, int]


class InhomogeneousRelatorError(ValueError):
    pass


class TruncationOverflowError(ArithmeticError):
    pass


class PathVector(dict):
    """Finite linear combination of paths with Fraction coefficients, no zeros."""

    @classmethod
    def of(cls, path: Path, coeff=1) -> "PathVector":
        return cls({path: exact(Fraction(coeff))}) if coeff else cls()

    def __add__(self, other: dict) -> "PathVector":
        return sparse_add(PathVector(self), other)

    def __sub__(self, other: dict) -> "PathVector":
        return sparse_add(PathVector(self), other, -1)

    def __neg__(self) -> "PathVector":
        return PathVector({p: -c for p, c in self.items()})

    def scaled(self, c) -> "PathVector":
        c = exact(Fraction(c))
        return PathVector({p: x * c for p, x in self.items()}) if c else PathVector()

    def __mul__(self, other: dict) -> "PathVector":
        """Concatenation product: "self then other"."""
        out = PathVector()
        for p, x in self.items():
            for q, y in other.items():
                if p.target == q.source:
                    r = Path(p.source, q.target, p.arrows + q.arrows)
                    v = out.get(r, 0) + x * y
                    if v:
                        out[r] = v
                    else:
                        out.pop(r)
        return out

    def sorted_items(self, key=None):
        return sorted(self.items(), key=(lambda kv: key(kv[0])) if key else None)


def block_of(q: Quiver, p: Path) -> Block:
    return (p.source, p.target, path_weight(q, p), path_degree(q, p))


def homogeneous_block(q: Quiver, v: dict) -> Block:
    blocks = {block_of(q, p) for p in v}
    if len(blocks) != 1:
        raise InhomogeneousRelatorError(f"relator spans blocks {sorted(blocks)}")
    return blocks.pop()


@dataclass
class QuotientBlock:
    paths: list[Path]
    echelon: Echelon
    basis: list[Path]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class GradedQuotientAlgebra:
    quiver: Quiver
    relators: list[PathVector]
    max_weight: int
    blocks: dict[Block, QuotientBlock] = field(repr=False)

    def sort_key(self, p: Path):
        return (path_weight(self.quiver, p), len(p.arrows), p.arrows)

    def block_dims(self) -> dict[Block, int]:
        return {b: blk.dim for b, blk in self.blocks.items()}

    def basis(self, block: Block) -> list[Path]:
        blk = self.blocks.get(block)
        return list(blk.basis) if blk else []

    def block_of(self, p: Path) -> Block:
        return block_of(self.quiver, p)

    def reduce(self, v: dict) -> PathVector:
        """Normal form of ``v``; raises if a term exceeds the truncation."""
        by_block: dict[Block, dict] = defaultdict(dict)
        for p, c in v.items():
            b = self.block_of(p)
            if b[2] > self.max_weight:
                raise TruncationOverflowError(f"weight {b[2]} exceeds truncation {self.max_weight}")
            by_block[b][p] = c
        out = PathVector()
        for b, part in by_block.items():
            blk = self.blocks.get(b)
            res = blk.echelon.reduce(part)[0] if blk else part
            out.update(res)
        return out

    def coordinates(self, v: dict, block: Block) -> list[Fraction]:
        red = self.reduce(v)
        return [red.get(p, Fraction(0)) for p in self.basis(block)]

    def multiply(self, x: dict, y: dict) -> PathVector:
        return multiply(self, x, y)

    def generator(self, arrow_id: str) -> PathVector:
        a = self.quiver.arrow(arrow_id)
        return self.reduce({Path(a.source, a.target, (a.id,)): 1})

    def evaluate_word(self, word: tuple[str, ...], start: str | None = None) -> PathVector:
        p = Path(start, start, ()) if not word else Path(
            self.quiver.arrow(word[0]).source, self.quiver.arrow(word[-1]).target, tuple(word)
        )
        return self.reduce({p: 1})


def multiply(alg: GradedQuotientAlgebra, x: dict, y: dict) -> PathVector:
    """Product in the quotient; raises TruncationOverflowError past max_weight."""
    return alg.reduce(PathVector(x) * y)


def _all_paths(q: Quiver, max_weight: int) -> dict[str, list[Path]]:
    return {v: paths_from(q, v, max_weight) for v in q.vertices}


def build_quotient(
    q: Quiver,
    relators: Iterable[dict],
    max_weight: int,
    block_filter: Callable[[str, str], bool] | None = None,
) -> GradedQuotientAlgebra:
    """Truncated quotient of the path algebra of ``q`` by homogeneous relators.

    ``block_filter(source, target)`` optionally restricts which endpoint pairs
    are computed.
    """
    if max_weight < 0:
        raise QuiverError("max_weight must be non-negative")
    rels = [PathVector(r) for r in relators if r]
    rel_blocks = [homogeneous_block(q, r) for r in rels]
    keep = block_filter or (lambda s, t: True)

    starting = _all_paths(q, max_weight)
    ending: dict[str, list[Path]] = defaultdict(list)
    for ps in starting.values():
        for p in ps:
            ending[p.target].append(p)

    def key(p: Path):
        return (path_weight(q, p), len(p.arrows), p.arrows)

    weights = {p: path_weight(q, p) for ps in starting.values() for p in ps}
    grouped: dict[Block, list[Path]] = defaultdict(list)
    for src, ps in starting.items():
        for p in ps:
            if keep(src, p.target):
                grouped[(src, p.target, weights[p], path_degree(q, p))].append(p)
    echelons = {b: Echelon(key=key) for b in grouped}
    if block_filter is None:
        _close_ideal(q, rels, max_weight, echelons, weights)
    else:
        _ideal_by_contexts(q, rels, rel_blocks, max_weight, echelons, weights, starting, ending, keep)

    blocks = {}
    for b in sorted(grouped, key=lambda b: (b[2], b[3], b[0], b[1])):
        paths = sorted(grouped[b], key=key)
        ech = echelons[b]
        basis = [p for p in paths if p not in ech.rows]
        blocks[b] = QuotientBlock(paths, ech, basis)
    return GradedQuotientAlgebra(q, rels, max_weight, blocks)


def _close_ideal(q: Quiver, rels, max_weight: int, echelons, weights) -> None:
    """Two-sided ideal as the closure of the relators under multiplication by arrows.

    Only vectors that enlarge the span are extended, since the images of a
    dependent vector lie in the span of images already queued.
    """
    work = [dict(r) for r in rels]
    while work:
        v = work.pop()
        p0 = next(iter(v))
        w = weights.get(p0)
        if w is None or w > max_weight:
            continue
        if echelons[block_of(q, p0)].add(v) is None:
            continue
        for a in q.incoming(p0.source):
            if w + a.weight <= max_weight:
                work.append({Path(a.source, p.target, (a.id,) + p.arrows): c for p, c in v.items()})
        for a in q.outgoing(p0.target):
            if w + a.weight <= max_weight:
                work.append({Path(p.source, a.target, p.arrows + (a.id,)): c for p, c in v.items()})


def _ideal_by_contexts(q, rels, rel_blocks, max_weight, echelons, weights, starting, ending, keep) -> None:
    """Ideal restricted to the kept blocks, from every context ``left * r * right``."""
    for r, (s, t, wr, dr) in zip(rels, rel_blocks):
        if wr > max_weight:
            continue
        for left in ending[s]:
            wl = weights[left]
            if wl + wr > max_weight:
                continue
            for right in starting[t]:
                wrt = weights[right]
                if wl + wr + wrt > max_weight or not keep(left.source, right.target):
                    continue
                vec = {}
                for p, c in r.items():
                    vec[Path(left.source, right.target, left.arrows + p.arrows + right.arrows)] = c
                b = (left.source, right.target, wl + wr + wrt, path_degree(q, left) + dr + path_degree(q, right))
                echelons[b].add(vec)


def star(arrow_id: str) -> str:
    return arrow_id + "*"


def double_quiver(q: Quiver, extra: Iterable[Arrow] = ()) -> Quiver:
    """Original arrows at (0, 0) and reversed arrows ``a*`` at (1, 0)."""
    arrows = [Arrow(a.id, a.source, a.target, 0, 0) for a in q.arrows]
    arrows += [Arrow(star(a.id), a.target, a.source, 1, 0) for a in q.arrows]
    arrows += list(extra)
    ids = [a.id for a in arrows]
    if len(set(ids)) != len(ids):
        raise QuiverError("arrow ids clash after doubling")
    return Quiver(q.vertices, tuple(arrows))


def preprojective_relators(q: Quiver) -> dict[str, PathVector]:
    """``rho_i``: outgoing ``a then a*`` with sign +, incoming ``b* then b`` with sign -."""
    rho = {}
    for i in q.vertices:
        v = PathVector()
        for a in q.outgoing(i):
            sparse_add(v, {Path(i, i, (a.id, star(a.id))): 1})
        for b in q.incoming(i):
            sparse_add(v, {Path(i, i, (star(b.id), b.id)): -1})
        rho[i] = v
    return rho


def preprojective(q: Quiver, max_weight: int) -> GradedQuotientAlgebra:
    return build_quotient(double_quiver(q), preprojective_relators(q).values(), max_weight)


def hilbert_series(alg) -> dict[tuple[int, int], int]:
    """Total dimension per (weight, degree) over all endpoint pairs."""
    out: dict[tuple[int, int], int] = defaultdict(int)
    for (s, t, w, d), dim in alg.block_dims().items():
        out[(w, d)] += dim
    return dict(sorted(out.items()))


def hilbert_to_json(series: dict[tuple[int, int], int]) -> dict:
    return {"blocks": [{"w": w, "d": d, "dim": dim} for (w, d), dim in sorted(series.items())]}
