"""Homology retractions, planar binary trees and homotopy transfer.

For every block (source, target, weight) and degree ``d`` the chain space
splits as ``C_d = H_d + B_d + K_d``: boundaries ``B_d``, a complement ``K_d``
spanned by the pivot columns of the differential, and homology
representatives ``H_d``, the cycles whose coordinates avoid the pivots of the
boundary echelon. ``phi`` sends ``B_d`` back to ``K_{d+1}`` and kills
``H_d + K_d``; this gives ``qj = 1``, ``d phi + phi d = 1 - jq`` and the side
conditions ``phi j = 0``, ``q phi = 0``, ``phi phi = 0``.

Transferred operations use homological degree, the differential of degree
-1 and the sign rule ``(f x g)(a x b) = (-1)^{|g||a|} f(a) x g(b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod
from typing import Iterator, NamedTuple, Optional

from .algebra import PathVector
from .ginzburg import BlockComplex, ChainBlock, fraction_str
from .linalg import Echelon, sparse_add
from .quiver import Path

HomBlock = tuple[str, str, int, int]


class RetractionError(AssertionError):
    pass


@dataclass(frozen=True)
class HomologyClass:
    label: str
    block: HomBlock
    representative: tuple  # sorted (path, coeff) pairs

    @property
    def source(self) -> str:
        return self.block[0]

    @property
    def target(self) -> str:
        return self.block[1]

    @property
    def weight(self) -> int:
        return self.block[2]

    @property
    def degree(self) -> int:
        return self.block[3]

    @property
    def is_unit(self) -> bool:
        s, t, w, d = self.block
        return s == t and w == 0 and d == 0 and self.label == f"e{s}"


@dataclass
class _DegreeData:
    paths: list[Path]
    columns: Optional[Echelon]  # echelon of d(paths), lives in degree d-1
    boundaries: Echelon  # echelon of d(degree d+1), tracked by preimage paths
    homology: list[dict]  # reduced echelon rows, each a cycle


class Retraction:
    """Homology of a BlockComplex with maps j, q and phi.

    ``reverse=True`` uses the reversed path order for every pivot choice,
    which produces a different valid retraction of the same complex.
    """

    def __init__(self, complex_: BlockComplex, reverse: bool = False):
        self.complex = complex_
        self.reverse = reverse
        self._data: dict[tuple[ChainBlock, int], _DegreeData] = {}
        self.classes: list[HomologyClass] = []
        self._phi: dict[Path, PathVector] = {}
        self._q: dict[Path, dict] = {}
        self._build()
        self.by_label = {h.label: h for h in self.classes}

    def _key(self):
        c = self.complex
        rank = {}
        for blk in c.chains.values():
            for ps in blk:
                for i, p in enumerate(ps):
                    rank[p] = -i if self.reverse else i
        return rank.__getitem__

    def _build(self) -> None:
        c = self.complex
        key = self._kc = self._key()
        for blk in sorted(c.chains, key=lambda b: (b[2], b[0], b[1])):
            degs = c.chains[blk]
            columns: list[Optional[Echelon]] = []
            kernels: list[list[dict]] = []
            for d, ps in enumerate(degs):
                if d == 0:
                    columns.append(None)
                    kernels.append([{p: 1} for p in ps])
                    continue
                ech = Echelon(key=key, track=True)
                ker = []
                for p in ps:
                    image = c.d_path(p)
                    res, comb = ech.reduce(image)
                    if res:
                        ech.add(image, tag=p)
                    else:
                        z = {p: 1}
                        sparse_add(z, comb, -1)
                        ker.append(z)
                columns.append(ech)
                kernels.append(ker)
            for d, ps in enumerate(degs):
                if not ps:
                    continue
                bnd = columns[d + 1] if d + 1 < len(degs) and columns[d + 1] is not None else Echelon(key=key, track=True)
                hom = Echelon(key=key)
                for z in kernels[d]:
                    hom.add(bnd.reduce(z)[0])
                rows = [hom.rows[p] for p in sorted(hom.rows, key=key)]
                self._data[(blk, d)] = _DegreeData(ps, columns[d], bnd, rows)
                for row, pivot in zip(rows, sorted(hom.rows, key=key)):
                    rep = tuple(sorted(row.items(), key=lambda kv: key(kv[0])))
                    self.classes.append(HomologyClass(pivot.label(), blk + (d,), rep))

    # -- the three maps ---------------------------------------------------

    def _split(self, p: Path) -> tuple[dict, PathVector]:
        c = self.complex
        data = self._data[(c.block_of(p), c.degree(p))]
        v = {p: 1}
        if data.columns is not None:
            image = c.d_path(p)
            if image:
                k = data.columns.reduce(image)[1]
                sparse_add(v, k, -1)
        residual, pre = data.boundaries.reduce(v)
        q = {}
        for row in data.homology:
            pivot = min(row, key=self._key_cached)
            x = residual.get(pivot)
            if x:
                q[pivot.label()] = x
        return q, PathVector(pre)

    @property
    def _key_cached(self):
        return self._kc

    def _path_maps(self, p: Path):
        if p not in self._q:
            self._q[p], self._phi[p] = self._split(p)
        return self._q[p], self._phi[p]

    def q(self, v: dict) -> dict[str, Fraction]:
        out: dict = {}
        for p, c in v.items():
            sparse_add(out, self._path_maps(p)[0], c)
        return out

    def phi(self, v: dict) -> PathVector:
        out = PathVector()
        for p, c in v.items():
            sparse_add(out, self._path_maps(p)[1], c)
        return out

    def j(self, label: str) -> PathVector:
        return PathVector(dict(self.by_label[label].representative))

    def j_vector(self, coords: dict[str, Fraction]) -> PathVector:
        out = PathVector()
        for lab, c in coords.items():
            sparse_add(out, self.j(lab), c)
        return out

    # -- checks -----------------------------------------------------------

    def block_dims(self) -> dict[HomBlock, int]:
        out: dict[HomBlock, int] = {}
        for h in self.classes:
            out[h.block] = out.get(h.block, 0) + 1
        return out

    def verify(self) -> dict[str, int]:
        """Check the five retraction identities on every basis element."""
        c = self.complex
        checked = 0
        for h in self.classes:
            jh = self.j(h.label)
            if c.d(jh):
                raise RetractionError(f"representative of {h.label} is not a cycle")
            if self.q(jh) != {h.label: 1}:
                raise RetractionError(f"qj != 1 on {h.label}")
            if self.phi(jh):
                raise RetractionError(f"phi j != 0 on {h.label}")
        for p in c.paths():
            e = {p: 1}
            ph = self.phi(e)
            lhs = c.d(ph)
            sparse_add(lhs, self.phi(c.d_path(p)))
            rhs = PathVector(e) - self.j_vector(self.q(e))
            if PathVector(lhs) - rhs:
                raise RetractionError(f"d phi + phi d != 1 - jq on {p.label()}")
            if self.q(ph):
                raise RetractionError(f"q phi != 0 on {p.label()}")
            if self.phi(ph):
                raise RetractionError(f"phi phi != 0 on {p.label()}")
            checked += 1
        return {"paths_checked": checked, "classes": len(self.classes)}


def homology_and_retraction(c: BlockComplex, reverse: bool = False) -> Retraction:
    return Retraction(c, reverse=reverse)


class GaugedRetraction:
    """``phi`` replaced by the normalized homotopy.

    First ``(1 - jq) phi (1 - jq)``, then ``phi d phi`` of that; ``j`` and ``q``
    are unchanged. On a retraction that already satisfies the side
    conditions this is the identity.
    """

    def __init__(self, base):
        self.base = base
        self.complex = base.complex
        self.classes = base.classes
        self.by_label = base.by_label

    def _proj(self, v: dict) -> PathVector:
        return PathVector(v) - self.base.j_vector(self.base.q(v))

    def _phi1(self, v: dict) -> PathVector:
        return self._proj(self.base.phi(self._proj(v)))

    def phi(self, v: dict) -> PathVector:
        return self._phi1(self.complex.d(self._phi1(v)))

    def q(self, v):
        return self.base.q(v)

    def j(self, label):
        return self.base.j(label)

    def j_vector(self, coords):
        return self.base.j_vector(coords)


class RebasedRetraction:
    """Representatives shifted by boundaries: ``j' = j + b``.

    For each class in a block with nonzero boundaries the first boundary
    echelon row is added to its representative; ``q`` is unchanged and
    ``phi`` is corrected so all identities keep holding.
    """

    def __init__(self, base: Retraction):
        self.base = base
        self.complex = base.complex
        self._shift: dict[str, tuple[dict, PathVector]] = {}
        classes = []
        for h in base.classes:
            data = base._data[(h.block[:3], h.block[3])]
            bnd = data.boundaries
            if bnd.rows:
                pivot = sorted(bnd.rows, key=base._key_cached)[0]
                b = dict(bnd.rows[pivot])
                pre = PathVector(bnd.certs[pivot])
                self._shift[h.label] = (b, pre)
                rep = dict(h.representative)
                sparse_add(rep, b)
                classes.append(HomologyClass(h.label, h.block, tuple(sorted(rep.items()))))
            else:
                classes.append(h)
        self.classes = classes
        self.by_label = {h.label: h for h in classes}

    def q(self, v):
        return self.base.q(v)

    def j(self, label: str) -> PathVector:
        return PathVector(dict(self.by_label[label].representative))

    def j_vector(self, coords):
        out = PathVector()
        for lab, c in coords.items():
            sparse_add(out, self.j(lab), c)
        return out

    def phi(self, v: dict) -> PathVector:
        out = self.base.phi(v)
        for lab, a in self.base.q(v).items():
            if lab in self._shift:
                sparse_add(out, self._shift[lab][1], -a)
        return out

    def verify(self) -> dict[str, int]:
        return Retraction.verify(self)  # type: ignore[arg-type]


# -- planar binary trees -------------------------------------------------------


class PBRTree(NamedTuple):
    """A planar binary rooted tree; leaves are ``None`` children."""

    left: Optional["PBRTree"]
    right: Optional["PBRTree"]

    @property
    def leaves(self) -> int:
        return leaf_count(self)

    def __str__(self) -> str:
        return tree_str(self)


def leaf_count(t: Optional[PBRTree]) -> int:
    return 1 if t is None else leaf_count(t.left) + leaf_count(t.right)


def tree_str(t: Optional[PBRTree]) -> str:
    return "x" if t is None else f"({tree_str(t.left)}{tree_str(t.right)})"


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple[Optional[PBRTree], ...]:
    if n == 1:
        return (None,)
    out = []
    for k in range(1, n):
        for left in _trees(k):
            for right in _trees(n - k):
                out.append(PBRTree(left, right))
    return tuple(out)


def enumerate_pbr(n: int) -> list[PBRTree]:
    """All planar binary trees with ``n`` leaves, by left-subtree size, then recursively."""
    if n < 2:
        raise ValueError("need at least two leaves")
    return list(_trees(n))


def _layout(t: PBRTree) -> tuple[list[int], list[int]]:
    """Internal vertices in horizontal (preorder) and vertical (inorder) order.

    The root sits leftmost, every subtree lies to the right of its parent, and
    a left subtree lies below its parent, which lies below the right subtree.
    Vertices are numbered by preorder; both lists hold those numbers.
    """
    horizontal: list[int] = []
    vertical: list[int] = []
    counter = [0]

    def walk(node: Optional[PBRTree]) -> list[int]:
        if node is None:
            return []
        me = counter[0]
        counter[0] += 1
        horizontal.append(me)
        below = walk(node.left)
        above = walk(node.right)
        return below + [me] + above

    vertical = walk(t)
    return horizontal, vertical


def tree_permutation(t: PBRTree) -> tuple[int, ...]:
    """``sigma(i) = v(h^{-1}(i))``, one-based."""
    horizontal, vertical = _layout(t)
    height = {v: i + 1 for i, v in enumerate(vertical)}
    return tuple(height[v] for v in horizontal)


def permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def tree_sign(t: PBRTree) -> int:
    return permutation_sign(tree_permutation(t))


def is_231_avoiding(perm) -> bool:
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if perm[k] < perm[i] < perm[j]:
                    return False
    return True


# -- transfer ------------------------------------------------------------------


def evaluate_mu_T(t: PBRTree, r, c: BlockComplex, inputs: tuple[str, ...]) -> dict[str, Fraction]:
    """``q nu_T j^{x n}`` on homology basis labels, with Koszul signs."""
    if leaf_count(t) != len(inputs):
        raise ValueError("tree and input arity differ")
    degrees = [r.by_label[x].degree for x in inputs]

    def nu(node: Optional[PBRTree], lo: int, hi: int) -> PathVector:
        # value of the subtree on inputs[lo:hi], before the outgoing edge
        if node is None:
            return r.j(inputs[lo])
        mid = lo + leaf_count(node.left)
        left = nu(node.left, lo, mid)
        right = nu(node.right, mid, hi)
        if node.left is not None:
            left = r.phi(left)
        if node.right is not None:
            right = r.phi(right)
        sign = -1 if ((hi - mid - 1) * sum(degrees[lo:mid])) % 2 else 1
        return (left * right).scaled(sign)

    return r.q(nu(t, 0, len(inputs)))


@dataclass
class AInfinityTable:
    max_weight: int
    n_max: int
    classes: dict[str, HomologyClass]
    mu: dict[int, dict[tuple[str, ...], dict[str, Fraction]]] = field(default_factory=dict)

    def get(self, inputs: tuple[str, ...]) -> dict[str, Fraction]:
        return self.mu.get(len(inputs), {}).get(tuple(inputs), {})

    def value(self, inputs: tuple[str, ...]) -> dict[str, Fraction]:
        """Like ``get`` but also accepts units, using strict unitality."""
        units = [k for k, x in enumerate(inputs) if self.classes[x].is_unit]
        if not units:
            return self.get(inputs)
        if len(inputs) != 2:
            return {}
        a, b = (self.classes[x] for x in inputs)
        if a.target != b.source:
            return {}
        return {inputs[1] if units[0] == 0 else inputs[0]: 1}

    def apply(self, inputs: list[dict[str, Fraction]]) -> dict[str, Fraction]:
        """Multilinear extension to linear combinations of classes."""
        return multilinear(self.value, inputs)

    def entries(self, n: int) -> dict[tuple[str, ...], dict[str, Fraction]]:
        return self.mu.get(n, {})

    def to_json(self) -> dict:
        ops = []
        for n in sorted(self.mu):
            for inputs in sorted(self.mu[n]):
                out = self.mu[n][inputs]
                ops.append({
                    "n": n,
                    "inputs": list(inputs),
                    "output": [{"label": lab, "coeff": fraction_str(c)} for lab, c in sorted(out.items())],
                })
        return {
            "max_weight": self.max_weight,
            "n_max": self.n_max,
            "classes": [
                {"label": h.label, "source": h.source, "target": h.target, "weight": h.weight, "degree": h.degree}
                for h in sorted(self.classes.values(), key=lambda h: (h.weight, h.degree, h.source, h.target, h.label))
            ],
            "operations": ops,
        }


def _block_pool(classes) -> tuple[dict, dict]:
    by_block: dict[HomBlock, list[str]] = {}
    for h in sorted((h for h in classes if not h.is_unit), key=lambda h: h.label):
        by_block.setdefault(h.block, []).append(h.label)
    by_source: dict[str, list[HomBlock]] = {}
    for b in sorted(by_block):
        by_source.setdefault(b[0], []).append(b)
    return by_block, by_source


def composable_blocks(classes, n: int, max_weight: int) -> Iterator[tuple[tuple[HomBlock, ...], list[list[str]]]]:
    """Composable n-sequences of non-unit blocks with total weight <= max_weight, with their labels."""
    by_block, by_source = _block_pool(classes)
    every = sorted(by_block)

    def grow(prefix: list[HomBlock], weight: int):
        if len(prefix) == n:
            yield tuple(prefix), [by_block[b] for b in prefix]
            return
        for b in (by_source.get(prefix[-1][1], []) if prefix else every):
            if weight + b[2] <= max_weight:
                prefix.append(b)
                yield from grow(prefix, weight + b[2])
                prefix.pop()

    yield from grow([], 0)


def composable_tuples(classes, n: int, max_weight: int) -> Iterator[tuple[str, ...]]:
    """Composable n-tuples of non-unit classes with total weight <= max_weight."""
    for _, labels in composable_blocks(classes, n, max_weight):
        yield from product(*labels)


def output_block(blocks: tuple[HomBlock, ...]) -> HomBlock:
    """Block of ``mu_n`` on inputs from ``blocks`` (degree ``n - 2``)."""
    return (blocks[0][0], blocks[-1][1], sum(b[2] for b in blocks), sum(b[3] for b in blocks) + len(blocks) - 2)


class _Transfer:
    """Signed sum over trees computed by splitting at the root.

    With ``sgn(T) = (-1)^{|T_left| - 1} sgn(T_left) sgn(T_right)`` the sum
    over all trees of a tuple factors through sums over trees of its two
    parts, so every sub-tuple is evaluated once.
    """

    def __init__(self, c: BlockComplex, r):
        self.c = c
        self.r = r
        self.degree = {h.label: h.degree for h in r.classes}
        self._inner: dict[tuple[str, ...], PathVector] = {}
        self._edge: dict[tuple[str, ...], PathVector] = {}

    def nu(self, xs: tuple[str, ...]) -> PathVector:
        hit = self._inner.get(xs)
        if hit is not None:
            return hit
        out = PathVector()
        n = len(xs)
        deg_prefix = 0
        for k in range(1, n):
            deg_prefix += self.degree[xs[k - 1]]
            left = self.edge(xs[:k])
            if not left:
                continue
            right = self.edge(xs[k:])
            if not right:
                continue
            sign = -1 if (k - 1 + (n - k - 1) * deg_prefix) % 2 else 1
            sparse_add(out, left * right, sign)
        self._inner[xs] = out
        return out

    def edge(self, xs: tuple[str, ...]) -> PathVector:
        hit = self._edge.get(xs)
        if hit is not None:
            return hit
        out = self.r.j(xs[0]) if len(xs) == 1 else self.r.phi(self.nu(xs))
        self._edge[xs] = out
        return out

    def mu(self, xs: tuple[str, ...]) -> dict[str, Fraction]:
        return self.r.q(self.nu(xs))


def transfer(c: BlockComplex, r, n_max: int, n_min: int = 2) -> AInfinityTable:
    """Transferred operations mu_n_min..mu_n_max on every composable non-unit tuple.

    Units are strict: ``mu_2(e, x) = x`` and higher operations vanish on them
    because the side conditions hold, so they are not stored.
    """
    if n_max < 2 or n_min < 2:
        raise ValueError("arities start at 2")
    engine = _Transfer(c, r)
    table = AInfinityTable(c.max_weight, n_max, {h.label: h for h in r.classes})
    nonzero = {h.block for h in r.classes}
    for n in range(n_min, n_max + 1):
        entries = {}
        for blocks, labels in composable_blocks(r.classes, n, c.max_weight):
            if output_block(blocks) not in nonzero:  # q vanishes there
                continue
            for xs in product(*labels):
                out = engine.mu(xs)
                if out:
                    entries[xs] = out
        table.mu[n] = entries
    return table


def transfer_by_trees(c: BlockComplex, r, inputs: tuple[str, ...]) -> dict[str, Fraction]:
    """Reference implementation: the explicit signed sum over all trees."""
    out: dict = {}
    for t in enumerate_pbr(len(inputs)):
        sparse_add(out, evaluate_mu_T(t, r, c, inputs), tree_sign(t))
    return out


# -- relations -----------------------------------------------------------------


@dataclass
class RelationReport:
    checked: dict[int, int]
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "checked": {str(n): k for n, k in sorted(self.checked.items())},
            "violations": len(self.violations),
            "examples": self.violations[:20],
        }


def multilinear(get, inputs: list[dict[str, Fraction]]) -> dict[str, Fraction]:
    """Extend ``get`` (a map on label tuples) multilinearly."""
    out: dict = {}

    def rec(k: int, labels: list[str], coeff: Fraction):
        if k == len(inputs):
            val = get(tuple(labels))
            if val:
                sparse_add(out, val, coeff)
            return
        for lab, c in inputs[k].items():
            labels.append(lab)
            rec(k + 1, labels, coeff * c)
            labels.pop()

    rec(0, [], 1)
    return out


def stasheff(table: AInfinityTable, xs: tuple[str, ...]) -> dict[str, Fraction]:
    """Left side of the n-th relation on ``xs`` (``mu_1 = 0``)."""
    n = len(xs)
    deg = [table.classes[x].degree for x in xs]
    total: dict = {}
    for qq in range(2, n):
        for p in range(0, n - qq + 1):
            rr = n - p - qq
            inner = table.get(xs[p:p + qq])
            if not inner:
                continue
            sign = (p + qq * rr) + (qq - 2) * sum(deg[:p])
            args = [{x: 1} for x in xs[:p]] + [inner] + [{x: 1} for x in xs[p + qq:]]
            sparse_add(total, table.apply(args), -1 if sign % 2 else 1)
    return total


def check_ainf_relations(table: AInfinityTable, c: BlockComplex | None = None, n_max: int | None = None,
                         retraction=None) -> RelationReport:
    """Evaluate the Stasheff relations for 3 <= n <= n_max on composable tuples.

    With a complex and retraction, ``mu_2`` is also compared with the product
    of representatives read back through ``q``.
    """
    n_max = table.n_max if n_max is None else n_max
    checked: dict[int, int] = {}
    violations: list[dict] = []
    classes = list(table.classes.values())
    if c is not None and retraction is not None:
        count = 0
        for xs in composable_tuples(classes, 2, table.max_weight):
            direct = retraction.q(retraction.j(xs[0]) * retraction.j(xs[1]))
            if direct != table.get(xs):
                violations.append({"n": 2, "inputs": list(xs), "kind": "product"})
            count += 1
        checked[2] = count
    active = {n for n, ops in table.mu.items() if ops}
    for n in range(3, n_max + 1):
        # a relation term pairs an inner mu_k with an outer mu_{n-k+1}; drop those with an empty factor
        live = any(k in active and (n - k + 1 == 2 or n - k + 1 in active) for k in range(2, n))
        count = 0
        for _, labels in composable_blocks(classes, n, table.max_weight):
            if not live:
                count += prod(len(x) for x in labels)
                continue
            for xs in product(*labels):
                val = stasheff(table, xs)
                if val:
                    violations.append({
                        "n": n, "inputs": list(xs),
                        "value": [{"label": k, "coeff": fraction_str(v)} for k, v in sorted(val.items())],
                    })
                count += 1
        checked[n] = count
    return RelationReport(checked, violations)


# -- gauge transformations -----------------------------------------------------


def _compositions(n: int, parts=(1, 2)) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for p in parts:
        if p <= n:
            for rest in _compositions(n - p, parts):
                yield (p,) + rest


def gauge_transform(table: AInfinityTable, f2: dict[tuple[str, str], dict[str, Fraction]]) -> AInfinityTable:
    """Push the structure forward along the isomorphism ``(id, f2)``.

    ``f2`` has degree 1 and is zero on units. The new operations ``nu_n`` are
    solved from the morphism identity
    ``sum (-1)^{p+qr} f(id^p x mu_q x id^r) = sum (-1)^D nu_d(f_i1 x ... x f_id)``.
    """
    classes = table.classes
    deg = {x: h.degree for x, h in classes.items()}

    def f2_get(xs):
        return f2.get(xs, {})

    out = AInfinityTable(table.max_weight, table.n_max, classes)
    out.mu[2] = dict(table.mu.get(2, {}))
    for n in range(3, table.n_max + 1):
        entries = {}
        for xs in composable_tuples(classes.values(), n, table.max_weight):
            args = [{x: 1} for x in xs]
            val = dict(table.get(xs))
            # f2 o (id x mu_{n-1}) and f2 o (mu_{n-1} x id)
            inner = table.get(xs[1:])
            if inner:
                sign = -1 if (1 + (n - 3) * deg[xs[0]]) % 2 else 1
                sparse_add(val, multilinear(f2_get, [args[0], inner]), sign)
            inner = table.get(xs[:-1])
            if inner:
                sparse_add(val, multilinear(f2_get, [inner, args[-1]]), -1 if (n - 1) % 2 else 1)
            # nu_d o (f_i1 x ... x f_id) with at least one f2
            for parts in _compositions(n):
                d = len(parts)
                if d == n:
                    continue
                sign = sum((d - k) * (i - 1) for k, i in enumerate(parts, start=1))
                pieces, pos, before = [], 0, 0
                for i in parts:
                    if i == 1:
                        pieces.append(args[pos])
                    else:
                        sign += before
                        pieces.append(f2_get(xs[pos:pos + 2]))
                    before += sum(deg[x] for x in xs[pos:pos + i])
                    pos += i
                if any(not p for p in pieces):
                    continue
                sparse_add(val, out.apply(pieces), 1 if sign % 2 else -1)
            if val:
                entries[xs] = val
        out.mu[n] = entries
    return out
