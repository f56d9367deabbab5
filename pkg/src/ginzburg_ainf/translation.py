"""The derived translation algebra U, the twisted polynomial algebra and the
comparisons between them and the homology of the Ginzburg algebra.

``Omega`` is the doubled quiver plus arrows ``u<i>: nu(i) -> i`` of bidegree
``(N(i), 1)``. For an arrow ``a: s -> t`` of the doubled quiver, ``nu(a)`` is
the unique doubled arrow ``nu(s) -> nu(t)``, and the commutation relator is
``omega_a = u_s a - c(a) nu(a) u_t`` (paths read left to right) with
``c(a) = -1`` exactly when ``a`` and ``nu(a)`` are both original arrows.

U is the quotient of a window of the repetitive quiver (levels ``-W..0``)
with lifted ``u`` arrows by lifted mesh and commutation relators; block
``(i, j, w, d)`` of U is the space of paths ``(i, -w) -> (j, 0)`` of degree
``d``, that is ``Hom(P_j, tau^{-w} P_i [-d])``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebra import (
    GradedQuotientAlgebra, PathVector, TruncationOverflowError, build_quotient, double_quiver,
    hilbert_series, preprojective_relators, star,
)
from .ar_mesh import (
    DynkinData, MeshFragment, NotDynkinError, knit, mesh_relators, nakayama_and_N,
    rep_arrow_id, rep_vertex_id, repetitive_window,
)
from .ginzburg import BlockComplex, fraction_str
from .linalg import Echelon, kernel_basis, sparse_add
from .quiver import Arrow, Path, Quiver, QuiverError, dynkin_type, is_acyclic, path_weight
from .transfer import AInfinityTable, composable_tuples, gauge_transform

Block = tuple[str, str, int, int]


class NotARecognizedTriangleError(ValueError):
    pass


class FragmentTooSmallError(QuiverError):
    pass


def u_id(v: str) -> str:
    return f"u{v}"


# -- nu on arrows -----------------------------------------------------------------


@dataclass(frozen=True)
class ArrowTwist:
    image: str
    sign: int


def nakayama_on_arrows(q: Quiver, dyn: DynkinData) -> dict[str, ArrowTwist]:
    """``nu`` on the arrows of the doubled quiver, with the sign ``c(a)``."""
    qbar = double_quiver(q)
    original = {a.id for a in q.arrows}
    out = {}
    for a in qbar.arrows:
        s, t = dyn.nu[a.source], dyn.nu[a.target]
        matches = [b for b in qbar.arrows if b.source == s and b.target == t]
        if len(matches) != 1:
            raise QuiverError(f"no unique doubled arrow {s} -> {t} for nu({a.id})")
        b = matches[0]
        sign = -1 if (a.id in original and b.id in original) else 1
        out[a.id] = ArrowTwist(b.id, sign)
    return out


def omega_quiver(q: Quiver, dyn: DynkinData) -> Quiver:
    extra = [Arrow(u_id(i), dyn.nu[i], i, dyn.N[i], 1) for i in q.vertices]
    return double_quiver(q, extra)


def omega_relators(q: Quiver, dyn: DynkinData) -> list[PathVector]:
    twist = nakayama_on_arrows(q, dyn)
    qbar = double_quiver(q)
    rels = []
    for a in qbar.arrows:
        s, t = a.source, a.target
        tw = twist[a.id]
        v = PathVector()
        sparse_add(v, {Path(dyn.nu[s], t, (u_id(s), a.id)): 1})
        sparse_add(v, {Path(dyn.nu[s], t, (tw.image, u_id(t))): -tw.sign})
        rels.append(v)
    return rels


@dataclass
class TwistedPolynomialAlgebra:
    base: Quiver
    dynkin: DynkinData
    algebra: GradedQuotientAlgebra
    relators: list[PathVector]

    @property
    def quiver(self) -> Quiver:
        return self.algebra.quiver

    @property
    def max_weight(self) -> int:
        return self.algebra.max_weight

    def block_dims(self) -> dict[Block, int]:
        return {b: d for b, d in self.algebra.block_dims().items() if d}

    def basis_words(self, block: Block) -> list[Path]:
        return self.algebra.basis(block)

    def presentation(self) -> tuple[list[PathVector], dict[Block, list[Path]]]:
        return self.relators, {b: self.basis_words(b) for b in self.block_dims()}


def build_twisted(q: Quiver, max_weight: int) -> TwistedPolynomialAlgebra:
    dyn = nakayama_and_N(q)
    omega = omega_quiver(q, dyn)
    rels = list(preprojective_relators(q).values()) + omega_relators(q, dyn)
    alg = build_quotient(omega, rels, max_weight)
    return TwistedPolynomialAlgebra(q, dyn, alg, rels)


# -- U --------------------------------------------------------------------------


def _strip(x: str) -> str:
    return x.rsplit("@", 1)[0]


def project_path(p: Path) -> Path:
    """Forget levels: a window path becomes a path of Omega (or of the doubled quiver)."""
    return Path(_strip(p.source), _strip(p.target), tuple(_strip(a) for a in p.arrows))


@dataclass
class TranslationAlgebraU:
    base: Quiver
    max_weight: int
    fragment: MeshFragment
    dynkin: DynkinData | None
    window: GradedQuotientAlgebra
    letter_weight: dict[str, int] = field(repr=False)
    relators: list[PathVector] = field(repr=False)

    def _window_block(self, block: Block):
        i, j, w, d = block
        return (rep_vertex_id(i, -w), rep_vertex_id(j, 0), w, d)

    def block_dims(self) -> dict[Block, int]:
        out = {}
        for (s, t, w, d), blk in self.window.blocks.items():
            if t.endswith("@0") and s.endswith(f"@{-w}") and blk.dim:
                out[(_strip(s), _strip(t), w, d)] = blk.dim
        return out

    def basis(self, block: Block) -> list[Path]:
        return self.window.basis(self._window_block(block))

    def basis_words(self, block: Block) -> list[Path]:
        return [project_path(p) for p in self.basis(block)]

    def presentation(self) -> tuple[list[PathVector], dict[Block, list[Path]]]:
        seen, rels = set(), []
        for r in self.relators:
            pr = PathVector({project_path(p): c for p, c in r.items()})
            key = tuple(sorted(pr.items()))
            if key not in seen:
                seen.add(key)
                rels.append(pr)
        return rels, {b: self.basis_words(b) for b in self.block_dims()}

    def lift(self, word: Path) -> Path:
        """The window path ending at level 0 that projects to ``word``."""
        level = 0
        arrows = []
        for a in reversed(word.arrows):
            level -= self.letter_weight[a]
            arrows.append(rep_arrow_id(a, level))
        if -level > self.max_weight:
            raise TruncationOverflowError(f"weight {-level} exceeds truncation {self.max_weight}")
        return Path(rep_vertex_id(word.source, level), rep_vertex_id(word.target, 0), tuple(reversed(arrows)))

    def evaluate(self, word: Path) -> tuple[Block, dict[int, Fraction]]:
        p = self.lift(word)
        red = self.window.reduce({p: 1})
        w = int(p.source.rsplit("@", 1)[1]) * -1
        block = (word.source, word.target, w, sum(1 for a in word.arrows if a in self.u_letters))
        basis = self.basis(block)
        index = {b: n for n, b in enumerate(basis)}
        return block, {index[b]: c for b, c in red.items()}

    @property
    def u_letters(self) -> set[str]:
        return {u_id(i) for i in self.base.vertices} if self.dynkin else set()

    def multiply(self, x: dict, y: dict) -> PathVector:
        """Product of window vectors: ``x`` is translated down by the weight of ``y``."""
        out = PathVector()
        for p, a in x.items():
            for q, b in y.items():
                if _strip(p.target) != _strip(q.source):
                    continue
                shift = int(q.source.rsplit("@", 1)[1])
                moved = _translate(p, shift)
                if moved is None:
                    raise TruncationOverflowError("product leaves the window")
                r = Path(moved.source, q.target, moved.arrows + q.arrows)
                sparse_add(out, {r: a * b})
        return self.window.reduce(out)


def _translate(p: Path, shift: int) -> Path | None:
    def move(x: str) -> str:
        base, lvl = x.rsplit("@", 1)
        return f"{base}@{int(lvl) + shift}"

    return Path(move(p.source), move(p.target), tuple(move(a) for a in p.arrows))


def _u_window_arrows(q: Quiver, dyn: DynkinData, lowest: int) -> list[Arrow]:
    out = []
    for n in range(lowest, 1):
        for i in q.vertices:
            if n - dyn.N[i] >= lowest:
                out.append(Arrow(rep_arrow_id(u_id(i), n - dyn.N[i]), rep_vertex_id(dyn.nu[i], n - dyn.N[i]),
                                 rep_vertex_id(i, n), dyn.N[i], 1))
    return out


def _lift_omega_relators(q: Quiver, dyn: DynkinData, lowest: int) -> list[PathVector]:
    """``omega`` relators placed at every level where they fit in the window."""
    twist = nakayama_on_arrows(q, dyn)
    qbar = double_quiver(q)
    rels = []
    for a in qbar.arrows:
        tw = twist[a.id]
        b = qbar.arrow(tw.image)
        s, t = a.source, a.target
        for top in range(lowest, 1):
            # a ends at level `top`; it starts at top - weight(a)
            start = top - a.weight
            low = start - dyn.N[s]
            if low < lowest:
                continue
            left = Path(rep_vertex_id(dyn.nu[s], low), rep_vertex_id(t, top), (
                rep_arrow_id(u_id(s), low), rep_arrow_id(a.id, start)))
            mid = low + b.weight
            right = Path(rep_vertex_id(dyn.nu[s], low), rep_vertex_id(t, top), (
                rep_arrow_id(b.id, low), rep_arrow_id(u_id(t), mid)))
            v = PathVector()
            sparse_add(v, {left: 1})
            sparse_add(v, {right: -tw.sign})
            rels.append(v)
    return rels


def build_U(q: Quiver, max_weight: int) -> TranslationAlgebraU:
    """U from mesh combinatorics; non-Dynkin quivers give the mesh window alone."""
    if not is_acyclic(q):
        raise QuiverError("quiver is not acyclic")
    if max_weight < 0:
        raise QuiverError("max_weight must be non-negative")
    lowest = -max_weight
    letter_weight = {a.id: 0 for a in q.arrows} | {star(a.id): 1 for a in q.arrows}
    kind = dynkin_type(q)
    if kind is None:
        frag = knit(q, max(max_weight, 1))
        window = repetitive_window(q, lowest)
        rels = mesh_relators(q, lowest)
        dyn = None
    else:
        dyn = nakayama_and_N(q)
        frag = knit(q, max(max_weight, dyn.depth))
        extra = tuple(_u_window_arrows(q, dyn, lowest))
        window = repetitive_window(q, lowest, extra)
        rels = mesh_relators(q, lowest) + _lift_omega_relators(q, dyn, lowest)
        letter_weight |= {u_id(i): dyn.N[i] for i in q.vertices}
    alg = build_quotient(window, rels, max_weight, block_filter=lambda s, t: t.endswith("@0"))
    return TranslationAlgebraU(q, max_weight, frag, dyn, alg, letter_weight, rels)


def happel_prediction(u: TranslationAlgebraU) -> dict[Block, int]:
    """Block dimensions of U predicted from knitted classes alone.

    ``Hom(P_j, tau^{-w} P_i[-d])`` is ``(dim tau^{-w} P_i)_j`` when ``d`` is the
    shift count of ``tau^{-w} P_i`` and zero otherwise.
    """
    frag = u.fragment
    out = {}
    for w in range(u.max_weight + 1):
        for i in u.base.vertices:
            obj = frag.object(i, w)
            for j in u.base.vertices:
                dim = obj.dim[frag.order.index(j)]
                if dim:
                    out[(i, j, w, obj.shift)] = dim
    return out


# -- homology as a comparison target ------------------------------------------------


class HomologyAlgebra:
    """``H_* Gamma`` with products read through a retraction.

    Words of Omega are evaluated by multiplying representatives at chain level;
    ``u<i>`` is sent to ``scale[i]`` times the generator of its block.
    """

    def __init__(self, complex_: BlockComplex, retraction, dyn: DynkinData | None = None):
        self.complex = complex_
        self.retraction = retraction
        self.dynkin = dyn
        self.max_weight = complex_.max_weight
        self.scale: dict[str, Fraction] = {}
        self._blocks: dict[Block, list[str]] = {}
        for h in retraction.classes:
            self._blocks.setdefault(h.block, []).append(h.label)
        self.u_labels: dict[str, str] = {}
        if dyn is not None:
            for i in complex_.ginzburg.base.vertices:
                block = (dyn.nu[i], i, dyn.N[i], 1)
                labels = self._blocks.get(block, [])
                if len(labels) == 1:
                    self.u_labels[i] = labels[0]
                    self.scale[i] = 1

    def block_dims(self) -> dict[Block, int]:
        return {b: len(v) for b, v in self._blocks.items()}

    def basis(self, block: Block) -> list[str]:
        return list(self._blocks.get(block, []))

    def _letter(self, letter: str) -> PathVector:
        q = self.complex.quiver
        if q.has_arrow(letter) and not self.complex.ginzburg.is_loop(letter):
            a = q.arrow(letter)
            return PathVector({Path(a.source, a.target, (letter,)): 1})
        vertex = letter[1:]
        if letter.startswith("u") and vertex in self.u_labels:
            return self.retraction.j(self.u_labels[vertex]).scaled(self.scale[vertex])
        raise KeyError(f"no image for generator {letter!r}")

    def chain_word(self, word: Path) -> PathVector:
        v = PathVector({Path.trivial(word.source): 1})
        for letter in word.arrows:
            v = v * self._letter(letter)
        return v

    def word_weight(self, word: Path) -> int:
        w = 0
        for letter in word.arrows:
            q = self.complex.quiver
            if q.has_arrow(letter) and not self.complex.ginzburg.is_loop(letter):
                w += q.arrow(letter).weight
            else:
                w += self.dynkin.N[letter[1:]]
        return w

    def evaluate(self, word: Path) -> tuple[Block, dict[int, Fraction]]:
        w = self.word_weight(word)
        if w > self.max_weight:
            raise TruncationOverflowError(f"weight {w} exceeds truncation {self.max_weight}")
        d = sum(1 for a in word.arrows if a.startswith("u") and not self.complex.quiver.has_arrow(a))
        block = (word.source, word.target, w, d)
        coords = self.retraction.q(self.chain_word(word))
        index = {lab: n for n, lab in enumerate(self.basis(block))}
        out = {}
        for lab, c in coords.items():
            if lab not in index:
                raise QuiverError(f"class {lab} outside block {block}")
            out[index[lab]] = c
        return block, out

    def normalize_u(self, relators: Iterable[PathVector]) -> bool:
        """Choose the scalars of the ``u`` images so the given relators vanish.

        Each relator is linear in the scalars; the solution space is computed
        exactly and the first basis vector with all entries nonzero is used.
        Returns False if no such choice exists.
        """
        verts = sorted(self.u_labels)
        if not verts:
            return True
        rows: list[list[Fraction]] = []
        for r in relators:
            cols: dict[tuple, dict[int, Fraction]] = {}
            ok = True
            for word, coeff in r.items():
                us = [a[1:] for a in word.arrows if a.startswith("u") and not self.complex.quiver.has_arrow(a)]
                if len(us) != 1:
                    ok = False
                    break
                saved = dict(self.scale)
                self.scale = {v: 1 for v in verts}
                try:
                    block, coords = self.evaluate(word)
                except TruncationOverflowError:
                    ok = False
                    break
                finally:
                    self.scale = saved
                for k, x in coords.items():
                    cols.setdefault((block, k), {})
                    cols[(block, k)][verts.index(us[0])] = cols[(block, k)].get(verts.index(us[0]), 0) + coeff * x
            if not ok:
                continue
            for entries in cols.values():
                rows.append([Fraction(entries.get(n, 0)) for n in range(len(verts))])
        if not rows:
            return True
        basis = kernel_basis(rows)
        candidates = list(basis) + ([tuple(sum(col) for col in zip(*basis))] if basis else [])
        for vec in candidates:
            if all(vec):
                first = vec[0]
                self.scale = {v: Fraction(x) / first for v, x in zip(verts, vec)}
                return True
        return False


# -- comparison ----------------------------------------------------------------


@dataclass
class ComparisonReport:
    blocks_checked: int
    mismatches: list[dict]
    hilbert_a: dict
    hilbert_b: dict
    constructive: dict | None = None

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        def series(h):
            return [{"w": w, "d": d, "dim": n} for (w, d), n in sorted(h.items())]

        out = {
            "blocks_checked": self.blocks_checked,
            "mismatches": self.mismatches,
            "hilbert_a": series(self.hilbert_a),
            "hilbert_b": series(self.hilbert_b),
        }
        if self.constructive is not None:
            out["constructive"] = self.constructive
        return out


class _Dims:
    def __init__(self, dims):
        self._d = dims

    def block_dims(self):
        return self._d


def compare_bigraded(a, b, max_weight: int, constructive: bool = True) -> ComparisonReport:
    """Block dimensions, Hilbert series, and optionally a generator-level map.

    ``a`` must offer ``block_dims()``; for the constructive part it must also
    offer ``presentation()`` (relators and basis words over Omega) while ``b``
    offers ``evaluate(word)``. The map sends each word to its value in ``b``;
    relators must vanish and each block of basis words must map bijectively.
    """
    da = {k: v for k, v in a.block_dims().items() if k[2] <= max_weight and v}
    db = {k: v for k, v in b.block_dims().items() if k[2] <= max_weight and v}
    mismatches = []
    keys = sorted(set(da) | set(db), key=lambda k: (k[2], k[3], k[0], k[1]))
    for k in keys:
        if da.get(k, 0) != db.get(k, 0):
            mismatches.append({"block": list(k), "kind": "dimension", "a": da.get(k, 0), "b": db.get(k, 0)})
    report = ComparisonReport(len(keys), mismatches, hilbert_series(_Dims(da)), hilbert_series(_Dims(db)))
    if not constructive or not hasattr(a, "presentation") or not hasattr(b, "evaluate"):
        return report
    relators, bases = a.presentation()
    checked_rel = 0
    for r in relators:
        if max(path_weight_any(a, p) for p in r) > max_weight:
            continue
        total: dict = {}
        block = None
        try:
            for word, c in r.items():
                block, coords = b.evaluate(word)
                sparse_add(total, coords, c)
        except TruncationOverflowError:
            continue
        checked_rel += 1
        if total:
            mismatches.append({"block": list(block), "kind": "relator",
                               "relator": [{"word": p.label(), "coeff": fraction_str(c)} for p, c in sorted(r.items())]})
    checked_blocks = 0
    for k, words in sorted(bases.items(), key=lambda kv: (kv[0][2], kv[0][3], kv[0][0], kv[0][1])):
        if k[2] > max_weight or not words:
            continue
        ech = Echelon()
        try:
            for word in words:
                blk, coords = b.evaluate(word)
                if blk != k:
                    raise QuiverError(f"word {word.label()} lands in {blk}, expected {k}")
                ech.add(coords)
        except TruncationOverflowError:
            continue
        checked_blocks += 1
        if len(ech) != len(words) or len(ech) != db.get(k, 0):
            mismatches.append({"block": list(k), "kind": "rank", "rank": len(ech), "a": len(words),
                               "b": db.get(k, 0)})
    report.constructive = {"relators_checked": checked_rel, "blocks_checked": checked_blocks}
    return report


def path_weight_any(alg, p: Path) -> int:
    if hasattr(alg, "letter_weight"):
        return sum(alg.letter_weight[a] for a in p.arrows)
    return path_weight(alg.quiver, p)


def homology_comparison(c: BlockComplex, retraction, max_weight: int) -> tuple[ComparisonReport, HomologyAlgebra, TranslationAlgebraU]:
    """``H_* Gamma`` against U, with the ``u`` scalars fixed by the commutation relators."""
    q = c.ginzburg.base
    u = build_U(q, max_weight)
    h = HomologyAlgebra(c, retraction, u.dynkin)
    relators, _ = u.presentation()
    normalized = h.normalize_u(r for r in relators if any(
        a.startswith("u") and not c.quiver.has_arrow(a) for p in r for a in p.arrows))
    report = compare_bigraded(u, h, max_weight)
    report.constructive = dict(report.constructive or {}, u_scalars={k: fraction_str(v) for k, v in h.scale.items()},
                               scalars_found=normalized)
    if not normalized:
        report.mismatches.append({"block": None, "kind": "u-scalars"})
    return report, h, u


def twisted_comparison(q: Quiver, max_weight: int) -> tuple[ComparisonReport, TwistedPolynomialAlgebra, TranslationAlgebraU]:
    if dynkin_type(q) is None:
        raise NotDynkinError("the twisted polynomial algebra needs a Dynkin quiver")
    t = build_twisted(q, max_weight)
    u = build_U(q, max_weight)
    return compare_bigraded(t, u, max_weight), t, u


# -- triangles and mu_3 ---------------------------------------------------------------


@dataclass(frozen=True)
class Mu3Prediction:
    block: Block
    generator: str | None

    def to_json(self) -> dict:
        return {"block": list(self.block), "generator": self.generator, "scalar": "nonzero, expected +-1"}


def mu3_prediction(triple: tuple[str, str, str], table: AInfinityTable, dyn: DynkinData,
                   frag: MeshFragment) -> Mu3Prediction:
    """Predicted target of ``mu_3`` on a triple read as a non-split triangle.

    The triple is in path order ``(x1, x2, x3)``; as morphisms ``f = x3``,
    ``g = x2``, ``h = x1`` give ``X -> Y -> Z -> X[1]`` with ``X = P_t(x3)``.
    """
    cls = table.classes
    try:
        x1, x2, x3 = (cls[x] for x in triple)
    except (KeyError, ValueError):
        raise NotARecognizedTriangleError("unknown or malformed triple") from None
    if any(x.degree != 0 or x.is_unit for x in (x1, x2, x3)):
        raise NotARecognizedTriangleError("inputs must be non-unit degree 0 classes")
    if x1.target != x2.source or x2.target != x3.source:
        raise NotARecognizedTriangleError("triple is not composable")
    top = x3.target
    total = x1.weight + x2.weight + x3.weight
    if x1.source != dyn.nu[top] or total != dyn.N[top]:
        raise NotARecognizedTriangleError("third map does not end at X[1]")
    if table.value((x1.label, x2.label)) or table.value((x2.label, x3.label)):
        raise NotARecognizedTriangleError("consecutive composites do not vanish")
    if frag.depth < total:
        frag = knit(frag.quiver, total)
    X = frag.object(top, 0).klass
    Y = frag.object(x3.source, x3.weight).klass
    Z = frag.object(x2.source, x3.weight + x2.weight).klass
    if tuple(x + z for x, z in zip(X, Z)) != Y:
        raise NotARecognizedTriangleError("classes are not additive, the triangle would split")
    if not _hom_exact(table, x1, x2, x3):
        raise NotARecognizedTriangleError("Hom(P_j, -) is not exact along the triple")
    block = (x1.source, top, total, 1)
    gens = [h.label for h in cls.values() if h.block == block]
    return Mu3Prediction(block, gens[0] if len(gens) == 1 else None)


def _left_rank(table: AInfinityTable, x: str, labels: list[str]) -> int:
    ech = Echelon()
    for lab in labels:
        ech.add(table.value((x, lab)) if table.classes[x].target == table.classes[lab].source else {})
    return len(ech)


def _hom_exact(table: AInfinityTable, x1, x2, x3) -> bool:
    """Exactness of ``Hom(P_j, tau^{-m} -)`` at ``Y`` and ``Z`` inside the truncation.

    ``Hom(P_j, tau^{-w} P_i[-d])`` is the homology block ``(i, j, w, d)`` and
    post-composition with a map is left multiplication by its class.
    """
    blocks: dict[Block, list[str]] = {}
    for h in table.classes.values():
        blocks.setdefault(h.block, []).append(h.label)
    total = x1.weight + x2.weight + x3.weight
    degrees = sorted({h.degree for h in table.classes.values()})
    vertices = sorted({h.source for h in table.classes.values()})
    for m in range(0, table.max_weight - total + 1):
        for j in vertices:
            for d in degrees:
                bx = blocks.get((x3.target, j, m, d), [])
                by = blocks.get((x3.source, j, x3.weight + m, d), [])
                bz = blocks.get((x2.source, j, x2.weight + x3.weight + m, d), [])
                r3 = _left_rank(table, x3.label, bx)
                r2 = _left_rank(table, x2.label, by)
                r1 = _left_rank(table, x1.label, bz)
                if r3 != len(by) - r2 or r2 != len(bz) - r1:
                    return False
    return True


def recognized_triangles(table: AInfinityTable, dyn: DynkinData, frag: MeshFragment) -> dict[tuple, Mu3Prediction]:
    out = {}
    for xs in composable_tuples(table.classes.values(), 3, table.max_weight):
        if any(table.classes[x].degree for x in xs):
            continue
        try:
            out[xs] = mu3_prediction(xs, table, dyn, frag)
        except NotARecognizedTriangleError:
            pass
    return out


# -- u-equivariance -------------------------------------------------------------------


def u_generator_labels(table: AInfinityTable, dyn: DynkinData) -> dict[str, str]:
    out = {}
    for i in dyn.nu:
        block = (dyn.nu[i], i, dyn.N[i], 1)
        labels = [h.label for h in table.classes.values() if h.block == block]
        if len(labels) == 1:
            out[i] = labels[0]
    return out


def _one(label: str) -> dict:
    return {label: 1}


def _neg(v: dict) -> dict:
    return {k: -x for k, x in v.items()}


def u_equivariance_cases(table: AInfinityTable, u_labels: Iterable[str]):
    """Triples ``(x, y, z)`` and generators ``u`` for which both sides fit.

    Yields ``(side, u, (x, y, z))``. ``x`` may be a unit on the left side and
    ``z`` on the right, which makes the rule say ``mu_3(u, y, z) = 0``.
    """
    cls = table.classes
    W = table.max_weight
    units = [h for h in cls.values() if h.is_unit]
    triples = list(composable_tuples(cls.values(), 3, W))
    pairs = list(composable_tuples(cls.values(), 2, W))
    for u in sorted(u_labels):
        hu = cls[u]
        for xs in triples:
            wt = sum(cls[x].weight for x in xs) + hu.weight
            if wt > W:
                continue
            if hu.target == cls[xs[0]].source:
                yield "left", u, xs
            if hu.source == cls[xs[2]].target:
                yield "right", u, xs
        for e in units:
            for y, z in pairs:
                wt = cls[y].weight + cls[z].weight + hu.weight
                if wt > W:
                    continue
                if e.source == cls[y].source and hu.target == e.source:
                    yield "left", u, (e.label, y, z)
                if e.source == cls[z].target and hu.source == e.source:
                    yield "right", u, (y, z, e.label)


def u_equivariance_defect(table: AInfinityTable, side: str, u: str, xs: tuple[str, str, str]) -> dict:
    """``mu3(u.x, y, z) + u.mu3(x, y, z)`` or ``mu3(x, y, z.u) - mu3(x, y, z).u``.

    The left sign comes from moving the degree 1 class ``u`` past ``mu_3``.
    """
    x, y, z = (_one(a) for a in xs)
    U = _one(u)
    base = table.apply([x, y, z])
    if side == "left":
        out = table.apply([table.apply([U, x]), y, z])
        sparse_add(out, table.apply([U, base]))
    else:
        out = table.apply([x, y, table.apply([z, U])])
        sparse_add(out, table.apply([base, U]), -1)
    return out


def u_equivariance_violations(table: AInfinityTable, u_labels: Iterable[str]) -> tuple[int, list[dict]]:
    count, bad = 0, []
    for side, u, xs in u_equivariance_cases(table, u_labels):
        count += 1
        defect = u_equivariance_defect(table, side, u, xs)
        if defect:
            bad.append({"side": side, "u": u, "inputs": list(xs),
                        "defect": {k: fraction_str(v) for k, v in sorted(defect.items())}})
    return count, bad


_CONST = ("", "")


class _Lin:
    """Vectors over homology labels whose coefficients are affine in unknowns."""

    @staticmethod
    def const(v: dict) -> dict:
        return {lab: {_CONST: Fraction(c)} for lab, c in v.items()}

    @staticmethod
    def add(acc: dict, other: dict, scale=1) -> dict:
        for lab, coeffs in other.items():
            sparse_add(acc.setdefault(lab, {}), coeffs, scale)
            if not acc[lab]:
                del acc[lab]
        return acc

    @staticmethod
    def apply_linear(op, v: dict) -> dict:
        """``op(label) -> dict`` extended to affine vectors."""
        out: dict = {}
        for lab, coeffs in v.items():
            for lab2, c in op(lab).items():
                for var, x in coeffs.items():
                    sparse_add(out.setdefault(lab2, {}), {var: x * c})
        return {k: v for k, v in out.items() if v}


def _f2_unknowns(table: AInfinityTable) -> dict[tuple[str, str], list[str]]:
    cls = table.classes
    blocks: dict[Block, list[str]] = {}
    for h in cls.values():
        blocks.setdefault(h.block, []).append(h.label)
    out = {}
    for x, y in composable_tuples(cls.values(), 2, table.max_weight):
        a, b = cls[x], cls[y]
        targets = blocks.get((a.source, b.target, a.weight + b.weight, a.degree + b.degree + 1), [])
        if targets:
            out[(x, y)] = sorted(targets)
    return out


def _nu3_affine(table: AInfinityTable, unknowns, a: dict, b: dict, c: dict) -> dict:
    """``nu_3`` of the gauge ``(id, f2)`` on constant vectors, affine in ``f2``.

    ``nu3(a,b,c) = mu3 - f2(a, bc) + f2(ab, c) - (-1)^|a| a f2(b,c) + f2(a,b) c``.
    """
    cls = table.classes

    def f2(left: dict, right: dict) -> dict:
        out: dict = {}
        for x, cx in left.items():
            for y, cy in right.items():
                for t in unknowns.get((x, y), []):
                    sparse_add(out.setdefault(t, {}), {(x, y, t): cx * cy})
        return {k: v for k, v in out.items() if v}

    out = _Lin.const(table.apply([a, b, c]))
    _Lin.add(out, f2(a, table.apply([b, c])), -1)
    _Lin.add(out, f2(table.apply([a, b]), c))
    for x, cx in a.items():
        sign = -1 if cls[x].degree % 2 else 1
        inner = f2(b, c)
        _Lin.add(out, _Lin.apply_linear(lambda lab: table.apply([_one(x), _one(lab)]), inner), -sign * cx)
    _Lin.add(out, _Lin.apply_linear(lambda lab: table.apply([_one(lab), c]), f2(a, b)))
    return out


def u_equivariant_gauge(table: AInfinityTable, u_labels: Iterable[str]):
    """Find ``f2`` making ``mu_3`` u-equivariant and push the table along ``(id, f2)``.

    Returns ``(f2, gauged_table)`` or ``(None, None)`` when the linear system
    has no solution. The particular solution sets every free unknown to 0.
    """
    u_labels = sorted(u_labels)
    unknowns = _f2_unknowns(table)
    order = {(x, y, t): n for n, ((x, y), ts) in enumerate(sorted(unknowns.items())) for t in ts}
    order = {k: n for n, k in enumerate(sorted(order))}
    key = lambda v: order.get(v, len(order))  # noqa: E731
    ech = Echelon(key=key)
    for side, u, xs in u_equivariance_cases(table, u_labels):
        x, y, z = (_one(a) for a in xs)
        U = _one(u)
        if side == "left":
            expr = _nu3_affine(table, unknowns, table.apply([U, x]), y, z)
            base = _nu3_affine(table, unknowns, x, y, z)
            _Lin.add(expr, _Lin.apply_linear(lambda lab: table.apply([U, _one(lab)]), base))
        else:
            expr = _nu3_affine(table, unknowns, x, y, table.apply([z, U]))
            base = _nu3_affine(table, unknowns, x, y, z)
            _Lin.add(expr, _Lin.apply_linear(lambda lab: table.apply([_one(lab), U]), base), -1)
        for coeffs in expr.values():
            ech.add(coeffs)
    if _CONST in ech.rows:
        return None, None
    f2: dict[tuple[str, str], dict[str, Fraction]] = {}
    for pivot, row in ech.rows.items():
        val = -row.get(_CONST, 0)
        if val:
            x, y, t = pivot
            f2.setdefault((x, y), {})[t] = val
    return f2, gauge_transform(table, f2)
