"""Exact linear algebra over the rationals.

Dense helpers (``rref``, ``kernel_basis``, ``solve``) work on lists of rows.
``Echelon`` is the sparse workhorse used by the algebra and homology code: it
keeps a fully reduced row echelon basis of a growing span, optionally together
with certificates expressing every stored row in terms of the inserted
vectors.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Sequence

Vector = tuple[Fraction, ...]


class RationalMatrix:
    """Immutable dense matrix with Fraction entries."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        self.nrows = len(self.rows)
        if self.nrows:
            widths = {len(r) for r in self.rows}
            if len(widths) != 1:
                raise ValueError("ragged rows")
            self.ncols = widths.pop()
        else:
            self.ncols = ncols or 0

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    def column(self, c: int) -> Vector:
        return tuple(row[c] for row in self.rows)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self.rows), ncols=self.nrows) if self.nrows else RationalMatrix([], 0)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise ValueError("dimension mismatch")
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.rows))
        return RationalMatrix(
            [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.rows],
            ncols=other.ncols,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows)
        return f"RationalMatrix([{body}])"


def _as_matrix(m) -> RationalMatrix:
    return m if isinstance(m, RationalMatrix) else RationalMatrix(m)


def rref(m) -> tuple[RationalMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivoting is deterministic: scan columns left to right and take the topmost
    nonzero entry at or below the current pivot row.
    """
    m = _as_matrix(m)
    rows = [list(r) for r in m.rows]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        if r == m.nrows:
            break
        k = next((i for i in range(r, m.nrows) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m.nrows):
            f = rows[i][c]
            if i != r and f != 0:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return RationalMatrix(rows, ncols=m.ncols), pivots


def rank(m) -> int:
    return len(rref(m)[1])


def kernel_basis(m) -> list[Vector]:
    """Basis of the right null space, one vector per free column (ascending).

    Each vector has a 1 in its free coordinate and 0 in the other free
    coordinates.
    """
    m = _as_matrix(m)
    r, pivots = rref(m)
    free = [c for c in range(m.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for row, p in zip(r.rows, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(m, b: Sequence) -> Vector | None:
    """A solution of ``m x = b`` with every free variable set to 0, or None."""
    m = _as_matrix(m)
    if len(b) != m.nrows:
        raise ValueError("dimension mismatch")
    aug = RationalMatrix([list(row) + [bi] for row, bi in zip(m.rows, b)], ncols=m.ncols + 1)
    r, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [Fraction(0)] * m.ncols
    for row, p in zip(r.rows, pivots):
        x[p] = row[-1]
    return tuple(x)


# sparse vectors: dict key -> Fraction, never storing zeros

SparseVector = dict


def exact(x):
    """``x`` as an int when it is integral; sparse vectors keep ints on the fast path."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def sparse_add(acc: dict, v: dict, scale=1) -> dict:
    """acc += scale * v, in place."""
    for k, x in v.items():
        y = acc.get(k, 0) + scale * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


class Echelon:
    """Fully reduced echelon basis of a span of sparse vectors.

    Coordinates are compared with ``key`` (defaults to the natural order), the
    leading coordinate of a row being its smallest one. Because the reduced
    echelon basis of a subspace is unique for a fixed coordinate order, the
    result does not depend on insertion order.

    With ``track=True`` every row carries a certificate: a sparse combination
    of the tags passed to :meth:`add` that equals the row.
    """

    def __init__(self, key=None, track: bool = False):
        self.key = key
        self.track = track
        self.rows: dict[Hashable, dict] = {}
        self.certs: dict[Hashable, dict] = {}
        self._where: dict[Hashable, set] = {}  # coordinate -> pivots of the rows using it

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list:
        return sorted(self.rows, key=self.key)

    def reduce(self, v: dict) -> tuple[dict, dict]:
        """Residual of ``v`` modulo the span, and the certificate combination used.

        The residual has no pivot coordinates; ``v = residual + sum(c * row)``.
        The returned combination is expressed in tags when tracking, otherwise
        in pivots.
        """
        res = dict(v)
        comb: dict = {}
        for p in [k for k in res if k in self.rows]:
            c = res.get(p)
            if not c:
                continue
            sparse_add(res, self.rows[p], -c)
            if self.track:
                sparse_add(comb, self.certs[p], c)
            else:
                comb[p] = c
        return res, comb

    def add(self, v: dict, tag: Hashable = None) -> Hashable | None:
        """Insert ``v``; return the new pivot, or None if ``v`` was dependent."""
        res, comb = self.reduce(v)
        if not res:
            return None
        p = min(res, key=self.key)
        inv = exact(1 / Fraction(res[p]))
        row = {k: exact(x * inv) for k, x in res.items()}
        if self.track:
            cert = {tag: 1}
            sparse_add(cert, comb, -1)
            cert = {k: exact(x * inv) for k, x in cert.items()}
        where = self._where
        for q in list(where.get(p, ())):
            other = self.rows[q]
            c = other[p]
            for k, x in row.items():
                y = other.get(k, 0) - c * x
                if y:
                    if k not in other:
                        where.setdefault(k, set()).add(q)
                    other[k] = y
                else:
                    del other[k]
                    where[k].discard(q)
            if self.track:
                sparse_add(self.certs[q], cert, -c)
        self.rows[p] = row
        for k in row:
            where.setdefault(k, set()).add(p)
        if self.track:
            self.certs[p] = cert
        return p

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)[0]

    def copy(self) -> "Echelon":
        e = Echelon(self.key, self.track)
        e.rows = {p: dict(r) for p, r in self.rows.items()}
        e._where = {k: set(v) for k, v in self._where.items()}
        e.certs = {p: dict(c) for p, c in self.certs.items()}
        return e
