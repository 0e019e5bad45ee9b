"""Exact sparse linear algebra over the rationals.

Everything in this package ultimately reduces to ranks and kernels of
small sparse matrices with Fraction entries.  Matrices are immutable
after construction; no stored entry is zero; all arithmetic is exact.

Two independent rank paths are provided: fraction-free (Bareiss)
elimination on a dense integer copy for small matrices, and sparse
rational elimination with minimal-fill pivoting for larger ones.  They
must agree, and the test suite checks that they do.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .errors import ComplexConditionViolated, ShapeMismatch

Vector = tuple[Fraction, ...]

# Above this edge size rank() switches from dense Bareiss to sparse
# elimination; per-degree blocks in practice sit well below it.
_DENSE_CUTOFF = 32


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


class ExactMatrix:
    """Immutable sparse matrix over Q, stored as {(row, col): Fraction}."""

    __slots__ = ("rows", "cols", "_data", "_rank")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ShapeMismatch(f"negative shape ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        self._rank: int | None = None
        data: dict[tuple[int, int], Fraction] = {}
        if entries:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for item in items:
                if isinstance(entries, Mapping):
                    (r, c), v = item
                else:
                    r, c, v = item
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ShapeMismatch(
                        f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
                v = _frac(v)
                if v:
                    data[(r, c)] = v
        self._data = data

    # -- construction helpers -------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [(i, i, Fraction(1)) for i in range(n)])

    @classmethod
    def scalar(cls, n: int, value) -> "ExactMatrix":
        v = _frac(value)
        return cls(n, n, [(i, i, v) for i in range(n)] if v else None)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        entries = []
        for r, row in enumerate(rows):
            if len(row) != nc:
                raise ShapeMismatch("ragged rows")
            for c, v in enumerate(row):
                entries.append((r, c, _frac(v)))
        return cls(nr, nc, entries)

    # -- accessors -------------------------------------------------------

    def get(self, r: int, c: int) -> Fraction:
        return self._data.get((r, c), Fraction(0))

    def entries(self) -> list[tuple[int, int, Fraction]]:
        """Sorted (row, col, value) triplets of the nonzero entries."""
        return [(r, c, self._data[(r, c)]) for (r, c) in sorted(self._data)]

    def nnz(self) -> int:
        return len(self._data)

    def is_zero(self) -> bool:
        return not self._data

    def to_rows(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            out[r][c] = v
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, ExactMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._data == other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._data.items())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={len(self._data)})"

    # -- arithmetic ------------------------------------------------------

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols,
                           [(r, c, -v) for (r, c), v in self._data.items()])

    def scale(self, value) -> "ExactMatrix":
        v = _frac(value)
        if not v:
            return ExactMatrix(self.rows, self.cols)
        return ExactMatrix(self.rows, self.cols,
                           [(r, c, v * w) for (r, c), w in self._data.items()])

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeMismatch("addition of mismatched shapes")
        data = dict(self._data)
        for k, v in other._data.items():
            s = data.get(k, Fraction(0)) + v
            if s:
                data[k] = s
            else:
                data.pop(k, None)
        return ExactMatrix(self.rows, self.cols, data)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        # group left entries by column to walk only matching pairs
        by_col: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in self._data.items():
            by_col.setdefault(c, []).append((r, v))
        acc: dict[tuple[int, int], Fraction] = {}
        for (k, c), w in other._data.items():
            for r, v in by_col.get(k, ()):
                key = (r, c)
                s = acc.get(key, Fraction(0)) + v * w
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return ExactMatrix(self.rows, other.cols, acc)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           [(c, r, v) for (r, c), v in self._data.items()])

    def matvec(self, vec: Sequence) -> Vector:
        if len(vec) != self.cols:
            raise ShapeMismatch("vector length does not match column count")
        out = [Fraction(0)] * self.rows
        for (r, c), v in self._data.items():
            w = vec[c]
            if w:
                out[r] += v * _frac(w)
        return tuple(out)

    # -- rank and kernel ---------------------------------------------------

    def rank(self) -> int:
        if self._rank is None:
            if min(self.rows, self.cols) == 0:
                self._rank = 0
            elif max(self.rows, self.cols) <= _DENSE_CUTOFF:
                self._rank = rank_dense_bareiss(self)
            else:
                self._rank = rank_sparse_gauss(self)
        return self._rank

    def kernel_basis(self) -> list[Vector]:
        """Basis of the right kernel; len == cols - rank."""
        if self.cols == 0:
            return []
        m = self.to_rows()
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, self.rows) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        pivot_set = set(pivots)
        basis = []
        for free in range(self.cols):
            if free in pivot_set:
                continue
            v = [Fraction(0)] * self.cols
            v[free] = Fraction(1)
            for i, pc in enumerate(pivots):
                v[pc] = -m[i][free]
            basis.append(tuple(v))
        return basis


def rank_dense_bareiss(a: ExactMatrix) -> int:
    """Fraction-free elimination on a dense integer copy of the matrix."""
    if min(a.rows, a.cols) == 0:
        return 0
    m: list[list[int]] = []
    for row in a.to_rows():
        scale = lcm(*(v.denominator for v in row)) if any(row) else 1
        m.append([int(v * scale) for v in row])
    rows, cols = a.rows, a.cols
    rank = 0
    prev = 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for r in range(rank + 1, rows):
            f = m[r][c]
            for cc in range(c + 1, cols):
                m[r][cc] = (m[r][cc] * p - f * m[rank][cc]) // prev
            m[r][c] = 0
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def rank_sparse_gauss(a: ExactMatrix) -> int:
    """Sparse rational elimination, pivot chosen to minimise fill."""
    rows: dict[int, dict[int, Fraction]] = {}
    for (r, c), v in a._data.items():
        rows.setdefault(r, {})[c] = v
    rank = 0
    while rows:
        col_count: dict[int, int] = {}
        for row in rows.values():
            for c in row:
                col_count[c] = col_count.get(c, 0) + 1
        best = None
        for r in sorted(rows):
            row = rows[r]
            for c in sorted(row):
                score = (len(row) - 1) * (col_count[c] - 1)
                if best is None or score < best[0]:
                    best = (score, r, c)
        _, r0, c0 = best
        pivot_row = rows.pop(r0)
        pv = pivot_row[c0]
        rank += 1
        for r in list(rows):
            row = rows[r]
            f = row.get(c0)
            if f is None:
                continue
            f = f / pv
            for c, v in pivot_row.items():
                if c == c0:
                    row.pop(c0, None)
                    continue
                s = row.get(c, Fraction(0)) - f * v
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
            if not row:
                rows.pop(r)
    return rank


def rank(a: ExactMatrix) -> int:
    return a.rank()


def kernel_basis(a: ExactMatrix) -> list[Vector]:
    return a.kernel_basis()


def hstack(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    if not mats:
        raise ShapeMismatch("hstack of nothing")
    rows = mats[0].rows
    entries = []
    off = 0
    for m in mats:
        if m.rows != rows:
            raise ShapeMismatch("hstack with differing row counts")
        for r, c, v in m.entries():
            entries.append((r, c + off, v))
        off += m.cols
    return ExactMatrix(rows, off, entries)


def vstack(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    if not mats:
        raise ShapeMismatch("vstack of nothing")
    cols = mats[0].cols
    entries = []
    off = 0
    for m in mats:
        if m.cols != cols:
            raise ShapeMismatch("vstack with differing column counts")
        for r, c, v in m.entries():
            entries.append((r + off, c, v))
        off += m.rows
    return ExactMatrix(off, cols, entries)


def block_diag(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    entries = []
    roff = coff = 0
    for m in mats:
        for r, c, v in m.entries():
            entries.append((r + roff, c + coff, v))
        roff += m.rows
        coff += m.cols
    return ExactMatrix(roff, coff, entries)


def matrix_from_columns(columns: Sequence[Sequence], rows: int) -> ExactMatrix:
    entries = []
    for c, col in enumerate(columns):
        if len(col) != rows:
            raise ShapeMismatch("column length does not match row count")
        for r, v in enumerate(col):
            entries.append((r, c, _frac(v)))
    return ExactMatrix(rows, len(columns), entries)


def cohomology_dim(a_in: ExactMatrix, a_out: ExactMatrix) -> int:
    """dim ker(a_out)/im(a_in) for a two-step complex U --a_in--> V --a_out--> W."""
    if a_out.cols != a_in.rows:
        raise ShapeMismatch(
            f"incompatible complex: in is {a_in.rows}x{a_in.cols}, "
            f"out is {a_out.rows}x{a_out.cols}")
    if not (a_out * a_in).is_zero():
        raise ComplexConditionViolated("a_out . a_in != 0")
    return a_out.cols - a_out.rank() - a_in.rank()


def subquotient_dim(a_in: ExactMatrix, a_out: ExactMatrix) -> int:
    """dim ker(a_out) / (ker(a_out) & im(a_in)).

    Well defined for any pair of maps with matching middle space; agrees
    with cohomology_dim when a_out . a_in = 0.  Used for truncated
    complexes whose boundary blocks are unknown.
    """
    if a_out.cols != a_in.rows:
        raise ShapeMismatch("incompatible middle dimensions")
    kernel = a_out.kernel_basis()
    if not kernel:
        return 0
    joined = hstack([matrix_from_columns(kernel, a_out.cols), a_in])
    return joined.rank() - a_in.rank()
