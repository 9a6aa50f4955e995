"""
Exact dense rational matrices.

``RatMatrix`` is an immutable row-major matrix of :class:`fractions.Fraction`.
Linear solves use fraction-free (Bareiss) elimination on row-scaled integer
copies of the augmented system; a plain Gauss-Jordan path over ``Fraction`` is
kept for cross-checking.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Sequence, Tuple, Union

from .errors import NotSymmetric, ShapeMismatch, SingularMatrix

Scalar = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


# ── Scalars ──────────────────────────────────────────────────────


def format_rational(value: Scalar) -> str:
    """Render ``value`` as ``"p/q"`` (or ``"p"`` when the denominator is 1)."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a reduced Fraction.

    Floats are rejected so exactness is preserved end to end.

    Raises:
        ValueError: on malformed input or a zero denominator.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(m.group(1)), den)


# ── Matrix type ──────────────────────────────────────────────────


@dataclass(frozen=True)
class RatMatrix:
    """Dense exact matrix; 0×n and n×0 shapes are legal."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeMismatch(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        if not all(type(e) is Fraction for e in self.entries):
            object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    # ── Constructors ─────────────────────────────────────────────

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: int | None = None) -> "RatMatrix":
        """Build from nested rows; ``cols`` is required only for a 0-row matrix."""
        data = [list(r) for r in rows]
        width = len(data[0]) if data else (cols or 0)
        if cols is not None and data and cols != width:
            raise ShapeMismatch(f"expected {cols} columns, got {width}")
        for r in data:
            if len(r) != width:
                raise ShapeMismatch("ragged rows")
        return cls(len(data), width, tuple(Fraction(v) for r in data for v in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        rows, cols = max(rows, 0), max(cols, 0)
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], cols: int | None = None) -> "RatMatrix":
        return cls.from_rows([[parse_rational(v) for v in r] for r in rows], cols=cols)

    # ── Access ───────────────────────────────────────────────────

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_strings(self) -> List[List[str]]:
        return [[format_rational(v) for v in self.row(i)] for i in range(self.rows)]

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        """Sub-matrix of rows ``r0:r1`` and columns ``c0:c1``."""
        return RatMatrix.from_rows([self.row(i)[c0:c1] for i in range(r0, r1)], cols=c1 - c0)

    def select(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix.from_rows(
            [[self[i, j] for j in col_idx] for i in row_idx], cols=len(col_idx)
        )

    # ── Predicates ───────────────────────────────────────────────

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        n = self.rows
        return all(self[i, j] == self[j, i] for i in range(n) for j in range(i + 1, n))

    # ── Arithmetic ───────────────────────────────────────────────

    @property
    def T(self) -> "RatMatrix":
        return self.transpose()

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: object):  # type: ignore[no-untyped-def]
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols_b = [other.column(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in cols_b:
                out.append(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)))
        return RatMatrix(self.rows, other.cols, tuple(out))

    def _check_same_shape(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __mul__(self, scalar: Scalar) -> "RatMatrix":
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        s = Fraction(scalar)
        return RatMatrix(self.rows, self.cols, tuple(a * s for a in self.entries))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols}, {self.to_strings()})"


def hstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    """Concatenate matrices with equal row counts side by side."""
    if not blocks:
        return RatMatrix.zeros(0, 0)
    rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise ShapeMismatch("hstack needs equal row counts")
    cols = sum(b.cols for b in blocks)
    return RatMatrix.from_rows(
        [[v for b in blocks for v in b.row(i)] for i in range(rows)], cols=cols
    )


def vstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    """Stack matrices with equal column counts on top of each other."""
    if not blocks:
        return RatMatrix.zeros(0, 0)
    cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise ShapeMismatch("vstack needs equal column counts")
    return RatMatrix(sum(b.rows for b in blocks), cols, tuple(v for b in blocks for v in b.entries))


# ── Elimination ──────────────────────────────────────────────────


def _integer_rows(rows: Iterable[Sequence[Fraction]]) -> Tuple[List[List[int]], List[int]]:
    """Scale each row by the lcm of its denominators; return int rows and the scales."""
    out: List[List[int]] = []
    scales: List[int] = []
    for r in rows:
        s = lcm(*(v.denominator for v in r)) if r else 1
        out.append([int(v * s) for v in r])
        scales.append(s)
    return out, scales


def _bareiss_forward(m: List[List[int]], n: int, *, pivoting: bool) -> Tuple[List[List[int]], int]:
    """In-place fraction-free forward elimination on the first ``n`` columns.

    Returns the matrix and the sign of the row permutation. Raises
    SingularMatrix when no nonzero pivot exists.
    """
    sign = 1
    prev = 1
    width = len(m[0]) if m else 0
    for k in range(n):
        if m[k][k] == 0:
            if not pivoting:
                raise SingularMatrix(f"zero leading minor of order {k + 1}")
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                raise SingularMatrix(f"no pivot in column {k}")
            m[k], m[p] = m[p], m[k]
            sign = -sign
        piv = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            f = row_i[k]
            for j in range(k + 1, width):
                row_i[j] = (piv * row_i[j] - f * row_k[j]) // prev
            row_i[k] = 0
        prev = piv
    return m, sign


def solve(a: RatMatrix, b: RatMatrix, *, fraction_free: bool = True) -> RatMatrix:
    """Return X with ``a @ X == b`` exactly.

    Raises:
        ShapeMismatch: if ``a`` is not square or ``b`` has the wrong row count.
        SingularMatrix: if ``a`` is not invertible.
    """
    if not a.is_square:
        raise ShapeMismatch(f"solve needs a square matrix, got {a.shape}")
    if b.rows != a.rows:
        raise ShapeMismatch(f"right-hand side has {b.rows} rows, expected {a.rows}")
    n, m = a.rows, b.cols
    if n == 0:
        return RatMatrix.zeros(0, m)
    if not fraction_free:
        return _gauss_jordan(a, b)

    aug, _ = _integer_rows(a.row(i) + b.row(i) for i in range(n))
    upper, _ = _bareiss_forward(aug, n, pivoting=True)

    x: List[List[Fraction]] = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = upper[i]
        piv = row[i]
        for c in range(m):
            acc = Fraction(row[n + c])
            for j in range(i + 1, n):
                if row[j]:
                    acc -= row[j] * x[j][c]
            x[i][c] = acc / piv
    return RatMatrix.from_rows(x, cols=m)


def _gauss_jordan(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n, m = a.rows, b.cols
    rows = [list(a.row(i)) + list(b.row(i)) for i in range(n)]
    for k in range(n):
        p = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if p is None:
            raise SingularMatrix(f"no pivot in column {k}")
        rows[k], rows[p] = rows[p], rows[k]
        piv = rows[k][k]
        rows[k] = [v / piv for v in rows[k]]
        for i in range(n):
            if i != k and rows[i][k]:
                f = rows[i][k]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[k])]
    return RatMatrix.from_rows([r[n:] for r in rows], cols=m)


def invert(a: RatMatrix) -> RatMatrix:
    """Exact inverse; raises SingularMatrix for singular input."""
    return solve(a, RatMatrix.identity(a.rows))


def determinant(a: RatMatrix) -> Fraction:
    if not a.is_square:
        raise ShapeMismatch(f"determinant needs a square matrix, got {a.shape}")
    n = a.rows
    if n == 0:
        return Fraction(1)
    rows, scales = _integer_rows(a.row(i) for i in range(n))
    try:
        upper, sign = _bareiss_forward(rows, n, pivoting=True)
    except SingularMatrix:
        return Fraction(0)
    denom = 1
    for s in scales:
        denom *= s
    return Fraction(sign * upper[n - 1][n - 1], denom)


def rank(a: RatMatrix) -> int:
    """Exact rank by row echelon reduction over Fraction."""
    rows = a.to_rows()
    r = 0
    for c in range(a.cols):
        p = next((i for i in range(r, a.rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(r + 1, a.rows):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        r += 1
        if r == a.rows:
            break
    return r


def is_positive_definite(a: RatMatrix) -> bool:
    """True iff every leading principal minor of the symmetric matrix ``a`` is > 0.

    Raises:
        NotSymmetric: if ``a`` differs from its transpose.
    """
    if not a.is_symmetric():
        raise NotSymmetric(f"matrix of shape {a.shape} is not symmetric")
    n = a.rows
    if n == 0:
        return True
    # positive row scales keep the sign of every leading minor
    rows, _ = _integer_rows(a.row(i) for i in range(n))
    prev = 1
    for k in range(n):
        piv = rows[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            f = rows[i][k]
            for j in range(k + 1, n):
                rows[i][j] = (piv * rows[i][j] - f * rows[k][j]) // prev
            rows[i][k] = 0
        prev = piv
    return True


# ── Block matrices ───────────────────────────────────────────────


@dataclass(frozen=True)
class BlockMatrix:
    """Block-sparse matrix; missing blocks are zero of the implied shape."""

    row_sizes: Tuple[int, ...]
    col_sizes: Tuple[int, ...]
    blocks: Tuple[Tuple[Tuple[int, int], RatMatrix], ...]

    @classmethod
    def build(
        cls, row_sizes: Sequence[int], col_sizes: Sequence[int], blocks: dict
    ) -> "BlockMatrix":
        for (r, c), m in blocks.items():
            if m.shape != (row_sizes[r], col_sizes[c]):
                raise ShapeMismatch(
                    f"block ({r}, {c}) has shape {m.shape}, expected {(row_sizes[r], col_sizes[c])}"
                )
        ordered = tuple(sorted(blocks.items()))
        return cls(tuple(row_sizes), tuple(col_sizes), ordered)

    def block(self, r: int, c: int) -> RatMatrix:
        for key, m in self.blocks:
            if key == (r, c):
                return m
        return RatMatrix.zeros(self.row_sizes[r], self.col_sizes[c])

    def __matmul__(self, other: "BlockMatrix") -> "BlockMatrix":
        if self.col_sizes != other.row_sizes:
            raise ShapeMismatch("block partitions do not match")
        left: dict = {}
        for (r, t), m in self.blocks:
            left.setdefault(t, []).append((r, m))
        out: dict = {}
        for (t, c), m in other.blocks:
            for r, lm in left.get(t, []):
                prod = lm @ m
                out[(r, c)] = out[(r, c)] + prod if (r, c) in out else prod
        return BlockMatrix.build(self.row_sizes, other.col_sizes, out)

    def to_matrix(self) -> RatMatrix:
        return vstack(
            [
                hstack([self.block(r, c) for c in range(len(self.col_sizes))])
                for r in range(len(self.row_sizes))
            ]
        )
