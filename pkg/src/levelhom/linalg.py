"""
Sparse matrices over exact fields and elimination routines.

The rational field is authoritative; ``Z/p`` (default ``p = 2**31 - 1``)
is an opt-in fast path for rank-only work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import WrongField

MERSENNE_31 = 2**31 - 1
DENSE_COLUMN_LIMIT = 500


@dataclass(frozen=True)
class Field:
    """``p is None`` means the rationals."""

    p: Optional[int] = None

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def coerce(self, value):
        if self.p is None:
            if isinstance(value, Fraction):
                return value.numerator if value.denominator == 1 else value
            if isinstance(value, (int, np.integer)):
                return int(value)
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def __str__(self):
        return "rational" if self.p is None else f"prime({self.p})"


RATIONALS = Field()


def prime_field(p: int = MERSENNE_31) -> Field:
    return Field(p)


@dataclass(frozen=True)
class FieldMatrix:
    rows: int
    cols: int
    entries: Mapping[tuple[int, int], object] = field(default_factory=dict)
    field: Field = RATIONALS

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            v = self.field.coerce(v)
            if v != 0:
                clean[(int(i), int(j))] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, data, field: Field = RATIONALS) -> "FieldMatrix":
        arr = [list(row) for row in data]
        rows = len(arr)
        cols = len(arr[0]) if rows else 0
        ent = {(i, j): v for i, row in enumerate(arr) for j, v in enumerate(row) if v != 0}
        return cls(rows, cols, ent, field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: Field = RATIONALS) -> "FieldMatrix":
        return cls(rows, cols, {}, field)

    @classmethod
    def identity(cls, n: int, field: Field = RATIONALS) -> "FieldMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        for (i, j), v in self.entries.items():
            out[i, j] = float(v)
        return out

    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}, self.field)

    def _check(self, other: "FieldMatrix"):
        if self.field != other.field:
            raise WrongField(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        ent = dict(self.entries)
        for key, v in other.entries.items():
            ent[key] = ent.get(key, 0) + v
        return FieldMatrix(self.rows, self.cols, ent, self.field)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        ent: dict = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                ent[(i, j)] = ent.get((i, j), 0) + a * b
        return FieldMatrix(self.rows, other.cols, ent, self.field)

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        ent = dict(self.entries)
        ent.update({(i, j + self.cols): v for (i, j), v in other.entries.items()})
        return FieldMatrix(self.rows, self.cols + other.cols, ent, self.field)

    def row_dicts(self) -> list[dict[int, object]]:
        rows: list[dict] = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(self.entries.get((j, i)) == v for (i, j), v in self.entries.items())

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Sequence], field: Field = RATIONALS) -> "FieldMatrix":
        ent = {(i, j): v for j, col in enumerate(columns) for i, v in enumerate(col) if v != 0}
        return cls(rows, len(columns), ent, field)


# -- elimination ------------------------------------------------------------


def _ops(fld: Field):
    p = fld.p
    if p is None:
        return (lambda a, b: Fraction(a) / b), (lambda a: a == 0), (lambda v: v)
    return (lambda a, b: a * pow(b, -1, p) % p), (lambda a: a % p == 0), (lambda v: v % p)


def _sparse_eliminate(rows: list[dict], fld: Field, full: bool = False):
    """Markowitz-style sparse elimination.

    Picks the pivot minimising ``(row_count - 1) * (col_count - 1)`` among
    the nonzeros of the sparsest remaining rows. With ``full`` the pivot
    column is cleared from every other row (Gauss-Jordan), otherwise only
    from rows not yet used as pivots. Returns ``[(pivot_col, row_dict)]``.
    """
    div, is_zero, norm = _ops(fld)
    rows = [dict(r) for r in rows if r]
    col_rows: dict[int, set[int]] = {}
    for ri, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(ri)
    active = set(range(len(rows)))
    pivots: list[tuple[int, int]] = []
    while active:
        # candidate rows: a few of the sparsest
        cand = sorted(active, key=lambda ri: (len(rows[ri]), ri))[:8]
        best = None
        for ri in cand:
            rlen = len(rows[ri])
            for c in rows[ri]:
                score = ((rlen - 1) * (len(col_rows[c]) - 1), ri, c)
                if best is None or score < best:
                    best = score
        _, pr, pc = best
        active.discard(pr)
        prow = rows[pr]
        pval = prow[pc]
        targets = list(col_rows[pc] - {pr})
        if not full:
            targets = [t for t in targets if t in active]
        for t in sorted(targets):
            trow = rows[t]
            factor = div(trow[pc], pval)
            for c, v in prow.items():
                nv = norm(trow.get(c, 0) - factor * v)
                if is_zero(nv):
                    if c in trow:
                        del trow[c]
                        col_rows[c].discard(t)
                else:
                    if c not in trow:
                        col_rows[c].add(t)
                    trow[c] = nv
            if not trow:
                active.discard(t)
        pivots.append((pc, pr))
        # drop emptied rows
        active = {ri for ri in active if rows[ri]}
    return [(pc, rows[pr]) for pc, pr in pivots]


def _dense_rank_rational(rows: list[dict], ncols: int) -> int:
    """Fraction-free elimination on integer rows (gcd-normalised)."""
    mat = []
    for r in rows:
        if not r:
            continue
        den = 1
        for v in r.values():
            if isinstance(v, Fraction):
                den = den * v.denominator // math.gcd(den, v.denominator)
        row = [0] * ncols
        for c, v in r.items():
            row[c] = int(v * den)
        mat.append(row)
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        a = prow[c]
        for i in range(rank + 1, len(mat)):
            b = mat[i][c]
            if b == 0:
                continue
            row = mat[i]
            new = [a * x - b * y for x, y in zip(row, prow)]
            g = 0
            for x in new:
                if x:
                    g = math.gcd(g, x)
                    if g == 1:
                        break
            mat[i] = [x // g for x in new] if g > 1 else new
        rank += 1
        if rank == len(mat):
            break
    return rank


def _dense_rank_mod_p(m: FieldMatrix) -> int:
    p = m.field.p
    a = np.zeros((m.rows, m.cols), dtype=np.int64)
    for (i, j), v in m.entries.items():
        a[i, j] = v
    rank = 0
    nrows = a.shape[0]
    for c in range(a.shape[1]):
        if rank == nrows:
            break
        nz = np.flatnonzero(a[rank:, c])
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, p)
        a[rank] = a[rank] * inv % p
        below = rank + 1 + np.flatnonzero(a[rank + 1 :, c])
        if below.size:
            f = a[below, c][:, None]
            a[below] = (a[below] - f * a[rank][None, :]) % p
        rank += 1
    return rank


def rank(m: FieldMatrix) -> int:
    """Exact rank.

    Rationals: fraction-free dense elimination below ``DENSE_COLUMN_LIMIT``
    columns, sparse Markowitz elimination above. ``Z/p``: dense numpy
    elimination for modest sizes, sparse otherwise.
    """
    if not m.entries:
        return 0
    if m.field.is_rational:
        rows = m.row_dicts()
        if m.cols < DENSE_COLUMN_LIMIT:
            result = _dense_rank_rational(rows, m.cols)
        else:
            result = len(_sparse_eliminate(rows, m.field))
    elif m.rows * m.cols <= 4_000_000:
        result = _dense_rank_mod_p(m)
    else:
        result = len(_sparse_eliminate(m.row_dicts(), m.field))
    assert result <= min(m.rows, m.cols)
    return result


def kernel_basis(m: FieldMatrix) -> list[list[int]]:
    """Integer basis vectors of the right null space over the rationals.

    Each vector is primitive (gcd of entries is one) with its last nonzero
    entry positive.
    """
    if not m.field.is_rational:
        raise WrongField("kernel basis requires the rational field")
    pivots = _sparse_eliminate(m.row_dicts(), m.field, full=True)
    pivot_cols = {pc: row for pc, row in pivots}
    free = [c for c in range(m.cols) if c not in pivot_cols]
    basis = []
    for f in free:
        vec: dict[int, Fraction] = {f: Fraction(1)}
        for pc, row in pivot_cols.items():
            coeff = row.get(f)
            if coeff is not None:
                vec[pc] = -Fraction(coeff) / row[pc]
        den = 1
        for v in vec.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [0] * m.cols
        for c, v in vec.items():
            ints[c] = int(v * den)
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        ints = [x // g for x in ints]
        last = next(x for x in reversed(ints) if x)
        if last < 0:
            ints = [-x for x in ints]
        basis.append(ints)
    assert len(basis) == m.cols - len(pivots)
    return basis
