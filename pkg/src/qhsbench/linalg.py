"""Exact integer and rational matrices: Smith normal form, RREF, rank.

Everything here is arbitrary precision (Python ints and ``fractions.Fraction``);
there is no floating point anywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

# Below this fraction of nonzero entries a RatMatrix keeps sparse row dicts.
DENSE_THRESHOLD = 0.25


def parse_number(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def format_number(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


class IntMatrix:
    """Immutable dense matrix of Python integers."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Sequence[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in data)
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self._data = rows

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(_identity(n), cols=n)

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets) -> "IntMatrix":
        data = [[0] * cols for _ in range(rows)]
        seen = set()
        for i, j, v in triplets:
            if (i, j) in seen:
                raise ValueError(f"duplicate entry ({i},{j})")
            seen.add((i, j))
            v = parse_number(v)
            if v.denominator != 1:
                raise ValueError(f"non-integer entry {v}")
            data[i][j] = int(v)
        return cls(data, cols=cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)],
                         cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = other.transpose()._data
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in ot] for r in self._data],
                         cols=other.cols)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._data) == (other.rows, other.cols, other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, str(v)] for i, r in enumerate(self._data) for j, v in enumerate(r) if v],
        }

    @classmethod
    def from_json(cls, obj) -> "IntMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls(obj, cols=len(obj[0]) if obj else 0)
        return cls.from_triplets(obj["rows"], obj["cols"], obj["entries"])


class RatMatrix:
    """Immutable rational matrix.

    Storage is sparse (row dicts) when the density is below
    ``DENSE_THRESHOLD`` and dense (tuples) otherwise; the public
    accessors hide the difference.
    """

    __slots__ = ("rows", "cols", "_sparse", "_data")

    def __init__(self, data, cols: int):
        rows_in = list(data)
        sparse_rows: list[dict[int, Fraction]] = []
        nnz = 0
        for r in rows_in:
            if isinstance(r, dict):
                d = {int(j): Fraction(v) for j, v in r.items() if v}
            else:
                if len(r) != cols:
                    raise ValueError("ragged matrix")
                d = {j: Fraction(v) for j, v in enumerate(r) if v}
            if any(j < 0 or j >= cols for j in d):
                raise ValueError("column index out of range")
            nnz += len(d)
            sparse_rows.append(d)
        self.rows = len(sparse_rows)
        self.cols = cols
        size = self.rows * cols
        self._sparse = size == 0 or nnz / size < DENSE_THRESHOLD
        if self._sparse:
            self._data = tuple(sparse_rows)
        else:
            self._data = tuple(tuple(d.get(j, Fraction(0)) for j in range(cols)) for d in sparse_rows)

    @property
    def is_sparse(self) -> bool:
        return self._sparse

    def row(self, i: int) -> dict[int, Fraction]:
        r = self._data[i]
        if self._sparse:
            return dict(r)
        return {j: v for j, v in enumerate(r) if v}

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        if self._sparse:
            return self._data[i].get(j, Fraction(0))
        return self._data[i][j]

    def tolist(self) -> list[list[Fraction]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and all(self.row(i) == other.row(i) for i in range(self.rows)))

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols})"

    @classmethod
    def from_int(cls, m: IntMatrix) -> "RatMatrix":
        return cls(m.tolist(), cols=m.cols)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, format_number(v)] for i in range(self.rows)
                        for j, v in sorted(self.row(i).items())],
        }

    @classmethod
    def from_json(cls, obj) -> "RatMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows: list[dict[int, Fraction]] = [dict() for _ in range(obj["rows"])]
        for i, j, v in obj["entries"]:
            if j in rows[i]:
                raise ValueError(f"duplicate entry ({i},{j})")
            rows[i][j] = parse_number(v)
        return cls(rows, cols=obj["cols"])


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == diag(d)`` with U, V unimodular."""

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    det_U: int
    det_V: int

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x)

    def nontrivial_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.d if x != 1)


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms.

    Pivot rule: smallest nonzero absolute value in the active block,
    ties broken by (row, col). Deterministic for a fixed input.
    """
    r, c = m.rows, m.cols
    A = m.tolist()
    U = _identity(r)
    V = _identity(c)
    det_u = det_v = 1

    def swap_rows(i, j):
        nonlocal det_u
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]
            det_u = -det_u

    def swap_cols(i, j):
        nonlocal det_v
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            det_v = -det_v

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in A:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                Ai = A[i]
                for j in range(t, c):
                    v = Ai[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, r)
                        if any(A[i][j] % p for j in range(t + 1, c))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
            det_u = -det_u
        if not any(A[i][j] for i in range(t, r) for j in range(t, c)):
            break

    d = tuple(A[i][i] for i in range(min(r, c)))
    return SmithDecomposition(d, IntMatrix(U, cols=r), IntMatrix(V, cols=c), det_u, det_v)


def invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    return smith_normal_form(m).d


def determinant(m: IntMatrix) -> int:
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    if m.rows == 0:
        return 1
    s = smith_normal_form(m)
    prod = 1
    for x in s.d:
        prod *= x
    # det(A) = det(U)^-1 det(D) det(V)^-1 and det(U), det(V) are +-1
    return s.det_U * s.det_V * prod


class RowReducer:
    """Incremental reduced row echelon form over Q on sparse rows.

    Rows are dicts column -> Fraction. The stored basis is kept fully
    reduced: every pivot column is zero in all other stored rows.
    """

    def __init__(self):
        self.pivot_rows: dict[int, dict[int, Fraction]] = {}
        # column -> set of pivot columns whose rows have a nonzero there
        self._occurs: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        row = {j: Fraction(v) for j, v in row.items() if v}
        for p in sorted(set(row) & self.pivot_rows.keys()):
            f = row.get(p)
            if not f:
                continue
            for j, v in self.pivot_rows[p].items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        return row

    def add(self, row: dict[int, Fraction]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        inv = 1 / row[p]
        row = {j: v * inv for j, v in row.items()}
        for q in list(self._occurs.get(p, ())):
            prow = self.pivot_rows[q]
            f = prow[p]
            for j, v in row.items():
                nv = prow.get(j, 0) - f * v
                if nv:
                    if j not in prow:
                        self._occurs.setdefault(j, set()).add(q)
                    prow[j] = nv
                else:
                    prow.pop(j, None)
                    self._occurs.get(j, set()).discard(q)
        self.pivot_rows[p] = row
        for j in row:
            if j != p:
                self._occurs.setdefault(j, set()).add(p)
        return True

    def rref_rows(self) -> list[dict[int, Fraction]]:
        return [dict(self.pivot_rows[p]) for p in sorted(self.pivot_rows)]


def rank_and_rref(m: RatMatrix) -> tuple[int, RatMatrix, list[int]]:
    red = RowReducer()
    for i in range(m.rows):
        red.add(m.row(i))
    rows = red.rref_rows()
    pivots = sorted(red.pivot_rows)
    return len(pivots), RatMatrix(rows, cols=m.cols), pivots


def rank(m) -> int:
    if isinstance(m, IntMatrix):
        m = RatMatrix.from_int(m)
    return rank_and_rref(m)[0]


def rational_inverse(m: IntMatrix | RatMatrix) -> list[list[Fraction]]:
    n = m.rows
    if n != m.cols:
        raise ValueError("inverse of a non-square matrix")
    aug = [[Fraction(m[i, j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def integer_kernel(m: IntMatrix) -> list[list[int]]:
    """Basis of {x in Z^cols : m x = 0} (columns of V past the rank)."""
    s = smith_normal_form(m)
    k = s.rank
    V = s.V
    return [[V[i, j] for i in range(m.cols)] for j in range(k, m.cols)]
