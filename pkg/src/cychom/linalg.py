"""Sparse exact linear algebra over Q(i).

Rank is computed fraction-free: rows are scaled to Gaussian integers and
eliminated by cross-multiplication with per-row content stripping, so no
rational division ever happens on matrix entries.  Reduced row echelon
form (over the field) backs kernel bases and quotient projections for the
small instances that need explicit vectors.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .scalars import Scalar

Vector = dict[int, Scalar]


class SparseMatrix:
    """Immutable sparse matrix; entries maps (row, col) -> nonzero Scalar."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict):
        self.rows = rows
        self.cols = cols
        self.entries = {
            (r, c): v for (r, c), v in entries.items() if not v.is_zero
        }
        for (r, c) in self.entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) outside {rows}x{cols}")

    @classmethod
    def from_columns(cls, rows: int, columns: list[Vector]) -> "SparseMatrix":
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    def column(self, j: int) -> Vector:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def columns(self) -> list[Vector]:
        cols: list[Vector] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self) -> list[Vector]:
        rows: list[Vector] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def apply(self, vec: Vector) -> Vector:
        """Matrix times a sparse column vector."""
        out: Vector = {}
        cols = self.columns()
        for j, x in vec.items():
            for i, a in cols[j].items():
                s = out.get(i, Scalar.zero()) + a * x
                if s.is_zero:
                    out.pop(i, None)
                else:
                    out[i] = s
        return out

    def compose(self, other: "SparseMatrix") -> "SparseMatrix":
        """self @ other."""
        if self.cols != other.rows:
            raise ValueError("shape mismatch in compose")
        cols = [self.apply(c) for c in other.columns()]
        return SparseMatrix.from_columns(self.rows, cols)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def rank(self) -> int:
        return _fraction_free_rank(self.row_dicts())

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


# -- fraction-free rank over Gaussian integers --------------------------

def _gi_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _row_to_gaussian(row: Vector) -> dict[int, tuple[int, int]]:
    denom = 1
    for v in row.values():
        denom = denom * v.re.denominator // math.gcd(denom, v.re.denominator)
        denom = denom * v.im.denominator // math.gcd(denom, v.im.denominator)
    out = {}
    for c, v in row.items():
        re = v.re.numerator * (denom // v.re.denominator)
        im = v.im.numerator * (denom // v.im.denominator)
        out[c] = (re, im)
    return out


def _strip_content(row: dict[int, tuple[int, int]]) -> dict[int, tuple[int, int]]:
    g = 0
    for (a, b) in row.values():
        g = math.gcd(g, abs(a))
        g = math.gcd(g, abs(b))
        if g == 1:
            return row
    if g <= 1:
        return row
    return {c: (a // g, b // g) for c, (a, b) in row.items()}


def _fraction_free_rank(rows: list[Vector]) -> int:
    work = [_strip_content(_row_to_gaussian(r)) for r in rows if r]
    rank = 0
    while work:
        # pivot: smallest leading column, then sparsest row (bounds fill-in)
        piv_idx = min(
            range(len(work)),
            key=lambda i: (min(work[i]), len(work[i])),
        )
        piv = work.pop(piv_idx)
        pcol = min(piv)
        plead = piv[pcol]
        rank += 1
        nxt = []
        for row in work:
            lead = row.get(pcol)
            if lead is None:
                nxt.append(row)
                continue
            new: dict[int, tuple[int, int]] = {}
            for c, v in row.items():
                if c == pcol:
                    continue
                a = _gi_mul(plead, v)
                p = piv.get(c)
                if p is not None:
                    b = _gi_mul(lead, p)
                    a = (a[0] - b[0], a[1] - b[1])
                if a != (0, 0):
                    new[c] = a
            for c, p in piv.items():
                if c == pcol or c in row:
                    continue
                b = _gi_mul(lead, p)
                if b != (0, 0):
                    new[c] = (-b[0], -b[1])
            if new:
                nxt.append(_strip_content(new))
        work = nxt
    return rank


# -- field-exact echelon machinery ---------------------------------------

class EchelonSpace:
    """Incremental echelonized span of sparse vectors over Q(i).

    Each stored vector has a distinct leading (minimal) index with
    coefficient 1; `reduce` returns the residual of a vector modulo the
    span, and `add` grows the span when the residual is nonzero.
    """

    def __init__(self):
        self._rows: dict[int, Vector] = {}  # leading index -> normalized vector

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Vector) -> Vector:
        cur = dict(vec)
        while cur:
            lead = min(cur)
            row = self._rows.get(lead)
            if row is None:
                return cur
            coeff = cur[lead]
            for c, v in row.items():
                s = cur.get(c, Scalar.zero()) - coeff * v
                if s.is_zero:
                    cur.pop(c, None)
                else:
                    cur[c] = s
        return cur

    def reduce_fully(self, vec: Vector) -> Vector:
        """Residual with every stored leading index eliminated.

        Unlike `reduce` (which stops once the running minimum is not a
        stored lead, enough for membership tests), the result here is
        supported entirely off the pivot indices — the canonical
        quotient-coordinate form of vec modulo the span.
        """
        cur = dict(vec)
        while True:
            hits = set(cur) & set(self._rows)
            if not hits:
                return cur
            lead = min(hits)
            coeff = cur[lead]
            for c, v in self._rows[lead].items():
                s = cur.get(c, Scalar.zero()) - coeff * v
                if s.is_zero:
                    cur.pop(c, None)
                else:
                    cur[c] = s

    def add(self, vec: Vector) -> bool:
        """Insert vec's residual; True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        lead = min(res)
        inv = Scalar.one() / res[lead]
        self._rows[lead] = {c: inv * v for c, v in res.items()}
        return True

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def leading_indices(self) -> set[int]:
        return set(self._rows)


def column_space(matrix: SparseMatrix) -> EchelonSpace:
    space = EchelonSpace()
    for col in matrix.columns():
        space.add(col)
    return space


def kernel_basis(matrix: SparseMatrix) -> list[Vector]:
    """Basis of {x : Mx = 0}, one vector per free column of the RREF."""
    rref_rows = _rref(matrix)
    pivots = {min(r): r for r in rref_rows}
    pivot_cols = set(pivots)
    basis: list[Vector] = []
    for f in range(matrix.cols):
        if f in pivot_cols:
            continue
        vec: Vector = {f: Scalar.one()}
        for p, row in pivots.items():
            coeff = row.get(f)
            if coeff is not None and not coeff.is_zero:
                vec[p] = -coeff
        basis.append(vec)
    return basis


def _rref(matrix: SparseMatrix) -> list[Vector]:
    """Reduced row echelon rows (pivot coefficient 1, pivots cleared)."""
    rows = [r for r in matrix.row_dicts() if r]
    done: list[Vector] = []
    while rows:
        idx = min(range(len(rows)), key=lambda i: (min(rows[i]), len(rows[i])))
        piv = rows.pop(idx)
        pcol = min(piv)
        inv = Scalar.one() / piv[pcol]
        piv = {c: inv * v for c, v in piv.items()}
        nxt = []
        for row in rows:
            coeff = row.get(pcol)
            if coeff is None:
                nxt.append(row)
                continue
            new = {}
            for c in set(row) | set(piv):
                s = row.get(c, Scalar.zero()) - coeff * piv.get(c, Scalar.zero())
                if not s.is_zero:
                    new[c] = s
            if new:
                nxt.append(new)
        rows = nxt
        # clear pivot column from earlier rows
        for i, row in enumerate(done):
            coeff = row.get(pcol)
            if coeff is None:
                continue
            new = {}
            for c in set(row) | set(piv):
                s = row.get(c, Scalar.zero()) - coeff * piv.get(c, Scalar.zero())
                if not s.is_zero:
                    new[c] = s
            done[i] = new
        done.append(piv)
    return [r for r in done if r]
