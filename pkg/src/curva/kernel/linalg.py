"""Exact linear algebra over Q(i).

Two layers:

* Scalar-level RREF (rank / kernel / solve) with deterministic pivoting:
  first row with a nonzero entry in column order.  This is the reference
  implementation behind every witness construction.

* An incremental echelon engine over Z[i] (rows are flat int lists
  ``[re0, im0, re1, im1, ...]``) used by the valuation machinery, where many
  thousands of nested rank queries share pivot state.  Cross-multiplication
  keeps everything in integers; rows are content-normalized to control growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .scalar import ONE, Scalar, ZERO


# -- Scalar-level reference implementation -----------------------------------


def rref(rows):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        sel = None
        for i in range(rank, len(m)):
            if not m[i][col].is_zero():
                sel = i
                break
        if sel is None:
            continue
        m[rank], m[sel] = m[sel], m[rank]
        inv = m[rank][col].inverse()
        m[rank] = [c * inv for c in m[rank]]
        for i in range(len(m)):
            if i != rank and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    return m[:rank], pivots


def rank(rows) -> int:
    return len(rref(rows)[0])


@dataclass(frozen=True)
class Subspace:
    """A subspace given by a row-reduced basis."""

    ambient_dim: int
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        work = list(vec)
        for row in self.basis:
            lead = next(i for i, c in enumerate(row) if not c.is_zero())
            if not work[lead].is_zero():
                f = work[lead]
                work = [a - f * b for a, b in zip(work, row)]
        return all(c.is_zero() for c in work)

    @staticmethod
    def from_rows(ambient_dim: int, rows) -> "Subspace":
        reduced, _ = rref(rows)
        return Subspace(ambient_dim, tuple(tuple(r) for r in reduced))


def kernel(rows, ncols=None) -> Subspace:
    """Nullspace of the matrix (rows act on column vectors)."""
    if rows:
        ncols = len(rows[0])
    if ncols is None:
        raise ValueError("kernel of empty matrix needs ncols")
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [ZERO] * ncols
        vec[fcol] = ONE
        for r, pcol in zip(reduced, pivots):
            vec[pcol] = -r[fcol]
        basis.append(tuple(vec))
    return Subspace(ncols, tuple(basis))


def solve(rows, rhs):
    """One solution of M x = rhs, or None if inconsistent."""
    if not rows:
        return None if any(not c.is_zero() for c in rhs) else []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    sol = [ZERO] * ncols
    for r, pcol in zip(reduced, pivots):
        if pcol == ncols:
            return None
        sol[pcol] = r[ncols]
    return sol


# -- integer echelon engine ----------------------------------------------------


def scalar_row_to_int(row) -> list:
    den = 1
    for c in row:
        den = den * c.re.denominator // gcd(den, c.re.denominator)
        den = den * c.im.denominator // gcd(den, c.im.denominator)
    out = []
    for c in row:
        out.append(int(c.re * den))
        out.append(int(c.im * den))
    return out


def scalar_column_to_int(col) -> list:
    """Scale one generator string to integers by its own denominator lcm.

    Column scalings are a diagonal change of basis on generator space, so
    every rank and span computed from the transposed functional rows is
    unchanged.
    """
    return scalar_row_to_int(col)


def int_row_to_scalar(row) -> list:
    return [Scalar(row[2 * i], row[2 * i + 1]) for i in range(len(row) // 2)]


def _normalize(row) -> list:
    g = 0
    for v in row:
        if v:
            g = gcd(g, abs(v))
            if g == 1:
                break
    if g > 1:
        row = [v // g for v in row]
    return row


def _leading_col(row):
    for i in range(0, len(row), 2):
        if row[i] or row[i + 1]:
            return i // 2
    return None


class Echelon:
    """Incremental row echelon over Z[i].

    Rows are immutable once stored; ``clone`` shares them, so nested scans
    branch cheaply.
    """

    __slots__ = ("ncols", "rows", "pivot_of", "pivot_cols")

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows = []
        self.pivot_of = {}
        self.pivot_cols = []

    def clone(self) -> "Echelon":
        other = Echelon.__new__(Echelon)
        other.ncols = self.ncols
        other.rows = self.rows[:]
        other.pivot_of = dict(self.pivot_of)
        other.pivot_cols = self.pivot_cols[:]
        return other

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row) -> list:
        """Reduce a row against the stored pivots (cross-multiplication with
        per-step content normalization to control entry growth)."""
        work = row[:]
        steps = 0
        for col in self.pivot_cols:
            ra, rb = work[2 * col], work[2 * col + 1]
            if not ra and not rb:
                continue
            piv = self.rows[self.pivot_of[col]]
            pa, pb = piv[2 * col], piv[2 * col + 1]
            # work = (pa+pb i) * work - (ra+rb i) * piv
            new = [0] * len(work)
            for i in range(0, len(work), 2):
                wa, wb = work[i], work[i + 1]
                va, vb = piv[i], piv[i + 1]
                new[i] = pa * wa - pb * wb - (ra * va - rb * vb)
                new[i + 1] = pa * wb + pb * wa - (ra * vb + rb * va)
            work = new
            steps += 1
            if steps % 6 == 0:
                work = _normalize(work)
        return work

    def reduces_to_zero(self, row) -> bool:
        return _leading_col(self.reduce(row)) is None

    def add(self, row) -> bool:
        """Insert a row; returns True if the rank grew."""
        red = self.reduce(row)
        lead = _leading_col(red)
        if lead is None:
            return False
        red = _normalize(red)
        self.pivot_of[lead] = len(self.rows)
        self.rows.append(red)
        self.pivot_cols.append(lead)
        self.pivot_cols.sort()
        return True
