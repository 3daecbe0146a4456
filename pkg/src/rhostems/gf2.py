"""Exact linear algebra over GF(2) with bit-packed rows.

A BitMatrix stores each row as one Python int (bit j = column j), i.e.
bit-packed with 64 columns per machine word at the C level.  Row
reduction runs on the compiled Cython kernel when available and on the
pure-Python engine otherwise; both give identical, deterministic output.
Kernel bases are returned in echelon form with pivot-free coordinates
set canonically, so results are reproducible across runs and engines.

All functions are pure and inputs are never mutated, so everything here
is safe for unrestricted parallel use.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf2_py

try:  # compiled kernel is optional; fall back to pure Python
    from . import _gf2core

    _rref_ints = _gf2core.rref_ints
    ENGINE = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    _rref_ints = gf2_py.rref_ints
    ENGINE = "python"


class DimensionError(ValueError):
    """Raised when vector/matrix shapes do not match."""


@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix; data[i] is row i packed into one int."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise DimensionError(f"{len(self.data)} rows given, {self.rows} declared")
        if self.cols < 0:
            raise DimensionError("negative column count")
        limit = 1 << self.cols
        for r in self.data:
            if r < 0 or r >= limit:
                raise DimensionError("row has bits beyond declared column count")

    @classmethod
    def from_rows(cls, int_rows: list[int], cols: int) -> "BitMatrix":
        return cls(len(int_rows), cols, tuple(int_rows))

    @classmethod
    def from_dense(cls, entries: list[list[int]]) -> "BitMatrix":
        rows = len(entries)
        cols = len(entries[0]) if entries else 0
        data = []
        for row in entries:
            if len(row) != cols:
                raise DimensionError("ragged dense matrix")
            r = 0
            for j, e in enumerate(row):
                if e & 1:
                    r |= 1 << j
            data.append(r)
        return cls(rows, cols, tuple(data))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_dense(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self.cols, self.rows, tuple(out))

    def mat_vec(self, v: int) -> int:
        """Matrix times column vector (v packed by column index)."""
        out = 0
        for i, r in enumerate(self.data):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def compose(self, other: "BitMatrix") -> "BitMatrix":
        """self @ other over GF(2) (self.cols must equal other.rows)."""
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        # row i of result = XOR of rows of `other` selected by row i of self
        out = []
        for r in self.data:
            acc = 0
            rr = r
            while rr:
                low = rr & -rr
                acc ^= other.data[low.bit_length() - 1]
                rr ^= low
            out.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.data)


@dataclass(frozen=True)
class RrefResult:
    rank: int
    pivots: tuple[int, ...]
    kernel_basis: tuple[int, ...]


def rref(m: BitMatrix) -> RrefResult:
    """Rank, pivot columns and canonical kernel basis of m.

    Total function: empty matrices are fine (rank 0, kernel = identity
    coordinates).  rank + len(kernel_basis) == cols always holds.
    """
    rank, pivots, reduced = _rref_ints(list(m.data), m.cols)
    pivot_set = set(pivots)
    basis = []
    for j in range(m.cols):
        if j in pivot_set:
            continue
        v = 1 << j
        jmask = 1 << j
        for i, p in enumerate(pivots):
            if reduced[i] & jmask:
                v |= 1 << p
        basis.append(v)
    return RrefResult(rank, tuple(pivots), tuple(basis))


def rank(m: BitMatrix) -> int:
    return _rref_ints(list(m.data), m.cols)[0]


def solve(m: BitMatrix, b: int) -> int | None:
    """One solution x of m·x = b, or None when b is outside the column span.

    b is packed by row index; x by column index.  When solutions exist the
    returned one has free coordinates zero, hence is deterministic.
    """
    if b < 0 or b >> m.rows:
        raise DimensionError("right-hand side longer than row count")
    aug = [r | (((b >> i) & 1) << m.cols) for i, r in enumerate(m.data)]
    rank_, pivots, reduced = _rref_ints(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = 0
    bcol = 1 << m.cols
    for i, p in enumerate(pivots):
        if reduced[i] & bcol:
            x |= 1 << p
    return x


def sparse_rank(rows: list[set[int]]) -> int:
    """Rank over GF(2) of a sparse matrix given as row index-sets.

    Gaussian elimination with minimum-weight pivot rows (lazy heap) and
    rarest-column pivots to limit fill-in; input row sets are consumed.
    Suited to cobar differentials (a few entries per row) where dense
    elimination is infeasible.
    """
    import heapq

    rows = [r for r in rows if r]
    col_rows: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    dead = [False] * len(rows)
    rank = 0
    while heap:
        wt, piv_row = heapq.heappop(heap)
        if dead[piv_row]:
            continue
        r = rows[piv_row]
        if not r:
            dead[piv_row] = True
            continue
        if len(r) != wt:
            heapq.heappush(heap, (len(r), piv_row))
            continue
        piv_col = min(r, key=lambda c: (len(col_rows[c]), c))
        rank += 1
        dead[piv_row] = True
        users = col_rows[piv_col] - {piv_row}
        for c in r:
            col_rows[c].discard(piv_row)
        for j in users:
            rj = rows[j]
            for c in r:
                if c in rj:
                    rj.discard(c)
                    col_rows[c].discard(j)
                else:
                    rj.add(c)
                    col_rows[c].add(j)
            if rj:
                heapq.heappush(heap, (len(rj), j))
            else:
                dead[j] = True
        rows[piv_row] = set()
    return rank


def reduce_mod_rowspace(rows: list[int], cols: int) -> "Reducer":
    """Precompute a reducer for membership tests modulo a row space."""
    _, pivots, reduced = _rref_ints(rows, cols)
    return Reducer(tuple(pivots), tuple(reduced))


@dataclass(frozen=True)
class Reducer:
    """Reduces vectors against a fixed RREF basis (e.g. image of d)."""

    pivots: tuple[int, ...]
    reduced: tuple[int, ...]

    def reduce(self, v: int) -> int:
        for p, r in zip(self.pivots, self.reduced):
            if (v >> p) & 1:
                v ^= r
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0
