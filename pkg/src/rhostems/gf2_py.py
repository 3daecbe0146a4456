"""Pure-Python GF(2) row reduction on integer-packed rows.

Each matrix row is a single Python int; bit j is column j.  Python ints
are already bit-packed words under the hood, so XOR of two rows is one
C-level operation regardless of width.  This module is the fallback
engine used when the compiled extension is unavailable; both engines
must produce identical output (same pivots, same reduced rows).
"""

from __future__ import annotations


def rref_ints(rows: list[int], cols: int) -> tuple[int, list[int], list[int]]:
    """Reduced row echelon form over GF(2).

    Args:
        rows: matrix rows, one int per row (bit j = column j).
        cols: number of columns.

    Returns:
        (rank, pivots, reduced) where pivots is the strictly increasing
        list of pivot columns and reduced holds the nonzero reduced rows,
        row i having its leading 1 in column pivots[i].
    """
    reduced: list[int] = []
    pivots: list[int] = []
    work = [r for r in rows if r]
    for col in range(cols):
        mask = 1 << col
        # Find a row with a 1 in this column.
        src = -1
        for i, r in enumerate(work):
            if r & mask:
                src = i
                break
        if src < 0:
            continue
        piv = work.pop(src)
        # Eliminate below.
        work = [r ^ piv if r & mask else r for r in work]
        work = [r for r in work if r]
        # Eliminate above.
        for i, r in enumerate(reduced):
            if r & mask:
                reduced[i] = r ^ piv
        reduced.append(piv)
        pivots.append(col)
        if not work:
            break
    return len(pivots), pivots, reduced


def kernel_ints(rows: list[int], cols: int) -> list[int]:
    """Canonical kernel basis: one vector per free column, ascending.

    The vector for free column j has bit j set and its pivot-column bits
    determined by back substitution; free coordinates other than j are 0.
    """
    rank, pivots, reduced = rref_ints(rows, cols)
    pivot_set = set(pivots)
    basis: list[int] = []
    for j in range(cols):
        if j in pivot_set:
            continue
        v = 1 << j
        jmask = 1 << j
        for i, p in enumerate(pivots):
            if reduced[i] & jmask:
                v |= 1 << p
        basis.append(v)
    return basis


def solve_ints(rows: list[int], cols: int, b: list[int]) -> int | None:
    """Solve M x = b over GF(2); returns x as an int, or None.

    b is given per row (bit i of the augmented column for row i).
    """
    aug = [r | (bi << cols) for r, bi in zip(rows, b)]
    rank, pivots, reduced = rref_ints(aug, cols + 1)
    if pivots and pivots[-1] == cols:
        return None
    x = 0
    bcol = 1 << cols
    for i, p in enumerate(pivots):
        if reduced[i] & bcol:
            x |= 1 << p
    return x
