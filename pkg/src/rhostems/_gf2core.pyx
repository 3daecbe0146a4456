# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) row-reduction kernel on 64-bit packed rows.

Same contract as gf2_py.rref_ints, operating on a numpy uint64 matrix
with 64 columns per word.  Elimination is pure row-XOR over words.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def packed_rref(cnp.ndarray[cnp.uint64_t, ndim=2] m, int cols):
    """In-place RREF of a packed matrix; returns (rank, pivots, order).

    order[i] gives the row index (in the reduced matrix) whose leading 1
    is in column pivots[i]; rows beyond rank are zero.
    """
    cdef int nrows = m.shape[0]
    cdef int nwords = m.shape[1]
    cdef int rank = 0
    cdef int col, word, bit, i, j, w
    cdef cnp.uint64_t mask
    cdef cnp.uint64_t[:, :] M = m
    pivots = []
    for col in range(cols):
        word = col >> 6
        bit = col & 63
        mask = (<cnp.uint64_t>1) << bit
        # find pivot row at or below rank
        i = -1
        for j in range(rank, nrows):
            if M[j, word] & mask:
                i = j
                break
        if i < 0:
            continue
        if i != rank:
            for w in range(nwords):
                M[i, w], M[rank, w] = M[rank, w], M[i, w]
        # eliminate everywhere else
        for j in range(nrows):
            if j != rank and (M[j, word] & mask):
                for w in range(nwords):
                    M[j, w] ^= M[rank, w]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots


def rref_ints(rows, cols):
    """Drop-in replacement for gf2_py.rref_ints using the packed kernel."""
    work = [r for r in rows if r]
    if not work or cols == 0:
        return 0, [], []
    nwords = (cols + 63) >> 6
    m = np.zeros((len(work), nwords), dtype=np.uint64)
    cdef int i, w
    for i, r in enumerate(work):
        for w in range(nwords):
            m[i, w] = (r >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    rank, pivots = packed_rref(m, cols)
    reduced = []
    for i in range(rank):
        r = 0
        for w in range(nwords):
            r |= int(m[i, w]) << (64 * w)
        reduced.append(r)
    return rank, pivots, reduced
