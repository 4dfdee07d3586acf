"""GF(2) elimination and systematic encoding."""

import logging

import numpy as np

from .models import GeneratorMatrix, as_bits

logger = logging.getLogger(__name__)


def _column_bits(packed, col):
    return (packed[:, col >> 3] >> (7 - (col & 7))) & 1


def _columns(packed, cols):
    """Unpacked bits of the selected columns, shape (rows, len(cols))."""
    cols = np.asarray(cols, dtype=np.int64)
    return ((packed[:, cols >> 3] >> (7 - (cols & 7)).astype(np.uint8)) & 1).astype(np.uint8)


def pack_rows(h):
    """Bit-packed rows of a sparse parity-check matrix, built from its CSR arrays."""
    packed = np.zeros((h.m, (h.n + 7) // 8), dtype=np.uint8)
    cols = np.asarray(h.col_idx, dtype=np.int64)
    masks = (np.uint8(0x80) >> (cols & 7).astype(np.uint8)).astype(np.uint8)
    np.bitwise_or.at(packed, (np.asarray(h.edge_check, dtype=np.int64), cols >> 3), masks)
    return packed


def _eliminate(packed, n):
    m = packed.shape[0]
    pivot_cols = []
    row = 0
    for col in range(n - 1, -1, -1):
        if row == m:
            break
        candidates = np.flatnonzero(_column_bits(packed[row:], col)) + row
        if candidates.size == 0:
            continue
        pivot = candidates[0]
        if pivot != row:
            packed[[row, pivot]] = packed[[pivot, row]]
        hits = np.flatnonzero(_column_bits(packed, col))
        hits = hits[hits != row]
        if hits.size:
            packed[hits] ^= packed[row]
        pivot_cols.append(col)
        row += 1
    return packed[:row], np.asarray(pivot_cols, dtype=np.int64)


def row_reduce(dense):
    """
    Reduced row echelon form of a binary matrix over GF(2).

    Columns are scanned from the right so that, for 5G-style matrices, the
    pivots fall on the parity columns and the information columns stay free.
    Rows are bit-packed so each elimination step XORs whole bytes.

    Returns (reduced, pivot_cols) where reduced[t] has its leading one at
    pivot_cols[t].
    """
    dense = np.asarray(dense, dtype=np.uint8)
    n = dense.shape[1]
    packed, pivot_cols = _eliminate(np.packbits(dense, axis=1), n)
    return np.unpackbits(packed, axis=1, count=n), pivot_cols


def gf2_rank(dense):
    return int(row_reduce(dense)[1].shape[0])


def build_generator(h):
    """
    Systematic generator for parity-check matrix `h`.

    The free (non-pivot) columns carry the message; pivot columns are the
    parity bits solved from the reduced rows. A rank-deficient `h` yields
    more message bits than n - m, which is logged and accepted. The
    elimination runs on packed rows, so the dense m x n matrix is never
    materialized.
    """
    packed, pivots = _eliminate(pack_rows(h), h.n)
    rank = int(pivots.shape[0])
    pivot_set = np.zeros(h.n, dtype=bool)
    pivot_set[pivots] = True
    free = np.flatnonzero(~pivot_set)
    k = free.shape[0]
    if rank < h.m:
        logger.warning(
            f'Parity-check matrix is rank deficient: rank {rank} < m {h.m}, '
            f'effective k = {k} (n - m = {h.n - h.m})'
        )

    matrix = np.zeros((k, h.n), dtype=np.uint8)
    matrix[np.arange(k), free] = 1
    # pivot bit p_t = sum over free f of reduced[t, f] * message_f
    matrix[:, pivots] = _columns(packed, free).T
    permutation = np.concatenate((free, pivots))
    logger.info(f'Built generator: k={k}, n={h.n}, rank={rank}')
    return GeneratorMatrix(
        matrix=matrix,
        message_positions=free,
        parity_positions=np.sort(pivots),
        permutation=permutation,
        rank=rank,
    )


def encode(generator, message):
    return generator.encode(as_bits(message, generator.k, what='message'))
