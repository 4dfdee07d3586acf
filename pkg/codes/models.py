"""
Domain types for LDPC codes: protographs, sparse parity-check matrices,
systematic generator matrices and decode outcomes.

All types are immutable once built, so they can be shared read-only
between decode workers.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix

from .exceptions import DimensionError, CodeIntegrityError


def _frozen(array, dtype=np.int64):
    out = np.ascontiguousarray(array, dtype=dtype)
    out.setflags(write=False)
    return out


def as_bits(values, length=None, what='bit vector'):
    """Coerce `values` to a uint8 0/1 array, checking the length when given."""
    bits = np.asarray(values)
    if bits.ndim != 1:
        raise DimensionError(f'{what} must be one-dimensional, got shape {bits.shape}')
    bits = (bits.astype(np.int64) & 1).astype(np.uint8)
    if length is not None and bits.shape[0] != length:
        raise DimensionError(f'{what} has length {bits.shape[0]}, expected {length}')
    return bits


@dataclass(frozen=True)
class BaseGraph:
    """Protograph: (row, col, shift) entries lifted by an expansion factor Z."""

    rows: int
    cols: int
    entries: tuple
    z_max: int = 384
    rate_label: Fraction = Fraction(1, 3)
    name: str = 'custom'

    def __post_init__(self):
        entries = tuple((int(r), int(c), int(s)) for r, c, s in self.entries)
        object.__setattr__(self, 'entries', entries)
        if self.rows >= self.cols:
            raise CodeIntegrityError(
                f'base graph must have fewer rows than columns ({self.rows}x{self.cols})'
            )
        seen = set()
        for r, c, s in entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise CodeIntegrityError(f'entry ({r}, {c}) outside {self.rows}x{self.cols}')
            if s < 0:
                raise CodeIntegrityError(f'negative shift {s} at ({r}, {c})')
            if (r, c) in seen:
                raise CodeIntegrityError(f'duplicate entry at ({r}, {c})')
            seen.add((r, c))

    @property
    def num_entries(self):
        return len(self.entries)

    def row_degrees(self):
        degrees = np.zeros(self.rows, dtype=np.int64)
        for r, _, _ in self.entries:
            degrees[r] += 1
        return degrees


class ParityCheckMatrix:
    """
    Sparse binary m x n parity-check matrix H with its Tanner graph.

    Stored as CSR (row_ptr/col_idx, the check-node view) and CSC
    (col_ptr/row_idx, the variable-node view). Edges are numbered in CSR
    order; `edge_check`/`edge_var` give the endpoints of every edge.
    `layer_size` is Z for lifted codes and drives the layered BP schedule.
    """

    def __init__(self, m, n, row_ptr, col_idx, layer_size=None):
        self.m = int(m)
        self.n = int(n)
        row_ptr = np.asarray(row_ptr, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        if row_ptr.shape != (self.m + 1,) or row_ptr[0] != 0 or row_ptr[-1] != col_idx.shape[0]:
            raise CodeIntegrityError('row pointer array is inconsistent with the index array')
        if np.any(np.diff(row_ptr) < 0):
            raise CodeIntegrityError('row pointer array must be non-decreasing')
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= self.n):
            raise CodeIntegrityError(f'column index out of range [0, {self.n})')

        # sort each row and reject repeated indices
        edge_check = np.repeat(np.arange(self.m), np.diff(row_ptr))
        order = np.lexsort((col_idx, edge_check))
        col_idx = col_idx[order]
        if col_idx.size > 1:
            same_row = edge_check[1:] == edge_check[:-1]
            if np.any(same_row & (col_idx[1:] == col_idx[:-1])):
                raise CodeIntegrityError('repeated column index within a row')

        self.row_ptr = _frozen(row_ptr)
        self.col_idx = _frozen(col_idx)
        self.edge_check = _frozen(edge_check)
        self.edge_var = self.col_idx

        # CSC view; var_edges lists CSR edge ids grouped by column
        var_order = np.lexsort((edge_check, col_idx))
        self.var_edges = _frozen(var_order)
        self.row_idx = _frozen(edge_check[var_order])
        col_counts = np.bincount(col_idx, minlength=self.n)
        self.col_ptr = _frozen(np.concatenate(([0], np.cumsum(col_counts))))

        if layer_size is not None and (layer_size < 1 or self.m % layer_size):
            layer_size = None
        self.layer_size = layer_size

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_coo(cls, m, n, rows, cols, layer_size=None):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise DimensionError('row and column index arrays differ in length')
        if rows.size and (rows.min() < 0 or rows.max() >= m):
            raise CodeIntegrityError(f'row index out of range [0, {m})')
        order = np.lexsort((cols, rows))
        counts = np.bincount(rows, minlength=m)
        row_ptr = np.concatenate(([0], np.cumsum(counts)))
        return cls(m, n, row_ptr, cols[order], layer_size=layer_size)

    @classmethod
    def from_rows(cls, m, n, rows_adj, layer_size=None):
        if len(rows_adj) != m:
            raise DimensionError(f'expected {m} rows, got {len(rows_adj)}')
        counts = [len(r) for r in rows_adj]
        row_ptr = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
        col_idx = np.concatenate([np.asarray(r, dtype=np.int64) for r in rows_adj]) if m else []
        return cls(m, n, row_ptr, col_idx, layer_size=layer_size)

    @classmethod
    def from_dense(cls, matrix, layer_size=None):
        matrix = np.asarray(matrix)
        if matrix.ndim != 2:
            raise DimensionError('dense parity-check matrix must be 2-D')
        rows, cols = np.nonzero(matrix & 1 if matrix.dtype.kind in 'iub' else matrix)
        return cls.from_coo(matrix.shape[0], matrix.shape[1], rows, cols, layer_size=layer_size)

    # -- structure -------------------------------------------------------

    @property
    def nnz(self):
        return int(self.col_idx.shape[0])

    @property
    def k(self):
        return self.n - self.m

    @property
    def rate(self):
        return Fraction(self.k, self.n) if self.n else Fraction(0)

    @property
    def row_degrees(self):
        return np.diff(self.row_ptr)

    @property
    def col_degrees(self):
        return np.diff(self.col_ptr)

    @property
    def rows_adj(self):
        return [self.col_idx[self.row_ptr[j]:self.row_ptr[j + 1]] for j in range(self.m)]

    @property
    def cols_adj(self):
        return [self.row_idx[self.col_ptr[i]:self.col_ptr[i + 1]] for i in range(self.n)]

    def check(self, j):
        return self.col_idx[self.row_ptr[j]:self.row_ptr[j + 1]]

    def checks_of(self, i):
        return self.row_idx[self.col_ptr[i]:self.col_ptr[i + 1]]

    @cached_property
    def csr(self):
        data = np.ones(self.nnz, dtype=np.int32)
        return csr_matrix((data, self.col_idx, self.row_ptr), shape=(self.m, self.n))

    def to_dense(self):
        dense = np.zeros((self.m, self.n), dtype=np.uint8)
        dense[self.edge_check, self.edge_var] = 1
        return dense

    def column(self, i):
        col = np.zeros(self.m, dtype=np.uint8)
        col[self.checks_of(i)] = 1
        return col

    def layers(self):
        """Row blocks processed together by the layered schedule."""
        size = self.layer_size or 1
        return [np.arange(start, start + size) for start in range(0, self.m, size)]

    def syndrome(self, c):
        """H·c over GF(2)."""
        bits = as_bits(c, self.n, what='codeword')
        return ((self.csr @ bits.astype(np.int32)) & 1).astype(np.uint8)

    def is_codeword(self, c):
        return not self.syndrome(c).any()

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) \
            and np.array_equal(self.row_ptr, other.row_ptr) \
            and np.array_equal(self.col_idx, other.col_idx)

    __hash__ = None

    def __repr__(self):
        return f'<ParityCheckMatrix {self.m}x{self.n} nnz={self.nnz}>'


def syndrome(h, c):
    return h.syndrome(c)


@dataclass(frozen=True)
class GeneratorMatrix:
    """Systematic k x n generator. Message bit t lands at message_positions[t]."""

    matrix: np.ndarray
    message_positions: np.ndarray
    parity_positions: np.ndarray
    permutation: np.ndarray
    rank: int

    @property
    def k(self):
        return int(self.matrix.shape[0])

    @property
    def n(self):
        return int(self.matrix.shape[1])

    def encode(self, message):
        message = as_bits(message, self.k, what='message')
        return ((message.astype(np.int64) @ self.matrix) & 1).astype(np.uint8)

    def extract_message(self, codeword):
        return as_bits(codeword, self.n, what='codeword')[self.message_positions]


@dataclass
class DecodeOutcome:
    """
    Result of one decode attempt, common to every decoder family.

    `bits` are in codeword order. `iterations` counts BP iterations, SA
    sweeps or machine integration steps. `energy` is the final objective
    value for annealers and the machine.
    """

    bits: np.ndarray
    success: bool
    iterations: int = 0
    energy: float = None
    elapsed_time: float = None
    anneals: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
