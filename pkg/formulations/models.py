"""
Energy models for decoding as optimization.

QuadraticModel is a QUBO over code bits plus auxiliary bits; the
quadratic part is kept as an upper-triangular scipy CSR matrix. Bits
are 0/1 uint8 arrays.

HigherOrderModel keeps the parity checks as products of spins, with
spin +1 for bit 0 and -1 for bit 1:

    f(s) = -2 * sum_i R_i s_i - (alpha / 2) * sum_j prod_{i in j} s_i
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix, triu

from codes.exceptions import DimensionError, ParameterError


def as_spins(values, length):
    spins = np.asarray(values)
    if spins.ndim != 1 or spins.shape[0] != length:
        raise DimensionError(f'spin vector has shape {spins.shape}, expected ({length},)')
    if not np.all(np.abs(spins) == 1):
        raise ParameterError('spins must be +1 or -1')
    return spins.astype(np.int8)


class QuadraticModel:
    """F(x) = linear . x + sum_{i<j} Q_ij x_i x_j + offset."""

    def __init__(self, linear, upper, offset, var_map, encoding=None, alpha=None,
                 aux_checks=None, aux_weights=None):
        self.linear = np.asarray(linear, dtype=np.float64)
        upper = triu(csr_matrix(upper, dtype=np.float64), k=1).tocsr()
        upper.eliminate_zeros()
        upper.sort_indices()
        self.upper = upper
        self.offset = float(offset)
        self.var_map = list(var_map)
        self.encoding = encoding
        self.alpha = alpha
        self.aux_checks = np.asarray(aux_checks if aux_checks is not None else [], dtype=np.int64)
        self.aux_weights = np.asarray(aux_weights if aux_weights is not None else [], dtype=np.int64)
        if self.upper.shape != (self.num_vars, self.num_vars):
            raise DimensionError('quadratic matrix does not match the number of variables')
        if len(self.var_map) != self.num_vars:
            raise DimensionError('var_map must tag every variable')

    @property
    def num_vars(self):
        return int(self.linear.shape[0])

    @cached_property
    def num_code_vars(self):
        return sum(1 for tag in self.var_map if tag[0] == 'code')

    @property
    def num_aux_vars(self):
        return self.num_vars - self.num_code_vars

    @property
    def num_quadratic(self):
        return int(self.upper.nnz)

    @property
    def quadratic(self):
        """{(i, j): coeff} with i < j."""
        coo = self.upper.tocoo()
        return {(int(i), int(j)): float(v) for i, j, v in zip(coo.row, coo.col, coo.data)}

    @cached_property
    def symmetric(self):
        """Q + Q^T, the coupling matrix with both (i, j) and (j, i) cells."""
        return (self.upper + self.upper.T).tocsr()

    def energy(self, bits):
        bits = np.asarray(bits)
        if bits.ndim != 1 or bits.shape[0] != self.num_vars:
            raise DimensionError(f'assignment has shape {bits.shape}, expected ({self.num_vars},)')
        x = (bits.astype(np.int64) & 1).astype(np.float64)
        return float(self.linear @ x + x @ (self.upper @ x) + self.offset)

    def code_bits(self, bits):
        return np.asarray(bits, dtype=np.uint8)[:self.num_code_vars]

    def __repr__(self):
        return (f'<QuadraticModel {self.encoding} vars={self.num_vars} '
                f'aux={self.num_aux_vars} quadratic={self.num_quadratic}>')


@dataclass
class HigherOrderModel:
    h: object
    bias: np.ndarray
    alpha: float

    def __post_init__(self):
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.bias.ndim != 1 or self.bias.shape[0] != self.h.n:
            raise DimensionError(f'received vector has length {self.bias.shape[0]}, expected {self.h.n}')
        if not self.alpha > 0:
            raise ParameterError(f'alpha must be positive, got {self.alpha}')

    @property
    def n(self):
        return self.h.n

    @property
    def checks(self):
        return self.h.rows_adj

    def parities(self, spins):
        """P_j = product of the spins in check j (+1 when satisfied)."""
        spins = as_spins(spins, self.n)
        flips = np.bincount(self.h.edge_check, weights=spins[self.h.edge_var] < 0, minlength=self.h.m)
        return 1 - 2 * (flips.astype(np.int64) & 1)

    def energy(self, spins):
        spins = as_spins(spins, self.n)
        return float(-2.0 * self.bias @ spins - 0.5 * self.alpha * self.parities(spins).sum())


@dataclass(frozen=True)
class ResourceReport:
    label: str
    num_spins: int
    num_aux_spins: int
    num_couplers: int
    num_matrix_couplers: int
    num_linear_terms: int
    convention: str
    xnor_gates: int = None
    capacitors: int = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.num_aux_spins > self.num_spins:
            raise ParameterError('auxiliary spins cannot outnumber spins')

    def as_pairs(self):
        pairs = [
            ('spins', self.num_spins),
            ('aux', self.num_aux_spins),
            ('couplers', self.num_couplers),
            ('matrix_couplers', self.num_matrix_couplers),
            ('linear_terms', self.num_linear_terms),
        ]
        if self.xnor_gates is not None:
            pairs.append(('xnor_gates', self.xnor_gates))
        if self.capacitors is not None:
            pairs.append(('capacitors', self.capacitors))
        return pairs
