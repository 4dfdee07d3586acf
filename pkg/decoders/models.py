from dataclasses import dataclass

import numpy as np

from codes.exceptions import ParameterError

ALGORITHMS = ('sum-product', 'min-sum', 'normalized-min-sum', 'offset-min-sum')
SCHEDULES = ('flooding', 'layered')


@dataclass(frozen=True)
class BpConfig:
    algorithm: str = 'sum-product'
    schedule: str = 'flooding'
    max_iterations: int = 20
    normalization_factor: float = 0.75
    offset_beta: float = 0.5
    llr_clamp: float = 25.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f'unknown BP algorithm {self.algorithm!r}')
        if self.schedule not in SCHEDULES:
            raise ParameterError(f'unknown BP schedule {self.schedule!r}')
        if self.max_iterations < 1:
            raise ParameterError('max_iterations must be >= 1')
        if not 0 < self.normalization_factor <= 1:
            raise ParameterError('normalization_factor must lie in (0, 1]')
        if self.offset_beta < 0:
            raise ParameterError('offset_beta must be >= 0')
        if not self.llr_clamp > 0:
            raise ParameterError('llr_clamp must be > 0')


class EdgeMessages:
    """v2c / c2v buffers, one slot per Tanner edge in CSR edge order."""

    def __init__(self, num_edges):
        self.v2c = np.zeros(num_edges, dtype=np.float64)
        self.c2v = np.zeros(num_edges, dtype=np.float64)

    def reset(self):
        self.v2c.fill(0.0)
        self.c2v.fill(0.0)

    def __len__(self):
        return self.v2c.shape[0]
