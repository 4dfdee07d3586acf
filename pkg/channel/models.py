from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from codes.exceptions import ParameterError, DimensionError


@dataclass(frozen=True)
class ChannelObservation:
    """Received BPSK samples R with the noise variance they were drawn at."""

    received: np.ndarray
    noise_variance: float
    ebno_db: float
    rate: Fraction
    llr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise ParameterError(f'noise variance must be positive, got {self.noise_variance}')
        received = np.array(self.received, dtype=np.float64)
        if received.ndim != 1:
            raise DimensionError('received vector must be one-dimensional')
        received.setflags(write=False)
        llr = 2.0 * received / self.noise_variance
        llr.setflags(write=False)
        object.__setattr__(self, 'received', received)
        object.__setattr__(self, 'llr', llr)

    @property
    def n(self):
        return int(self.received.shape[0])
