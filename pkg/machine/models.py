"""
Configuration and state of the augmented Ising machine simulation.

Units are normalized: node voltages live on [-rail, rail] and the
coupling conductance over node capacitance is folded into one time
constant.
"""

import logging
from dataclasses import dataclass

import numpy as np

from codes.exceptions import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

INTEGRATORS = ('rk4', 'rk45')
INITIAL_STATES = ('random', 'channel')


@dataclass(frozen=True)
class MachineConfig:
    time_constant: float = 1e-9
    total_time: float = 2.2e-6
    dt: float = None
    integrator: str = 'rk4'
    alpha: float = 2.0
    rail: float = 1.0
    spinfix_rate: float = 2e8
    spinfix_decay: float = 4e-7
    clip_duration: float = None
    gain_enabled: bool = False
    gain_min: float = 0.1
    gain_tau: float = 2e-7
    seed: int = None
    initial: str = 'random'
    trajectory_nodes: int = 16

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, 'dt', self.time_constant / 50)
        if self.clip_duration is None:
            object.__setattr__(self, 'clip_duration', 2 * self.dt)
        if not self.time_constant > 0 or not self.total_time > 0 or not self.dt > 0:
            raise ConfigurationError('time_constant, total_time and dt must be positive')
        if self.dt >= self.time_constant:
            raise ConfigurationError(
                f'dt={self.dt:g} must be below time_constant={self.time_constant:g}; '
                f'the integration is unstable otherwise'
            )
        if self.dt > self.time_constant / 10:
            logger.warning(f'dt={self.dt:g} is coarse for time_constant={self.time_constant:g}')
        if self.integrator not in INTEGRATORS:
            raise ConfigurationError(f'unknown integrator {self.integrator!r}')
        if self.initial not in INITIAL_STATES:
            raise ConfigurationError(f'unknown initial state {self.initial!r}')
        if not self.alpha > 0 or not self.rail > 0:
            raise ConfigurationError('alpha and rail must be positive')
        if self.spinfix_rate < 0 or not self.spinfix_decay > 0 or self.clip_duration < 0:
            raise ConfigurationError('invalid spin-fix schedule')
        if not 0 <= self.gain_min <= 1 or not self.gain_tau > 0:
            raise ConfigurationError('gain_min must lie in [0, 1] and gain_tau must be positive')

    @property
    def num_steps(self):
        return max(1, int(round(self.total_time / self.dt)))

    def gain(self, t):
        if not self.gain_enabled:
            return 1.0
        return self.gain_min + (1.0 - self.gain_min) * (1.0 - np.exp(-t / self.gain_tau))

    def spinfix_rate_at(self, t):
        return self.spinfix_rate * np.exp(-t / self.spinfix_decay)

    def expected_spinfixes(self, start, end):
        """Integral of the spin-fix rate over [start, end)."""
        return self.spinfix_rate * self.spinfix_decay * (
            np.exp(-start / self.spinfix_decay) - np.exp(-end / self.spinfix_decay))


class MachineState:
    """
    Node voltages plus the quantized spins and check parities read from
    them. A node clipped by a spin-fix event is held at `clip_level`
    until `clip_until`.
    """

    def __init__(self, h, voltages, rail=1.0, time=0.0):
        voltages = np.array(voltages, dtype=np.float64)
        if voltages.ndim != 1 or voltages.shape[0] != h.n:
            raise DimensionError(f'voltage vector has shape {voltages.shape}, expected ({h.n},)')
        self.h = h
        self.rail = rail
        self.voltages = np.clip(voltages, -rail, rail)
        self.time = float(time)
        self.clip_until = np.full(h.n, -np.inf)
        self.clip_level = np.zeros(h.n)
        self.quantize()

    def quantize(self):
        self.quantized = np.where(self.voltages >= 0, 1, -1).astype(np.int8)
        self.parities = self.compute_parities(self.quantized)

    def compute_parities(self, quantized):
        flips = np.bincount(self.h.edge_check, weights=quantized[self.h.edge_var] < 0, minlength=self.h.m)
        return (1 - 2 * (flips.astype(np.int64) & 1)).astype(np.int8)

    def clipped(self, t=None):
        return self.clip_until > (self.time if t is None else t)

    def satisfied_checks(self):
        return int(np.count_nonzero(self.parities > 0))

    def bits(self):
        return ((1 - self.quantized) // 2).astype(np.uint8)
