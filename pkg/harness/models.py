"""Result accumulators, anneal ensembles, sweep plans and run manifests."""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from codes.exceptions import ConfigurationError, DimensionError


@dataclass
class BerStats:
    bits_total: int = 0
    bit_errors: int = 0
    frames_total: int = 0
    frame_errors: int = 0

    def add(self, decoded, truth):
        decoded = np.asarray(decoded)
        truth = np.asarray(truth)
        if decoded.shape != truth.shape or decoded.ndim != 1:
            raise DimensionError(f'decoded shape {decoded.shape} does not match truth {truth.shape}')
        errors = int(np.count_nonzero((decoded.astype(np.uint8) & 1) != (truth.astype(np.uint8) & 1)))
        self.add_counts(truth.shape[0], errors)
        return errors

    def add_counts(self, bits, errors, frames=1, frame_errors=None):
        self.bits_total += int(bits)
        self.bit_errors += int(errors)
        self.frames_total += int(frames)
        self.frame_errors += int(errors > 0) if frame_errors is None else int(frame_errors)

    def merge(self, other):
        self.bits_total += other.bits_total
        self.bit_errors += other.bit_errors
        self.frames_total += other.frames_total
        self.frame_errors += other.frame_errors
        return self

    @property
    def ber(self):
        return self.bit_errors / self.bits_total if self.bits_total else math.nan

    @property
    def fer(self):
        return self.frame_errors / self.frames_total if self.frames_total else math.nan

    @property
    def stderr_ber(self):
        """Normal-approximation standard error of the BER estimate."""
        if not self.bits_total:
            return math.nan
        ber = self.ber
        return math.sqrt(ber * (1.0 - ber) / self.bits_total)


@dataclass(frozen=True)
class Solution:
    bits: tuple
    energy: float
    multiplicity: int
    errors: int


class AnnealEnsemble:
    """
    Distinct anneal results ranked by energy (ties by bit pattern).
    `errors` is each solution's bit-error count against the truth.
    """

    def __init__(self, solutions):
        self.solutions = sorted(solutions, key=lambda s: (s.energy, s.bits))

    @property
    def num_anneals(self):
        return sum(s.multiplicity for s in self.solutions)

    def probabilities(self):
        return np.array([s.multiplicity for s in self.solutions], dtype=np.float64) / self.num_anneals

    def errors(self):
        return np.array([s.errors for s in self.solutions], dtype=np.float64)

    def __len__(self):
        return len(self.solutions)


@dataclass(frozen=True)
class SweepPlan:
    code: str
    z: int
    ebno_db: tuple
    decoders: tuple
    alpha: tuple
    messages: int
    seed: int
    code_format: str = None
    sweeps: int = 10000
    num_anneals: int = 10
    beta_start: float = 0.1
    beta_end: float = 5.0
    bp_max_iterations: int = 20
    bp_schedule: str = 'flooding'
    machine_total_time: float = 2.2e-6
    machine_time_constant: float = 1e-9
    machine_dt: float = None
    machine_spinfix_rate: float = 2e8
    machine_spinfix_decay: float = 4e-7
    machine_integrator: str = 'rk4'
    machine_initial: str = 'random'

    def to_dict(self):
        data = asdict(self)
        for key in ('ebno_db', 'decoders', 'alpha'):
            data[key] = list(data[key])
        return data


@dataclass
class RunManifest:
    command: str
    tool_version: str
    master_seed: int
    arguments: dict
    started_at: str
    finished_at: str = None
    defaults: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=dict)
    cells: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + '\n',
                              encoding='utf-8')

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f'{path}: not a manifest ({exc})')
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f'{path}: unexpected manifest layout ({exc})')
