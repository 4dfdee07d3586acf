"""
Decoder registry shared by the sweep and the decode command.

Decoders are named on the command line and in plan files; a suffix
"@N" overrides the iteration budget (BP iterations, SA sweeps), so
"oms@7" and "oms@1" can share one sweep.
"""

import dataclasses
import logging
from pathlib import Path

from annealing.models import SaConfig
from annealing.solver import decode_via_sa
from codes.construction import BUNDLED_GRAPHS, expand_base_graph
from codes.exceptions import ConfigurationError, ParameterError
from codes.io import load_code
from codes.models import BaseGraph
from decoders.belief_propagation import decode as bp_decode
from decoders.models import BpConfig
from machine.dynamics import run as machine_run
from machine.models import MachineConfig

logger = logging.getLogger(__name__)

BP, SA, MACHINE = 'bp', 'sa', 'machine'

DECODERS = {
    'bp': (BP, 'sum-product'),
    'min-sum': (BP, 'min-sum'),
    'nms': (BP, 'normalized-min-sum'),
    'oms': (BP, 'offset-min-sum'),
    'sa-unary': (SA, 'unary'),
    'sa-binary': (SA, 'binary'),
    'sa-ho': (SA, 'higher-order'),
    'machine': (MACHINE, 'co-designed'),
}


@dataclasses.dataclass(frozen=True)
class DecoderSpec:
    name: str
    family: str
    algorithm: str
    budget: int = None

    @property
    def base_name(self):
        return self.name.split('@', 1)[0]

    @property
    def uses_alpha(self):
        return self.family != BP


def parse_decoder(text):
    """Parse "name" or "name@N" into a DecoderSpec."""
    text = str(text).strip()
    name, sep, budget = text.partition('@')
    if name not in DECODERS:
        raise ParameterError(f'unknown decoder {name!r}; expected one of {", ".join(DECODERS)}')
    family, algorithm = DECODERS[name]
    if not budget:
        if sep:
            raise ParameterError(f'decoder {text!r}: missing count after "@"')
        return DecoderSpec(name=name, family=family, algorithm=algorithm)
    if family == MACHINE:
        raise ParameterError('the machine decoder takes total_time, not an "@" budget')
    try:
        count = int(budget)
    except ValueError:
        raise ParameterError(f'decoder {text!r}: "{budget}" is not an integer')
    if count < 1:
        raise ParameterError(f'decoder {text!r}: budget must be at least 1')
    return DecoderSpec(name=text, family=family, algorithm=algorithm, budget=count)


def validate_config(serializer_class, data):
    """Run a config serializer and return the frozen config it creates."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise ConfigurationError(f'{serializer_class.__name__}: {dict(serializer.errors)}')
    return serializer.save()


def load_parity_check(code, z=None, fmt=None):
    """
    Resolve a code argument: a bundled base graph name, a base-graph file
    (needs `z`) or an alist file. Returns (h, label).
    """
    if code in BUNDLED_GRAPHS:
        if z is None:
            raise ParameterError(f'{code} needs an expansion factor')
        return expand_base_graph(BUNDLED_GRAPHS[code](), z), code
    loaded = load_code(code, fmt)
    label = Path(code).stem
    if isinstance(loaded, BaseGraph):
        if z is None:
            raise ParameterError(f'{code} is a base graph and needs an expansion factor')
        return expand_base_graph(loaded, z), label
    if z is not None:
        logger.info(f'{code} is an explicit parity-check matrix, ignoring z={z}')
    return loaded, label


@dataclasses.dataclass(frozen=True)
class DecoderSuite:
    """Family configurations a DecoderSpec is specialised from."""

    bp: BpConfig = dataclasses.field(default_factory=BpConfig)
    sa: SaConfig = dataclasses.field(default_factory=SaConfig)
    machine: MachineConfig = dataclasses.field(default_factory=MachineConfig)

    def decode(self, spec, h, observation, alpha=None, seed=None, trajectory=None):
        if spec.family == BP:
            cfg = dataclasses.replace(self.bp, algorithm=spec.algorithm,
                                      max_iterations=spec.budget or self.bp.max_iterations)
            return bp_decode(h, observation.llr, cfg)
        alpha = self.machine.alpha if alpha is None else alpha
        if spec.family == SA:
            cfg = dataclasses.replace(self.sa, sweeps=spec.budget or self.sa.sweeps,
                                      seed=self.sa.seed if seed is None else seed)
            return decode_via_sa(h, observation, spec.algorithm, alpha, cfg)
        cfg = dataclasses.replace(self.machine, alpha=alpha,
                                  seed=self.machine.seed if seed is None else seed)
        return machine_run(h, observation, cfg, trajectory=trajectory)

    def budget(self, spec):
        """The sweeps_or_time figure reported for a decoder."""
        if spec.family == BP:
            return spec.budget or self.bp.max_iterations
        if spec.family == SA:
            return spec.budget or self.sa.sweeps
        return self.machine.total_time
