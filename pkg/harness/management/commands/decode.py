from fractions import Fraction
from pathlib import Path

import numpy as np

from annealing.serializers import SaConfigSerializer
from channel.awgn import modulate, transmit
from codes.generator import build_generator
from codes.io import FORMATS
from decoders.models import SCHEDULES
from decoders.serializers import BpConfigSerializer
from formulations.qubo import alpha_guarantee_bound
from harness.decoding import BP, DECODERS, MACHINE, DecoderSuite, load_parity_check, parse_decoder, validate_config
from harness.management.base import SimulatorCommand
from harness.sweep import decoder_seed, trial_rng
from machine.models import INITIAL_STATES, INTEGRATORS
from machine.serializers import MachineConfigSerializer


def _present(**values):
    return {key: value for key, value in values.items() if value is not None}


class Command(SimulatorCommand):
    help = ('Encodes one random message, sends it over BPSK/AWGN and decodes it, printing a key=value report. '
            'A failed decode is reported, not an error.')
    command_name = 'decode'
    replayable = (
        'code', 'format', 'z', 'decoder', 'ebno', 'seed', 'alpha', 'iterations', 'schedule',
        'sweeps', 'anneals', 'beta_start', 'beta_end', 'total_time', 'time_constant', 'dt',
        'integrator', 'spinfix_rate', 'spinfix_decay', 'gain', 'initial', 'trajectory_nodes',
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--code', metavar='FILE',
                            help='alist or base graph file, or bundled-bg1 / bundled-bg2.')
        parser.add_argument('--format', choices=FORMATS, help='Format of --code when it is a file.')
        parser.add_argument('--z', type=int, help='Expansion factor for base graphs.')
        parser.add_argument('--decoder', help=f'One of {", ".join(DECODERS)}; "name@N" sets the iteration budget.')
        parser.add_argument('--ebno', type=float, default=3.0, help='Eb/No in dB (default 3).')
        parser.add_argument('--seed', type=int, help='Master seed; falls back to ISING_LDPC_SEED.')
        parser.add_argument('--alpha', type=float, help='Parity penalty weight for the annealers and the machine.')
        parser.add_argument('--iterations', type=int, help='BP iteration limit.')
        parser.add_argument('--schedule', choices=SCHEDULES, help='BP message schedule.')
        parser.add_argument('--sweeps', type=int, help='Annealing sweeps per anneal.')
        parser.add_argument('--anneals', type=int, help='Independent anneals per word.')
        parser.add_argument('--beta-start', type=float, help='Initial inverse temperature.')
        parser.add_argument('--beta-end', type=float, help='Final inverse temperature.')
        parser.add_argument('--total-time', type=float, help='Machine anneal time in seconds.')
        parser.add_argument('--time-constant', type=float, help='Machine node time constant in seconds.')
        parser.add_argument('--dt', type=float, help='Machine integration step; defaults to a fraction of the time constant.')
        parser.add_argument('--integrator', choices=INTEGRATORS, help='Machine integrator.')
        parser.add_argument('--spinfix-rate', type=float, help='Initial spin-fix rate per second.')
        parser.add_argument('--spinfix-decay', type=float, help='Spin-fix rate decay time in seconds.')
        parser.add_argument('--gain', action='store_true', default=None,
                            help='Ramp the machine coupling gain up over the anneal.')
        parser.add_argument('--initial', choices=INITIAL_STATES, help='Machine initial voltages.')
        parser.add_argument('--trajectory-nodes', type=int, help='Node voltages kept in a trajectory dump.')
        parser.add_argument('--dump-trajectory', metavar='FILE',
                            help='Write the machine trajectory as CSV (machine decoder only).')
        parser.add_argument('--save-manifest', metavar='FILE', help='Also write a manifest.json for this run.')

    def suite(self, options, seed):
        bp = validate_config(BpConfigSerializer, _present(
            schedule=options['schedule'], max_iterations=options['iterations']))
        sa = validate_config(SaConfigSerializer, _present(
            sweeps=options['sweeps'], num_anneals=options['anneals'],
            beta_start=options['beta_start'], beta_end=options['beta_end'], seed=seed))
        machine = validate_config(MachineConfigSerializer, _present(
            total_time=options['total_time'], time_constant=options['time_constant'], dt=options['dt'],
            integrator=options['integrator'], alpha=options['alpha'], spinfix_rate=options['spinfix_rate'],
            spinfix_decay=options['spinfix_decay'], gain_enabled=options['gain'], initial=options['initial'],
            trajectory_nodes=options['trajectory_nodes'], seed=seed))
        return DecoderSuite(bp=bp, sa=sa, machine=machine)

    def run(self, **options):
        if not options['code'] or not options['decoder']:
            self.usage_error('--code and --decoder are required')
        spec = parse_decoder(options['decoder'])
        if options['dump_trajectory'] and spec.family != MACHINE:
            self.usage_error('--dump-trajectory needs the machine decoder')
        seed = options['seed'] = self.resolve_seed(options['seed'])
        h, label = load_parity_check(options['code'], options['z'], options['format'])
        generator = build_generator(h)
        suite = self.suite(options, seed)

        # same draws as trial 0 of a sweep at its first Eb/No point
        rng = trial_rng(seed, 0, 0)
        message = rng.integers(0, 2, generator.k, dtype=np.uint8)
        observation = transmit(modulate(generator.encode(message)), options['ebno'],
                               Fraction(generator.k, h.n), rng)
        outcome = suite.decode(spec, h, observation, alpha=options['alpha'], seed=decoder_seed(seed, 0, 0),
                               trajectory=options['dump_trajectory'])

        errors = int(np.count_nonzero(generator.extract_message(outcome.bits) != message))
        pairs = [
            ('code', label), ('n', h.n), ('k', generator.k), ('decoder', spec.name),
            ('formulation', spec.algorithm), ('ebno_db', f'{options["ebno"]:g}'), ('seed', seed),
            ('decoded_ok', str(errors == 0).lower()), ('syndrome_ok', str(outcome.success).lower()),
            ('bit_errors', errors), ('message_bits', generator.k), ('iterations', outcome.iterations),
        ]
        if spec.family != BP:
            alpha = suite.machine.alpha if options['alpha'] is None else options['alpha']
            pairs.append(('alpha', f'{alpha:g}'))
            pairs.append(('alpha_bound', f'{alpha_guarantee_bound(observation.received):.6g}'))
        if outcome.energy is not None:
            pairs.append(('energy', f'{outcome.energy:.6g}'))
        if outcome.elapsed_time is not None:
            pairs.append(('elapsed_time', f'{outcome.elapsed_time:.6g}'))
        if outcome.anneals:
            pairs.append(('anneals', len(outcome.anneals)))
            pairs.append(('anneals_ok', sum(a.success for a in outcome.anneals)))
        if spec.family == MACHINE:
            pairs.append(('spinfixes', outcome.details['spinfixes']))
            pairs.append(('satisfied_checks', outcome.details['satisfied_checks']))
        self.report(pairs)

        outputs = []
        if options['dump_trajectory']:
            outputs.append(Path(options['dump_trajectory']).name)
            self.manifest(options, seed, outputs=outputs).save(
                Path(options['dump_trajectory']).with_suffix('.manifest.json'))
        if options['save_manifest']:
            self.manifest(options, seed, outputs=outputs).save(options['save_manifest'])
