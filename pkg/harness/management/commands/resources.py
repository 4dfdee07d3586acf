import numpy as np

from codes.io import FORMATS
from formulations.qubo import alpha_guarantee_bound, export_qubo
from formulations.resources import FORMULATIONS, formulation_model, resource_report
from harness.decoding import load_parity_check
from harness.management.base import SimulatorCommand


class Command(SimulatorCommand):
    help = ('Prints spin, auxiliary spin and coupler counts of one formulation of a code, and the alpha '
            'above which no violated check can pay off for the noiseless word.')
    command_name = 'resources'
    replayable = ('code', 'format', 'z', 'formulation', 'alpha', 'export')

    def add_command_arguments(self, parser):
        parser.add_argument('--code', metavar='FILE',
                            help='alist or base graph file, or bundled-bg1 / bundled-bg2.')
        parser.add_argument('--format', choices=FORMATS, help='Format of --code when it is a file.')
        parser.add_argument('--z', type=int, help='Expansion factor for base graphs.')
        parser.add_argument('--formulation', choices=FORMULATIONS, default='co-designed',
                            help='co-designed parity units, or the unary / binary QUBO (default co-designed).')
        parser.add_argument('--alpha', type=float, default=1.0,
                            help='Parity penalty weight of the exported QUBO (default 1).')
        parser.add_argument('--export', metavar='FILE',
                            help='Write the unary or binary QUBO of the noiseless all-zero word as '
                                 '"i j coeff" triplets.')

    def run(self, **options):
        if not options['code']:
            self.usage_error('--code is required')
        if options['export'] and options['formulation'] == 'co-designed':
            self.usage_error('--export needs --formulation unary or binary')
        if not options['alpha'] > 0:
            self.usage_error('--alpha must be positive')
        h, label = load_parity_check(options['code'], options['z'], options['format'])
        model = formulation_model(h, options['formulation'], options['alpha'])
        report = resource_report(model)
        pairs = report.as_pairs()
        self.stdout.write(' '.join(f'{key}={value}' for key, value in pairs[:3]))
        self.stdout.write(' '.join(f'{key}={value}' for key, value in pairs[3:]))
        self.stdout.write(f'convention: {report.convention}')
        self.stdout.write(f'alpha_bound={alpha_guarantee_bound(np.ones(h.n)):g}')
        if options['export']:
            export_qubo(model, options['export'])
            self.stdout.write(self.style.SUCCESS(f'Wrote {model.num_vars}-variable QUBO to {options["export"]}'))
