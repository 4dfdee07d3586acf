from pathlib import Path

from codes.io import FORMATS, save_alist
from harness.decoding import load_parity_check
from harness.management.base import SimulatorCommand


class Command(SimulatorCommand):
    help = 'Expands a base graph by a lifting factor, writes the parity-check matrix as alist and prints "m n nnz".'
    command_name = 'construct'
    replayable = ('bg', 'z', 'format', 'out')

    def add_command_arguments(self, parser):
        parser.add_argument('--bg', metavar='FILE',
                            help='Base graph file, or bundled-bg1 / bundled-bg2 for the built-in protographs.')
        parser.add_argument('--z', type=int, help='Expansion (lifting) factor Z.')
        parser.add_argument('--format', choices=FORMATS,
                            help='Format of --bg when it is a file; guessed from the extension otherwise.')
        parser.add_argument('--out', metavar='FILE', help='Where to write the expanded matrix in alist format.')

    def run(self, **options):
        if not options['bg'] or not options['out']:
            self.usage_error('--bg and --out are required')
        h, label = load_parity_check(options['bg'], options['z'], options['format'])
        out = Path(options['out'])
        save_alist(h, out)
        self.manifest(options, seed=None, outputs=[out.name]).save(out.with_suffix('.manifest.json'))
        self.stdout.write(f'{h.m} {h.n} {h.nnz}')
