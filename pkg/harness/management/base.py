"""
Shared plumbing for the simulator commands: error-to-exit-code mapping,
seed resolution and run manifests.

Exit codes: 2 for usage, parse and validation errors, 3 for I/O errors,
4 for internal invariant violations.
"""

import logging
from datetime import datetime, timezone

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from channel.awgn import SIGMA_CONVENTION
from codes.exceptions import InvariantViolation
from harness.models import RunManifest
from harness.sweep import BER_CONVENTION

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
IO_ERROR = 3
INTERNAL_ERROR = 4


def now():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


class SimulatorCommand(BaseCommand):
    command_name = None
    # options recorded in manifests and restored by --manifest
    replayable = ()

    def add_arguments(self, parser):
        self.add_command_arguments(parser)
        parser.add_argument(
            '--manifest', metavar='FILE',
            help='Replay the arguments recorded in a manifest.json from an earlier run of this command.',
        )

    def add_command_arguments(self, parser):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            if options.get('manifest'):
                options = self.replay(options)
            self.started_at = now()
            return self.run(**options)
        except CommandError:
            raise
        except InvariantViolation as e:
            raise CommandError(f'Internal invariant violated: {e}', returncode=INTERNAL_ERROR)
        except ValueError as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)
        except OSError as e:
            raise CommandError(f'I/O error: {e}', returncode=IO_ERROR)

    def run(self, **options):
        raise NotImplementedError

    def replay(self, options):
        manifest = RunManifest.load(options['manifest'])
        if manifest.command != self.command_name:
            raise CommandError(
                f'{options["manifest"]} was written by "{manifest.command}", not "{self.command_name}"',
                returncode=USAGE_ERROR,
            )
        logger.info(f'Replaying {manifest.command} from {options["manifest"]} (seed {manifest.master_seed})')
        return {**options, **manifest.arguments, 'manifest': None}

    def resolve_seed(self, seed):
        """--seed, then ISING_LDPC_SEED, then a freshly drawn seed."""
        if seed is None:
            seed = settings.ISING_LDPC_SEED
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
            logger.info(f'No seed given, drew {seed}')
        return seed

    def manifest(self, options, seed, **fields):
        return RunManifest(
            command=self.command_name,
            tool_version=settings.TOOL_VERSION,
            master_seed=seed,
            arguments={key: options.get(key) for key in self.replayable},
            started_at=self.started_at,
            finished_at=now(),
            defaults=dict(settings.ISING_LDPC),
            conventions={'channel': SIGMA_CONVENTION, 'ber': BER_CONVENTION},
            **fields,
        )

    def report(self, pairs):
        for key, value in pairs:
            self.stdout.write(f'{key}={value}')

    def usage_error(self, message):
        raise CommandError(message, returncode=USAGE_ERROR)
