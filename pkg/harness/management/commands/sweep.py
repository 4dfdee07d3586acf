import tempfile
from pathlib import Path

from harness.archive import archive_sweep
from harness.decoding import validate_config
from harness.management.base import SimulatorCommand
from harness.plan import load_plan
from harness.serializers import SweepPlanSerializer
from harness.sweep import resolve_jobs, sweep

MANIFEST_JSON = 'manifest.json'


class Command(SimulatorCommand):
    help = ('Runs a Monte-Carlo BER sweep described by a key=value plan file and writes results.csv, '
            'the optional expected-BER, best-alpha and sign-test tables, and manifest.json.')
    command_name = 'sweep'
    replayable = ('plan_data', 'jobs')

    def add_command_arguments(self, parser):
        parser.add_argument('--plan', metavar='FILE', help='Sweep plan file (key = value lines).')
        parser.add_argument('--out', metavar='DIR', help='Output directory, created if missing.')
        parser.add_argument('--jobs', type=int,
                            help='Worker processes; defaults to the JOBS setting, or the number of cores when that is 0.')
        parser.add_argument('--seed', type=int,
                            help='Master seed overriding the plan; falls back to ISING_LDPC_SEED.')

    def run(self, **options):
        if not options['out'] or not (options['plan'] or options.get('plan_data')):
            self.usage_error('--plan (or --manifest) and --out are required')
        data = options.get('plan_data') or load_plan(options['plan'])
        if options['seed'] is not None:
            data = {**data, 'seed': options['seed']}
        plan = validate_config(SweepPlanSerializer, data)

        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=out, prefix='.write-check-'):
            pass
        jobs = options['jobs'] = resolve_jobs(options['jobs'])
        options['plan_data'] = plan.to_dict()

        result = sweep(plan, jobs=jobs)
        outputs = result.write(out)
        manifest = self.manifest(options, plan.seed, cells=result.cell_records(),
                                 outputs=outputs + [MANIFEST_JSON], errors=result.failures())
        manifest.save(out / MANIFEST_JSON)
        archive_sweep(manifest.to_dict(), result.result_rows())

        for failure in result.failures():
            self.stderr.write(self.style.WARNING(f'Cell failed: {failure}'))
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {", ".join(outputs)} and {MANIFEST_JSON} to {out} (seed {plan.seed})'))
