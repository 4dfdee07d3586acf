"""
Monte-Carlo BER sweeps with common random numbers.

Trial t at Eb/No index e draws its message and noise from
SeedSequence([seed, e, t]) whatever the decoder, so every decoder in a
sweep sees the same received words. Each cell records a SHA-256 digest
of those words and the digests are compared across decoders before any
output is written.
"""

import csv
import dataclasses
import hashlib
import itertools
import logging
import math
import os
from fractions import Fraction
from pathlib import Path

import django
import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from annealing.models import SaConfig
from channel.awgn import SIGMA_CONVENTION, modulate, transmit, uncoded_ber
from codes.exceptions import InvariantViolation
from codes.generator import build_generator
from decoders.models import BpConfig
from machine.models import MachineConfig
from .decoding import DecoderSuite, load_parity_check, parse_decoder
from .metrics import build_ensemble, expected_ber, mean_ber, sign_test
from .models import BerStats

logger = logging.getLogger(__name__)

RESULT_COLUMNS = (
    'decoder', 'formulation', 'bg', 'Z', 'ebno_db', 'alpha', 'trials', 'bits', 'bit_errors',
    'ber', 'ber_stderr', 'fer', 'sweeps_or_time', 'seed',
)
EXPECTED_COLUMNS = (
    'decoder', 'formulation', 'bg', 'Z', 'ebno_db', 'alpha', 'trials', 'num_anneals',
    'mean_anneal_ber', 'expected_ber', 'seed',
)
BEST_ALPHA_COLUMNS = ('decoder', 'bg', 'Z', 'ebno_db', 'alpha', 'ber')
SIGN_TEST_COLUMNS = (
    'ebno_db', 'decoder_a', 'alpha_a', 'decoder_b', 'alpha_b', 'a_better', 'b_better', 'ties', 'p_value',
)
REFERENCE_COLUMNS = ('ebno_db', 'uncoded_ber')
BER_CONVENTION = 'ber counts message (systematic) bits only'

RESULTS_CSV = 'results.csv'
EXPECTED_CSV = 'expected_ber.csv'
BEST_ALPHA_CSV = 'best_alpha.csv'
SIGN_TESTS_CSV = 'sign_tests.csv'
REFERENCE_CSV = 'uncoded_ber.csv'


def fmt(value):
    """CSV rendering: 6 significant digits for floats, blanks for None."""
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.6g')
    return str(value)


def trial_rng(seed, ebno_index, trial):
    return np.random.default_rng(np.random.SeedSequence([seed, ebno_index, trial]))


def decoder_seed(seed, ebno_index, trial):
    """Seed for a decoder's own randomness (anneal starts, spin-fix events) on one trial."""
    return int(np.random.SeedSequence([seed, ebno_index, trial, 1]).generate_state(1)[0])


@dataclasses.dataclass(frozen=True)
class SweepContext:
    """Everything a worker needs; shipped once per worker process."""

    h: object
    generator: object
    rate: Fraction
    suite: DecoderSuite
    seed: int


@dataclasses.dataclass(frozen=True)
class Cell:
    index: int
    decoder: str
    alpha: float
    ebno_index: int
    ebno_db: float


@dataclasses.dataclass(frozen=True)
class TrialResult:
    trial: int
    bits: int
    errors: int
    digest: bytes
    mean_anneal_ber: float = None
    expected_ber: float = None
    num_anneals: int = 0


def simulate_trial(context, cell, trial):
    spec = parse_decoder(cell.decoder)
    rng = trial_rng(context.seed, cell.ebno_index, trial)
    generator = context.generator
    message = rng.integers(0, 2, generator.k, dtype=np.uint8)
    observation = transmit(modulate(generator.encode(message)), cell.ebno_db, context.rate, rng)
    digest = hashlib.sha256(message.tobytes() + observation.received.tobytes()).digest()

    outcome = context.suite.decode(spec, context.h, observation, alpha=cell.alpha,
                                   seed=decoder_seed(context.seed, cell.ebno_index, trial))
    decoded = generator.extract_message(outcome.bits)
    errors = int(np.count_nonzero(decoded != message))
    if not outcome.anneals:
        return TrialResult(trial=trial, bits=generator.k, errors=errors, digest=digest)

    ensemble = build_ensemble(
        ((generator.extract_message(a.bits), a.energy) for a in outcome.anneals), message)
    return TrialResult(
        trial=trial, bits=generator.k, errors=errors, digest=digest,
        mean_anneal_ber=mean_ber(ensemble, generator.k),
        expected_ber=expected_ber(ensemble, len(outcome.anneals), generator.k),
        num_anneals=len(outcome.anneals),
    )


def simulate_chunk(context, cell, trials):
    """Run a block of trials; a decoder failure comes back as an error string."""
    try:
        return [simulate_trial(context, cell, trial) for trial in trials], None
    except InvariantViolation:
        raise
    except Exception as exc:
        logger.exception(f'{cell.decoder} at {cell.ebno_db:g} dB failed')
        return None, f'{type(exc).__name__}: {exc}'


def _worker_chunk(context, cell, trials):
    # joblib workers start from a fresh interpreter
    if not settings.configured:
        os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'isingldpc.settings')
        django.setup()
    return simulate_chunk(context, cell, trials)


@dataclasses.dataclass
class CellResult:
    cell: Cell
    stats: BerStats = dataclasses.field(default_factory=BerStats)
    errors: list = dataclasses.field(default_factory=list)
    digest: str = None
    mean_anneal_ber: float = None
    expected_ber: float = None
    num_anneals: int = 0
    error: str = None

    @classmethod
    def reduce(cls, cell, chunks):
        """Fold ordered chunk results into one cell result."""
        result = cls(cell=cell)
        trials = []
        for chunk, error in chunks:
            if error is not None:
                result.error = error
                return result
            trials.extend(chunk)
        digest = hashlib.sha256()
        for trial in trials:
            result.stats.add_counts(trial.bits, trial.errors)
            result.errors.append(trial.errors)
            digest.update(trial.digest)
        result.digest = digest.hexdigest()
        annealed = [t for t in trials if t.num_anneals]
        if annealed:
            result.mean_anneal_ber = float(np.mean([t.mean_anneal_ber for t in annealed]))
            result.expected_ber = float(np.mean([t.expected_ber for t in annealed]))
            result.num_anneals = annealed[0].num_anneals
        return result


def plan_cells(plan):
    """Cells in output order: decoder, then alpha, then Eb/No."""
    cells = []
    for name in plan.decoders:
        alphas = plan.alpha if parse_decoder(name).uses_alpha else (None,)
        for alpha, (ebno_index, ebno) in itertools.product(alphas, enumerate(plan.ebno_db)):
            cells.append(Cell(index=len(cells), decoder=name, alpha=alpha,
                              ebno_index=ebno_index, ebno_db=float(ebno)))
    return cells


def suite_for(plan):
    return DecoderSuite(
        bp=BpConfig(
            schedule=plan.bp_schedule,
            max_iterations=plan.bp_max_iterations,
            normalization_factor=settings.ISING_LDPC['NORMALIZATION_FACTOR'],
            offset_beta=settings.ISING_LDPC['OFFSET_BETA'],
            llr_clamp=settings.ISING_LDPC['LLR_CLAMP'],
        ),
        sa=SaConfig(sweeps=plan.sweeps, num_anneals=plan.num_anneals,
                    beta_start=plan.beta_start, beta_end=plan.beta_end),
        machine=MachineConfig(
            time_constant=plan.machine_time_constant,
            total_time=plan.machine_total_time,
            dt=plan.machine_dt or plan.machine_time_constant / settings.ISING_LDPC['MACHINE_DT_FRACTION'],
            integrator=plan.machine_integrator,
            spinfix_rate=plan.machine_spinfix_rate,
            spinfix_decay=plan.machine_spinfix_decay,
            initial=plan.machine_initial,
        ),
    )


def resolve_jobs(jobs):
    if jobs is None or jobs < 1:
        configured = settings.ISING_LDPC['JOBS']
        return configured if configured > 0 else (os.cpu_count() or 1)
    return jobs


def _chunks(messages, jobs):
    size = max(1, math.ceil(messages / (4 * jobs)))
    return [range(start, min(start + size, messages)) for start in range(0, messages, size)]


@dataclasses.dataclass
class SweepResult:
    plan: object
    label: str
    suite: DecoderSuite
    cells: list

    def result_rows(self):
        rows = []
        for result in self.cells:
            cell = result.cell
            spec = parse_decoder(cell.decoder)
            stats = result.stats
            failed = result.error is not None
            rows.append({
                'decoder': cell.decoder,
                'formulation': spec.algorithm,
                'bg': self.label,
                'Z': self.plan.z,
                'ebno_db': cell.ebno_db,
                'alpha': cell.alpha,
                'trials': stats.frames_total,
                'bits': stats.bits_total,
                'bit_errors': stats.bit_errors,
                'ber': math.nan if failed else stats.ber,
                'ber_stderr': math.nan if failed else stats.stderr_ber,
                'fer': math.nan if failed else stats.fer,
                'sweeps_or_time': self.suite.budget(spec),
                'seed': self.plan.seed,
            })
        return rows

    def expected_rows(self):
        rows = []
        for result in self.cells:
            if not result.num_anneals:
                continue
            cell = result.cell
            rows.append({
                'decoder': cell.decoder,
                'formulation': parse_decoder(cell.decoder).algorithm,
                'bg': self.label,
                'Z': self.plan.z,
                'ebno_db': cell.ebno_db,
                'alpha': cell.alpha,
                'trials': result.stats.frames_total,
                'num_anneals': result.num_anneals,
                'mean_anneal_ber': result.mean_anneal_ber,
                'expected_ber': result.expected_ber,
                'seed': self.plan.seed,
            })
        return rows

    def best_alpha_rows(self):
        """Lowest-BER alpha per decoder and Eb/No; ties go to the smaller alpha."""
        if len(self.plan.alpha) < 2:
            return []
        rows = []
        candidates = {}
        for result in self.cells:
            cell = result.cell
            if cell.alpha is None or result.error is not None:
                continue
            candidates.setdefault((cell.decoder, cell.ebno_index), []).append(result)
        for (decoder, _), results in candidates.items():
            best = min(results, key=lambda r: (r.stats.ber, r.cell.alpha))
            rows.append({
                'decoder': decoder, 'bg': self.label, 'Z': self.plan.z,
                'ebno_db': best.cell.ebno_db, 'alpha': best.cell.alpha, 'ber': best.stats.ber,
            })
        return rows

    def sign_test_rows(self):
        """Paired sign tests between every two cells sharing an Eb/No point."""
        rows = []
        ok = [r for r in self.cells if r.error is None]
        for first, second in itertools.combinations(ok, 2):
            if first.cell.ebno_index != second.cell.ebno_index:
                continue
            a_better, b_better, ties, p_value = sign_test(first.errors, second.errors)
            rows.append({
                'ebno_db': first.cell.ebno_db,
                'decoder_a': first.cell.decoder, 'alpha_a': first.cell.alpha,
                'decoder_b': second.cell.decoder, 'alpha_b': second.cell.alpha,
                'a_better': a_better, 'b_better': b_better, 'ties': ties, 'p_value': p_value,
            })
        return rows

    def cell_records(self):
        return [
            {
                'decoder': r.cell.decoder, 'alpha': r.cell.alpha, 'ebno_db': r.cell.ebno_db,
                'trials': r.stats.frames_total, 'digest': r.digest,
                'status': 'error' if r.error else 'ok', 'error': r.error,
            }
            for r in self.cells
        ]

    def failures(self):
        return [f'{r.cell.decoder} alpha={r.cell.alpha} ebno_db={r.cell.ebno_db:g}: {r.error}'
                for r in self.cells if r.error]

    def reference_rows(self):
        """Hard-decision BER of uncoded BPSK at every Eb/No of the plan."""
        return [{'ebno_db': float(ebno), 'uncoded_ber': float(uncoded_ber(ebno))} for ebno in self.plan.ebno_db]

    def header_lines(self):
        return [
            f'# channel: {SIGMA_CONVENTION}',
            f'# {BER_CONVENTION}',
            f'# messages per cell: {self.plan.messages}',
        ]

    def write(self, out_dir):
        """Write the CSV outputs into `out_dir` and return their file names."""
        out_dir = Path(out_dir)
        outputs = [(RESULTS_CSV, RESULT_COLUMNS, self.result_rows()),
                   (REFERENCE_CSV, REFERENCE_COLUMNS, self.reference_rows())]
        expected = self.expected_rows()
        if expected:
            outputs.append((EXPECTED_CSV, EXPECTED_COLUMNS, expected))
        best = self.best_alpha_rows()
        if best:
            outputs.append((BEST_ALPHA_CSV, BEST_ALPHA_COLUMNS, best))
        tests = self.sign_test_rows()
        if tests:
            outputs.append((SIGN_TESTS_CSV, SIGN_TEST_COLUMNS, tests))

        for name, columns, rows in outputs:
            write_csv(out_dir / name, columns, rows, self.header_lines())
            logger.info(f'Wrote {len(rows)} rows to {out_dir / name}')
        return [name for name, _, _ in outputs]


def write_csv(path, columns, rows, header_lines=()):
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        for line in header_lines:
            handle.write(line + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[column]) for column in columns])


def verify_common_numbers(cell_results):
    """Every decoder at one Eb/No point must have seen the same words."""
    digests = {}
    for result in cell_results:
        if result.error is not None:
            continue
        known = digests.setdefault(result.cell.ebno_index, result.digest)
        if known != result.digest:
            raise InvariantViolation(
                f'{result.cell.decoder} at {result.cell.ebno_db:g} dB saw different '
                f'messages or noise than the other decoders'
            )


def sweep(plan, jobs=1):
    """Run every (decoder, alpha, Eb/No) cell of `plan` and return a SweepResult."""
    h, label = load_parity_check(plan.code, plan.z, plan.code_format)
    generator = build_generator(h)
    context = SweepContext(h=h, generator=generator, rate=Fraction(generator.k, h.n),
                           suite=suite_for(plan), seed=plan.seed)
    cells = plan_cells(plan)
    jobs = resolve_jobs(jobs)
    chunks = _chunks(plan.messages, jobs)
    logger.info(f'Sweep over {label}: {h.m}x{h.n}, k={generator.k}, {len(cells)} cells, '
                f'{plan.messages} messages per cell, {jobs} job(s), seed {plan.seed}')

    if jobs == 1:
        results = []
        for cell in cells:
            results.append(CellResult.reduce(cell, (simulate_chunk(context, cell, trials) for trials in chunks)))
            _log_cell(results[-1])
    else:
        with Parallel(n_jobs=jobs) as parallel:
            blocks = parallel(delayed(_worker_chunk)(context, cell, trials) for cell in cells for trials in chunks)
        results = []
        for index, cell in enumerate(cells):
            results.append(CellResult.reduce(cell, blocks[index * len(chunks):(index + 1) * len(chunks)]))
            _log_cell(results[-1])

    verify_common_numbers(results)
    return SweepResult(plan=plan, label=label, suite=context.suite, cells=results)


def _log_cell(result):
    cell = result.cell
    alpha = '' if cell.alpha is None else f' alpha={cell.alpha:g}'
    if result.error:
        logger.error(f'Cell {cell.decoder}{alpha} at {cell.ebno_db:g} dB failed: {result.error}')
    else:
        logger.info(f'Cell {cell.decoder}{alpha} at {cell.ebno_db:g} dB: '
                    f'ber={result.stats.ber:.3g} fer={result.stats.fer:.3g}')
