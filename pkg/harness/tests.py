import io
import json
import math
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np
from django.conf import settings
from django.core.management import call_command, get_commands, load_command_class
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from channel.awgn import uncoded_ber
from codes.construction import bundled_bg1, expand_base_graph
from codes.exceptions import ConfigurationError, DimensionError, InvariantViolation, ParameterError
from codes.generator import build_generator
from codes.io import load_code
from decoders.belief_propagation import decode as real_bp_decode
from formulations.qubo import build_qubo
from .archive import archive_sweep
from .decoding import parse_decoder, validate_config
from .metrics import ber, build_ensemble, expected_ber, mean_ber, sign_test
from .models import AnnealEnsemble, BerStats, RunManifest, Solution
from .plan import format_plan, parse_plan
from .serializers import SweepPlanSerializer
from .sweep import (RESULT_COLUMNS, Cell, CellResult, fmt, plan_cells, sweep,
                    verify_common_numbers)

COMMANDS = ('construct', 'decode', 'sweep', 'resources')

PLAN_TEXT = """\
# two BP variants on the smallest BG1 lifting
code = bundled-bg1
z = 2
ebno_db = 2, 3, 4
decoders = oms@7, min-sum
messages = 12
seed = 42
"""


def plan_from(text=PLAN_TEXT, **overrides):
    data = parse_plan(text)
    data.update(overrides)
    return validate_config(SweepPlanSerializer, data)


def run_command(name, *args, **options):
    out = io.StringIO()
    call_command(name, *args, stdout=out, stderr=io.StringIO(), **options)
    return out.getvalue()


def report(text):
    return dict(line.split('=', 1) for line in text.strip().splitlines())


class BerTests(SimpleTestCase):
    def test_identical_vectors(self):
        stats = ber([0, 1, 1, 0], [0, 1, 1, 0])
        self.assertEqual((stats.bit_errors, stats.frame_errors, stats.ber), (0, 0, 0.0))

    def test_one_flip_in_hundred(self):
        truth = np.zeros(100, dtype=np.uint8)
        decoded = truth.copy()
        decoded[37] = 1
        stats = ber(decoded, truth)
        self.assertAlmostEqual(stats.ber, 0.01)
        self.assertEqual(stats.fer, 1.0)

    def test_complement(self):
        truth = np.random.default_rng(1).integers(0, 2, 64)
        self.assertEqual(ber(1 - truth, truth).ber, 1.0)

    def test_length_mismatch(self):
        with self.assertRaises(DimensionError):
            ber([0, 1], [0, 1, 0])

    def test_accumulates_and_merges(self):
        first = BerStats()
        ber([1, 0, 0, 0], [0, 0, 0, 0], first)
        ber([0, 0, 0, 0], [0, 0, 0, 0], first)
        second = BerStats()
        ber([1, 1, 0, 0], [0, 0, 0, 0], second)
        first.merge(second)
        self.assertEqual((first.bits_total, first.bit_errors, first.frames_total, first.frame_errors),
                         (12, 3, 3, 2))
        self.assertAlmostEqual(first.stderr_ber, math.sqrt(0.25 * 0.75 / 12))

    def test_empty_stats_are_nan(self):
        self.assertTrue(math.isnan(BerStats().ber))
        self.assertTrue(math.isnan(BerStats().stderr_ber))


class ExpectedBerTests(SimpleTestCase):
    def test_two_solution_example(self):
        ensemble = AnnealEnsemble([
            Solution(bits=(1,), energy=0.0, multiplicity=1, errors=10),
            Solution(bits=(0,), energy=-1.0, multiplicity=1, errors=0),
        ])
        self.assertAlmostEqual(expected_ber(ensemble, 2, 100), 0.025, places=12)

    def test_single_anneal_is_mean(self):
        rng = np.random.default_rng(3)
        truth = rng.integers(0, 2, 40)
        results = []
        for _ in range(25):
            bits = truth.copy()
            bits[rng.integers(0, 40, rng.integers(0, 6))] ^= 1
            results.append((bits, float(rng.integers(-5, 5))))
        ensemble = build_ensemble(results, truth)
        per_anneal = np.mean([np.count_nonzero(bits != truth) / 40 for bits, _ in results])
        self.assertAlmostEqual(expected_ber(ensemble, 1, 40), per_anneal, delta=1e-12)
        self.assertAlmostEqual(mean_ber(ensemble, 40), per_anneal, delta=1e-12)

    def test_many_anneals_keep_the_best_ranked(self):
        ensemble = AnnealEnsemble([
            Solution(bits=(0, 0), energy=-3.0, multiplicity=2, errors=1),
            Solution(bits=(1, 1), energy=2.0, multiplicity=8, errors=2),
        ])
        self.assertAlmostEqual(expected_ber(ensemble, 500, 2), 0.5, places=9)

    def test_non_increasing_when_errors_grow_with_rank(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            size = int(rng.integers(1, 6))
            errors = np.sort(rng.integers(0, 20, size))
            ensemble = AnnealEnsemble([
                Solution(bits=(i,), energy=float(i), multiplicity=int(rng.integers(1, 5)), errors=int(e))
                for i, e in enumerate(errors)
            ])
            values = [expected_ber(ensemble, n, 20) for n in range(1, 12)]
            self.assertTrue(all(b <= a + 1e-15 for a, b in zip(values, values[1:])))

    def test_ensemble_merges_duplicates_and_breaks_ties_by_bits(self):
        truth = [0, 0, 0]
        ensemble = build_ensemble([([0, 1, 0], 1.0), ([0, 0, 1], 1.0), ([0, 1, 0], 1.0), ([0, 0, 0], 0.5)], truth)
        self.assertEqual([s.bits for s in ensemble.solutions], [(0, 0, 0), (0, 0, 1), (0, 1, 0)])
        self.assertEqual([s.multiplicity for s in ensemble.solutions], [1, 1, 2])
        self.assertEqual(ensemble.num_anneals, 4)

    def test_rejects_bad_arguments(self):
        ensemble = AnnealEnsemble([Solution(bits=(0,), energy=0.0, multiplicity=1, errors=0)])
        with self.assertRaises(ParameterError):
            expected_ber(ensemble, 0, 1)
        with self.assertRaises(ParameterError):
            build_ensemble([], [0])


class SignTestTests(SimpleTestCase):
    def test_consistent_winner_is_significant(self):
        a_better, b_better, ties, p_value = sign_test(np.zeros(20), np.ones(20))
        self.assertEqual((a_better, b_better, ties), (20, 0, 0))
        self.assertLess(p_value, 0.01)

    def test_all_ties(self):
        self.assertEqual(sign_test([1, 2, 3], [1, 2, 3]), (0, 0, 3, 1.0))

    def test_balanced_is_not_significant(self):
        _, _, _, p_value = sign_test([0, 1] * 10, [1, 0] * 10)
        self.assertAlmostEqual(p_value, 1.0)


class PlanTests(SimpleTestCase):
    def test_parse(self):
        plan = parse_plan(PLAN_TEXT)
        self.assertEqual(plan['ebno_db'], ['2', '3', '4'])
        self.assertEqual(plan['decoders'], ['oms@7', 'min-sum'])
        self.assertEqual(plan['z'], '2')

    def test_format_round_trip(self):
        plan = parse_plan(PLAN_TEXT)
        self.assertEqual(parse_plan(format_plan(plan)), plan)

    def test_errors_name_the_line(self):
        cases = {
            'code = bundled-bg1\nspeed = 3\n': 'unknown plan key',
            'z = 2\nz = 4\n': 'set twice',
            'code bundled-bg1\n': 'expected "key = value"',
            'ebno_db = 2,,3\n': 'empty item',
            'seed =\n': 'no value',
        }
        for text, message in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(ConfigurationError) as ctx:
                    parse_plan(text, path='plan.txt')
                self.assertIn(message, str(ctx.exception))
                self.assertIn(f'plan.txt:{len(text.splitlines())}', str(ctx.exception))


class SweepPlanSerializerTests(SimpleTestCase):
    def test_message_defaults_scale_with_z(self):
        self.assertEqual(plan_from().messages, 12)
        small = parse_plan(PLAN_TEXT)
        del small['messages']
        self.assertEqual(validate_config(SweepPlanSerializer, small).messages, 1000)
        small['z'] = '64'
        self.assertEqual(validate_config(SweepPlanSerializer, small).messages, 200)

    def test_alpha_sweep_keyword(self):
        with override_settings(ISING_LDPC={**settings.ISING_LDPC, 'ALPHA_SWEEP': (1.0, 3.0)}):
            self.assertEqual(plan_from(alpha=['sweep']).alpha, (1.0, 3.0))

    def test_missing_code_file(self):
        serializer = SweepPlanSerializer(data={**parse_plan(PLAN_TEXT), 'code': '/nonexistent/bg.txt'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('code', serializer.errors)

    def test_unknown_decoder(self):
        serializer = SweepPlanSerializer(data={**parse_plan(PLAN_TEXT), 'decoders': ['oms', 'turbo']})
        self.assertFalse(serializer.is_valid())
        self.assertIn('decoders', serializer.errors)

    def test_bundled_code_needs_z(self):
        data = parse_plan(PLAN_TEXT)
        del data['z']
        with self.assertRaises(ConfigurationError):
            validate_config(SweepPlanSerializer, data)

    @override_settings(ISING_LDPC_SEED=99)
    def test_seed_falls_back_to_setting(self):
        data = parse_plan(PLAN_TEXT)
        del data['seed']
        self.assertEqual(validate_config(SweepPlanSerializer, data).seed, 99)


class ParseDecoderTests(SimpleTestCase):
    def test_budget_suffix(self):
        spec = parse_decoder('oms@7')
        self.assertEqual((spec.family, spec.algorithm, spec.budget, spec.base_name),
                         ('bp', 'offset-min-sum', 7, 'oms'))
        self.assertFalse(spec.uses_alpha)
        self.assertTrue(parse_decoder('sa-ho').uses_alpha)

    def test_rejects(self):
        for text in ('turbo', 'oms@', 'oms@0', 'oms@seven', 'machine@3'):
            with self.subTest(text=text):
                with self.assertRaises(ParameterError):
                    parse_decoder(text)


class SweepTests(SimpleTestCase):
    def test_cells_follow_the_grid(self):
        cells = plan_cells(plan_from(decoders=['oms', 'sa-ho'], alpha=['1', '2']))
        self.assertEqual(len(cells), 3 + 2 * 3)
        self.assertEqual([c.alpha for c in cells[:3]], [None] * 3)

    def test_rows_and_common_random_numbers(self):
        plan = plan_from()
        result = sweep(plan, jobs=1)
        rows = result.result_rows()
        self.assertEqual(len(rows), 6)
        k = build_generator(expand_base_graph(bundled_bg1(), 2)).k
        for row in rows:
            self.assertEqual(row['trials'], 12)
            self.assertEqual(row['bits'], 12 * k)
            self.assertEqual(row['seed'], 42)
        digests = {}
        for record in result.cell_records():
            digests.setdefault(record['ebno_db'], set()).add(record['digest'])
        self.assertEqual([len(d) for d in digests.values()], [1, 1, 1])
        self.assertEqual([r['sweeps_or_time'] for r in rows[:3]], [7, 7, 7])

    def test_csv_is_reproducible_and_independent_of_jobs(self):
        plan = plan_from()
        with tempfile.TemporaryDirectory() as tmp:
            first, second, pooled = (Path(tmp) / name for name in ('a', 'b', 'c'))
            for directory, jobs in ((first, 1), (second, 1), (pooled, 2)):
                directory.mkdir()
                sweep(plan, jobs=jobs).write(directory)
            text = (first / 'results.csv').read_text()
            self.assertEqual(text, (second / 'results.csv').read_text())
            self.assertEqual(text, (pooled / 'results.csv').read_text())
        lines = text.splitlines()
        self.assertTrue(lines[0].startswith('# channel: sigma^2'))
        self.assertIn('message (systematic) bits', lines[1])
        self.assertEqual(lines[3], ','.join(RESULT_COLUMNS))
        self.assertEqual(len(lines), 4 + 6)

    def test_uncoded_reference_table(self):
        result = sweep(plan_from(), jobs=1)
        rows = result.reference_rows()
        self.assertEqual([row['ebno_db'] for row in rows], [2.0, 3.0, 4.0])
        for row in rows:
            self.assertAlmostEqual(row['uncoded_ber'], float(uncoded_ber(row['ebno_db'])))
        with tempfile.TemporaryDirectory() as tmp:
            self.assertIn('uncoded_ber.csv', result.write(tmp))
            lines = (Path(tmp) / 'uncoded_ber.csv').read_text().splitlines()
        self.assertEqual(lines[3], 'ebno_db,uncoded_ber')
        self.assertEqual(lines[4].split(','), ['2', fmt(float(uncoded_ber(2.0)))])

    def test_annealer_tables(self):
        plan = plan_from(decoders=['sa-ho@50', 'oms'], ebno_db=['3'], alpha=['1', '2'],
                         messages='3', num_anneals='3')
        result = sweep(plan, jobs=1)
        expected = result.expected_rows()
        self.assertEqual([(r['decoder'], r['alpha']) for r in expected], [('sa-ho@50', 1.0), ('sa-ho@50', 2.0)])
        for row in expected:
            self.assertEqual(row['num_anneals'], 3)
            self.assertTrue(0.0 <= row['expected_ber'] <= 1.0)
        self.assertEqual(len(result.best_alpha_rows()), 1)
        self.assertEqual(len(result.sign_test_rows()), 3)
        with tempfile.TemporaryDirectory() as tmp:
            outputs = result.write(tmp)
        self.assertEqual(outputs, ['results.csv', 'uncoded_ber.csv', 'expected_ber.csv', 'best_alpha.csv',
                                   'sign_tests.csv'])

    def test_failing_decoder_becomes_error_row(self):
        def flaky(h, llr, cfg):
            if cfg.algorithm == 'min-sum':
                raise RuntimeError('boom')
            return real_bp_decode(h, llr, cfg)

        with mock.patch('harness.decoding.bp_decode', side_effect=flaky):
            result = sweep(plan_from(), jobs=1)
        rows = result.result_rows()
        self.assertTrue(all(math.isnan(r['ber']) for r in rows if r['decoder'] == 'min-sum'))
        self.assertFalse(any(math.isnan(r['ber']) for r in rows if r['decoder'] == 'oms@7'))
        self.assertEqual(len(result.failures()), 3)
        self.assertIn('RuntimeError: boom', result.failures()[0])

    def test_digest_mismatch_is_an_invariant_violation(self):
        cells = [Cell(index=i, decoder=name, alpha=None, ebno_index=0, ebno_db=3.0)
                 for i, name in enumerate(('oms', 'bp'))]
        results = [CellResult(cell=cells[0], digest='aa'), CellResult(cell=cells[1], digest='bb')]
        with self.assertRaises(InvariantViolation):
            verify_common_numbers(results)

    def test_fmt(self):
        self.assertEqual(fmt(1 / 3), '0.333333')
        self.assertEqual(fmt(float('nan')), 'nan')
        self.assertEqual(fmt(None), '')
        self.assertEqual(fmt(7), '7')


class ArchiveTests(SimpleTestCase):
    @override_settings(USE_MONGODB=False)
    def test_disabled(self):
        with mock.patch('mongo_models.MongoSweepRun.create_run') as create_run:
            self.assertIsNone(archive_sweep({'command': 'sweep'}, []))
        create_run.assert_not_called()

    @override_settings(USE_MONGODB=True)
    def test_failure_does_not_raise(self):
        with mock.patch('mongo_models.MongoSweepRun.create_run', side_effect=RuntimeError('down')):
            self.assertIsNone(archive_sweep({'command': 'sweep'}, []))

    @override_settings(USE_MONGODB=True)
    def test_stores_manifest_and_rows(self):
        collection = mock.MagicMock()
        collection.insert_one.return_value.inserted_id = 'abc'
        with mock.patch('mongodb_handler.MongoDBHandler.get_collection', return_value=collection):
            run_id = archive_sweep({'command': 'sweep', 'master_seed': 5}, [{'ber': float('nan'), 'bits': 10}])
        self.assertIsNotNone(run_id)
        stored = collection.insert_one.call_args[0][0]
        self.assertEqual(stored['master_seed'], 5)
        self.assertEqual(stored['rows'], [{'ber': None, 'bits': 10}])


class ConstructCommandTests(SimpleTestCase):
    def test_full_size_bg1(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'bg1.alist'
            self.assertEqual(run_command('construct', bg='bundled-bg1', z=384, out=str(out)).strip(),
                             '17664 26112 121344')
            self.assertTrue(out.with_suffix('.manifest.json').exists())

    def test_unit_lifting_is_the_protograph(self):
        bg = bundled_bg1()
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'proto.alist'
            run_command('construct', bg='bundled-bg1', z=1, out=str(out))
            dense = load_code(out).to_dense()
        pattern = np.zeros((bg.rows, bg.cols), dtype=np.uint8)
        for r, c, _ in bg.entries:
            pattern[r, c] = 1
        np.testing.assert_array_equal(dense, pattern)

    def test_malformed_base_graph(self):
        with tempfile.TemporaryDirectory() as tmp:
            bad = Path(tmp) / 'bad.txt'
            bad.write_text('2 4 8\n0 0 1\n0 9 1\n')
            with self.assertRaises(CommandError) as ctx:
                run_command('construct', bg=str(bad), z=2, out=str(Path(tmp) / 'h.alist'))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('bad.txt:3:', str(ctx.exception))

    def test_replay_from_manifest(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'h.alist'
            first = run_command('construct', bg='bundled-bg1', z=4, out=str(out))
            text = out.read_text()
            out.unlink()
            second = run_command('construct', manifest=str(out.with_suffix('.manifest.json')))
            self.assertEqual(first, second)
            self.assertEqual(out.read_text(), text)


class DecodeCommandTests(SimpleTestCase):
    def test_noiseless_oms(self):
        values = report(run_command('decode', code='bundled-bg1', z=2, decoder='oms', ebno=100.0, seed=1))
        self.assertEqual(values['decoded_ok'], 'true')
        self.assertEqual(values['syndrome_ok'], 'true')
        self.assertEqual(values['bit_errors'], '0')

    def test_annealer_is_reproducible(self):
        options = dict(code='bundled-bg1', z=2, decoder='sa-ho', ebno=3.0, seed=7, sweeps=100, anneals=3)
        first = run_command('decode', **options)
        self.assertEqual(first, run_command('decode', **options))
        self.assertEqual(report(first)['anneals'], '3')

    def test_machine_trajectory_dump(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 't.csv'
            values = report(run_command('decode', code='bundled-bg1', z=2, decoder='machine', ebno=4.0, seed=3,
                                        total_time=2e-8, trajectory_nodes=4, dump_trajectory=str(path)))
            header = path.read_text().splitlines()[0]
            self.assertTrue(path.with_suffix('.manifest.json').exists())
        self.assertEqual(header, 'time,v_0,v_1,v_2,v_3,satisfied_checks')
        self.assertIn('spinfixes', values)

    @override_settings(ISING_LDPC_SEED=11)
    def test_seed_fallback(self):
        values = report(run_command('decode', code='bundled-bg1', z=2, decoder='bp', ebno=3.0))
        self.assertEqual(values['seed'], '11')

    def test_unknown_decoder(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('decode', code='bundled-bg1', z=2, decoder='turbo', seed=1)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_invalid_machine_step(self):
        with self.assertRaises(CommandError) as ctx:
            run_command('decode', code='bundled-bg1', z=2, decoder='machine', seed=1, dt=2e-9)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_penalty_weight_and_bound_reported_for_annealers(self):
        values = report(run_command('decode', code='bundled-bg1', z=2, decoder='sa-ho', ebno=3.0, seed=5,
                                    sweeps=50, anneals=2, alpha=3.0))
        self.assertEqual(values['alpha'], '3')
        self.assertGreater(float(values['alpha_bound']), 3.0)
        bp_values = report(run_command('decode', code='bundled-bg1', z=2, decoder='oms', ebno=3.0, seed=5))
        self.assertNotIn('alpha_bound', bp_values)


class ResourcesCommandTests(SimpleTestCase):
    def test_co_designed_counts(self):
        lines = run_command('resources', code='bundled-bg1', z=64, formulation='co-designed').splitlines()
        self.assertEqual(lines[0], 'spins=4352 aux=2944 couplers=20224')
        self.assertTrue(lines[2].startswith('convention: '))

    def test_binary_qubo_couplers(self):
        lines = run_command('resources', code='bundled-bg1', z=64, formulation='binary').splitlines()
        extra = dict(pair.split('=') for pair in lines[1].split())
        self.assertTrue(246_000 <= int(extra['matrix_couplers']) <= 334_000)

    def test_noiseless_alpha_bound(self):
        lines = run_command('resources', code='bundled-bg1', z=2).splitlines()
        self.assertEqual(lines[3], f'alpha_bound={4 * 136}')

    def test_export_writes_qubo(self):
        h = expand_base_graph(bundled_bg1(), 2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bg1.qubo'
            run_command('resources', code='bundled-bg1', z=2, formulation='unary', alpha=2.0, export=str(path))
            lines = path.read_text().splitlines()
        model = build_qubo(h, np.ones(h.n), 2.0, encoding='unary')
        num_vars, offset = lines[0].split()
        self.assertEqual(int(num_vars), model.num_vars)
        self.assertAlmostEqual(float(offset), model.offset)
        self.assertEqual(len(lines) - 1, np.count_nonzero(model.linear) + model.num_quadratic)

    def test_export_needs_a_qubo_formulation(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                run_command('resources', code='bundled-bg1', z=2, export=str(Path(tmp) / 'x.qubo'))
        self.assertEqual(ctx.exception.returncode, 2)


class SweepCommandTests(SimpleTestCase):
    def test_writes_outputs_and_replays(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = Path(tmp) / 'plan.txt'
            plan.write_text(PLAN_TEXT)
            out, replay = Path(tmp) / 'out', Path(tmp) / 'replay'
            run_command('sweep', plan=str(plan), out=str(out), jobs=1)
            manifest = json.loads((out / 'manifest.json').read_text())
            self.assertEqual(manifest['master_seed'], 42)
            self.assertEqual(len(manifest['cells']), 6)
            self.assertEqual(RunManifest.load(out / 'manifest.json').command, 'sweep')
            run_command('sweep', manifest=str(out / 'manifest.json'), out=str(replay))
            self.assertEqual((out / 'results.csv').read_bytes(), (replay / 'results.csv').read_bytes())

    def test_missing_code_file_fails_before_work(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = Path(tmp) / 'plan.txt'
            plan.write_text(PLAN_TEXT.replace('bundled-bg1', str(Path(tmp) / 'missing.txt')))
            with self.assertRaises(CommandError) as ctx:
                run_command('sweep', plan=str(plan), out=str(Path(tmp) / 'out'))
            self.assertFalse((Path(tmp) / 'out').exists())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_unwritable_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = Path(tmp) / 'plan.txt'
            plan.write_text(PLAN_TEXT)
            blocker = Path(tmp) / 'blocker'
            blocker.write_text('')
            with self.assertRaises(CommandError) as ctx:
                run_command('sweep', plan=str(plan), out=str(blocker))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_read_only_output_fails_before_work(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = Path(tmp) / 'plan.txt'
            plan.write_text(PLAN_TEXT)
            out = Path(tmp) / 'out'
            out.mkdir()
            denied = PermissionError(13, 'Permission denied', str(out))
            with mock.patch('harness.management.commands.sweep.tempfile.NamedTemporaryFile', side_effect=denied), \
                    mock.patch('harness.management.commands.sweep.sweep') as simulate:
                with self.assertRaises(CommandError) as ctx:
                    run_command('sweep', plan=str(plan), out=str(out))
            simulate.assert_not_called()
            self.assertEqual(list(out.iterdir()), [])
        self.assertEqual(ctx.exception.returncode, 3)

    def test_manifest_from_another_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'h.alist'
            run_command('construct', bg='bundled-bg1', z=2, out=str(out))
            with self.assertRaises(CommandError) as ctx:
                run_command('sweep', manifest=str(out.with_suffix('.manifest.json')), out=tmp)
        self.assertEqual(ctx.exception.returncode, 2)


class HelpTests(SimpleTestCase):
    def test_every_flag_is_documented(self):
        available = get_commands()
        for name in COMMANDS:
            with self.subTest(command=name):
                command = load_command_class(available[name], name)
                parser = command.create_parser('manage.py', name)
                help_text = parser.format_help()
                for action in parser._actions:
                    self.assertTrue(action.help, f'{name}: {action.option_strings} has no help')
                    for flag in action.option_strings:
                        self.assertIn(flag, help_text)
