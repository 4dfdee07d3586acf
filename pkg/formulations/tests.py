import itertools
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy.sparse import random as sparse_random

from channel.awgn import modulate
from codes.construction import bundled_bg1, expand_base_graph
from codes.exceptions import DimensionError, ParameterError
from codes.generator import build_generator
from codes.models import ParityCheckMatrix
from .models import QuadraticModel
from .qubo import (alpha_guarantee_bound, aux_weights, build_higher_order, build_qubo, energy,
                   export_qubo, ising_energy, to_ising)
from .resources import formulation_report, resource_report

SMALL_ROWS = [[0, 1, 2, 3], [2, 3, 4, 5], [0, 1, 4, 5]]


def direct_objective(h, r, alpha, model, bits):
    """The penalty objective evaluated term by term."""
    x = bits[:h.n].astype(np.float64)
    y = bits[h.n:].astype(np.float64)
    channel_term = np.sum((r - (1.0 - 2.0 * x)) ** 2)
    penalty = 0.0
    for j in range(h.m):
        mine = model.aux_checks == j
        level = np.sum(model.aux_weights[mine] * y[mine])
        penalty += (x[h.check(j)].sum() - 2.0 * level) ** 2
    return channel_term + alpha * penalty


class AuxiliaryEncodingTests(SimpleTestCase):
    def test_counts_for_weight_ten(self):
        self.assertEqual(len(aux_weights(10, 'unary')), 6)
        self.assertEqual(aux_weights(10, 'binary').tolist(), [1, 2, 4])

    def test_degenerate_checks_get_one_bit(self):
        for degree in (0, 1, 2):
            self.assertEqual(aux_weights(degree, 'binary').tolist(), [1])

    def test_unknown_encoding(self):
        with self.assertRaises(ParameterError):
            aux_weights(4, 'one-hot')


class QuboTests(SimpleTestCase):
    def setUp(self):
        self.h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)
        self.r = np.array([0.9, -1.2, 0.3, 1.1, -0.4, 0.7])

    def test_model_matches_direct_objective(self):
        rng = np.random.default_rng(17)
        for encoding in ('unary', 'binary'):
            model = build_qubo(self.h, self.r, 2.5, encoding)
            for _ in range(200):
                bits = rng.integers(0, 2, size=model.num_vars).astype(np.uint8)
                self.assertAlmostEqual(model.energy(bits),
                                       direct_objective(self.h, self.r, 2.5, model, bits), places=9)

    def test_aux_vars_tagged_with_their_check(self):
        model = build_qubo(self.h, self.r, 1.0, 'unary')
        self.assertEqual(model.num_aux_vars, 9)
        for index in range(self.h.n, model.num_vars):
            tag = model.var_map[index]
            self.assertEqual(tag[0], 'aux')
            self.assertEqual(tag[1], model.aux_checks[index - self.h.n])
        self.assertTrue(all(i < j and v != 0 for (i, j), v in model.quadratic.items()))

    def test_codeword_with_matching_levels_has_no_penalty(self):
        codeword = np.array([1, 1, 0, 0, 1, 1], dtype=np.uint8)
        self.assertTrue(self.h.is_codeword(codeword))
        for encoding in ('unary', 'binary'):
            model = build_qubo(self.h, self.r, 3.0, encoding)
            bits = np.zeros(model.num_vars, dtype=np.uint8)
            bits[:6] = codeword
            for j in range(self.h.m):
                level = int(codeword[self.h.check(j)].sum()) // 2
                slots = np.flatnonzero(model.aux_checks == j) + self.h.n
                if encoding == 'unary':
                    bits[slots[:level]] = 1
                else:
                    bits[slots] = [(level >> k) & 1 for k in range(len(slots))]
            channel_term = np.sum((self.r - modulate(codeword)) ** 2)
            self.assertAlmostEqual(model.energy(bits), channel_term, places=9)

    def test_minimum_over_aux_counts_violated_checks(self):
        alpha = 1.5
        for encoding in ('unary', 'binary'):
            model = build_qubo(self.h, self.r, alpha, encoding)
            aux_space = np.array(list(itertools.product((0, 1), repeat=model.num_aux_vars)), dtype=np.uint8)
            for code in itertools.product((0, 1), repeat=self.h.n):
                code = np.array(code, dtype=np.uint8)
                best = min(model.energy(np.concatenate((code, aux))) for aux in aux_space)
                expected = np.sum((self.r - modulate(code)) ** 2) + alpha * int(self.h.syndrome(code).sum())
                self.assertAlmostEqual(best, expected, places=9)

    def test_alpha_must_be_positive(self):
        with self.assertRaises(ParameterError):
            build_qubo(self.h, self.r, 0.0)

    def test_received_length_checked(self):
        with self.assertRaises(DimensionError):
            build_qubo(self.h, self.r[:5], 1.0)

    def test_assignment_length_checked(self):
        model = build_qubo(self.h, self.r, 1.0)
        with self.assertRaises(DimensionError):
            energy(model, np.zeros(3))

    def test_export_format(self):
        model = build_qubo(ParityCheckMatrix.from_rows(1, 2, [[0, 1]]), [1.0, -1.0], 1.0, 'binary')
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'model.qubo'
            export_qubo(model, path)
            lines = path.read_text().splitlines()
        num_vars, offset = lines[0].split()
        self.assertEqual(int(num_vars), 3)
        self.assertAlmostEqual(float(offset), model.offset)
        triplets = [tuple(line.split()) for line in lines[1:]]
        self.assertEqual(len(triplets), np.count_nonzero(model.linear) + model.num_quadratic)
        self.assertIn(('0', '1', '2'), triplets)

    def test_alpha_guarantee_bound(self):
        self.assertEqual(alpha_guarantee_bound([0.5, -1.0, 0.25]), 7.0)


class IsingConversionTests(SimpleTestCase):
    def test_all_zero_assignment_is_offset(self):
        model = build_qubo(ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS), np.ones(6), 1.0)
        self.assertEqual(model.energy(np.zeros(model.num_vars)), model.offset)

    def test_single_variable(self):
        model = QuadraticModel([3.0], np.zeros((1, 1)), 0.0, [('code', 0)])
        couplings, fields, offset = to_ising(model)
        self.assertAlmostEqual(ising_energy(couplings, fields, offset, [-1]), 0.0)
        self.assertAlmostEqual(ising_energy(couplings, fields, offset, [1]), 3.0)

    def test_random_models_agree(self):
        rng = np.random.default_rng(23)
        for seed in range(5):
            upper = sparse_random(20, 20, density=0.3, random_state=seed, format='csr')
            upper.data = rng.normal(size=upper.nnz)
            model = QuadraticModel(rng.normal(size=20), upper, rng.normal(), [('code', i) for i in range(20)])
            couplings, fields, offset = to_ising(model)
            for _ in range(200):
                bits = rng.integers(0, 2, size=20)
                spins = 2 * bits - 1
                expected = model.energy(bits)
                got = ising_energy(couplings, fields, offset, spins)
                self.assertLessEqual(abs(got - expected), 1e-9 * max(1.0, abs(expected)))

    def test_qubo_models_agree(self):
        h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)
        rng = np.random.default_rng(8)
        model = build_qubo(h, rng.normal(size=6), 2.0, 'binary')
        couplings, fields, offset = to_ising(model)
        for _ in range(200):
            bits = rng.integers(0, 2, size=model.num_vars)
            self.assertAlmostEqual(ising_energy(couplings, fields, offset, 2 * bits - 1),
                                   model.energy(bits), places=9)


class HigherOrderTests(SimpleTestCase):
    def setUp(self):
        self.h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)

    def test_spin_product_is_xnor(self):
        for a, b in itertools.product((0, 1), repeat=2):
            self.assertEqual((1 - 2 * a) * (1 - 2 * b) == 1, (a ^ b) == 0)

    def test_noiseless_codeword_energy(self):
        codeword = np.array([1, 1, 0, 0, 1, 1], dtype=np.uint8)
        r = modulate(codeword)
        model = build_higher_order(self.h, r, 3.0)
        spins = 1 - 2 * codeword.astype(np.int64)
        self.assertAlmostEqual(energy(model, spins), -2.0 * np.abs(r).sum() - 1.5 * self.h.m)

    def test_flip_cost_in_satisfied_state(self):
        h = ParityCheckMatrix.from_rows(1, 3, [[0, 1, 2]])
        r = np.array([0.8, 1.3, 0.5])
        model = build_higher_order(h, r, 2.0)
        spins = np.ones(3, dtype=np.int64)
        for i in range(3):
            flipped = spins.copy()
            flipped[i] = -1
            self.assertAlmostEqual(model.energy(flipped) - model.energy(spins), 4 * abs(r[i]) + 2.0 * 1)

    def test_argmin_is_transmitted_codeword(self):
        generator = build_generator(self.h)
        all_spins = 1 - 2 * np.array(list(itertools.product((0, 1), repeat=self.h.n)))
        for message in itertools.product((0, 1), repeat=generator.k):
            codeword = generator.encode(message)
            model = build_higher_order(self.h, modulate(codeword), 0.5)
            energies = [model.energy(s) for s in all_spins]
            best = all_spins[int(np.argmin(energies))]
            np.testing.assert_array_equal((1 - best) // 2, codeword)

    def test_invariant_under_check_relabeling(self):
        rng = np.random.default_rng(4)
        r = rng.normal(size=6)
        shuffled = ParityCheckMatrix.from_rows(3, 6, [SMALL_ROWS[i] for i in (2, 0, 1)])
        first = build_higher_order(self.h, r, 1.7)
        second = build_higher_order(shuffled, r, 1.7)
        for _ in range(50):
            spins = rng.choice((-1, 1), size=6)
            self.assertAlmostEqual(first.energy(spins), second.energy(spins))

    def test_rejects_non_spin_values(self):
        model = build_higher_order(self.h, np.ones(6), 1.0)
        with self.assertRaises(ParameterError):
            model.energy(np.zeros(6))
        with self.assertRaises(DimensionError):
            model.energy(np.ones(5))

    def test_alpha_must_be_positive(self):
        with self.assertRaises(ParameterError):
            build_higher_order(self.h, np.ones(6), -1.0)


class ResourceReportTests(SimpleTestCase):
    def test_co_designed_counts_at_z64(self):
        report = formulation_report(expand_base_graph(bundled_bg1(), 64), 'co-designed')
        self.assertEqual((report.num_spins, report.num_aux_spins, report.num_couplers), (4352, 2944, 20224))
        self.assertEqual(report.xnor_gates, 2 * 20224)
        self.assertEqual(report.capacitors, 4352)

    def test_co_designed_counts_at_full_lift(self):
        report = resource_report(expand_base_graph(bundled_bg1(), 384))
        self.assertEqual(report.num_couplers, 121344)

    def test_empty_matrix_has_no_couplers(self):
        report = resource_report(ParityCheckMatrix.from_rows(0, 4, []))
        self.assertEqual(report.num_couplers, 0)
        self.assertEqual(report.num_aux_spins, 0)

    def test_qubo_counts_at_z64(self):
        h = expand_base_graph(bundled_bg1(), 64)
        unary = formulation_report(h, 'unary')
        binary = formulation_report(h, 'binary')
        self.assertTrue(376_000 <= unary.num_matrix_couplers <= 510_000, unary.num_matrix_couplers)
        self.assertTrue(246_000 <= binary.num_matrix_couplers <= 334_000, binary.num_matrix_couplers)
        self.assertEqual(unary.num_matrix_couplers, 2 * unary.num_couplers)
        self.assertLess(binary.num_aux_spins, unary.num_aux_spins)
        self.assertLessEqual(unary.num_aux_spins, unary.num_spins)

    def test_unknown_formulation(self):
        with self.assertRaises(ParameterError):
            formulation_report(ParityCheckMatrix.from_rows(1, 2, [[0, 1]]), 'penalty-chain')
