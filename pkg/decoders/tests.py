import itertools

import numpy as np
from django.test import SimpleTestCase

from channel.awgn import modulate, noise_variance, transmit
from codes.construction import bundled_bg1, bundled_bg2, expand_base_graph
from codes.exceptions import DimensionError, ParameterError
from codes.generator import build_generator
from codes.models import ParityCheckMatrix
from .belief_propagation import BeliefPropagationDecoder, check_update, decode, variable_update
from .models import ALGORITHMS, BpConfig
from .serializers import BpConfigSerializer


class CheckUpdateTests(SimpleTestCase):
    def test_min_sum_takes_sign_product_and_min(self):
        self.assertEqual(check_update([2.0, -3.0], BpConfig(algorithm='min-sum')), -2.0)

    def test_offset_min_sum_subtracts_beta(self):
        cfg = BpConfig(algorithm='offset-min-sum', offset_beta=0.5)
        self.assertEqual(check_update([2.0, -3.0], cfg), -1.5)

    def test_offset_never_flips_sign(self):
        cfg = BpConfig(algorithm='offset-min-sum', offset_beta=0.5)
        self.assertEqual(check_update([0.2, 3.0], cfg), 0.0)

    def test_normalized_min_sum_scales(self):
        cfg = BpConfig(algorithm='normalized-min-sum', normalization_factor=0.75)
        self.assertAlmostEqual(check_update([2.0, -3.0], cfg), -1.5)

    def test_sum_product_single_input_passes_through(self):
        self.assertAlmostEqual(check_update([1.3]), 1.3, places=9)
        self.assertAlmostEqual(check_update([-0.4]), -0.4, places=9)

    def test_sum_product_is_clamped(self):
        cfg = BpConfig(llr_clamp=10.0)
        self.assertLessEqual(abs(check_update([400.0], cfg)), 10.0 + 1e-9)

    def test_min_sum_magnitude_dominates_sum_product(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            msgs = rng.normal(0, 4, size=rng.integers(1, 8))
            exact = check_update(msgs, BpConfig(algorithm='sum-product'))
            approx = check_update(msgs, BpConfig(algorithm='min-sum'))
            self.assertGreaterEqual(abs(approx) + 1e-12, abs(exact))

    def test_empty_input_rejected(self):
        with self.assertRaises(DimensionError):
            check_update([])

    def test_variable_update_clamps(self):
        self.assertEqual(variable_update(1.0, [2.0, -0.5]), 2.5)
        self.assertEqual(variable_update(20.0, [10.0], llr_clamp=25.0), 25.0)


class BpConfigTests(SimpleTestCase):
    def test_rejects_unknown_algorithm(self):
        with self.assertRaises(ParameterError):
            BpConfig(algorithm='max-product')

    def test_rejects_zero_iterations(self):
        with self.assertRaises(ParameterError):
            BpConfig(max_iterations=0)

    def test_serializer_applies_defaults(self):
        serializer = BpConfigSerializer(data={'algorithm': 'offset-min-sum'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        cfg = serializer.save()
        self.assertEqual(cfg.algorithm, 'offset-min-sum')
        self.assertEqual(cfg.max_iterations, 20)
        self.assertEqual(cfg.offset_beta, 0.5)

    def test_serializer_rejects_bad_factor(self):
        serializer = BpConfigSerializer(data={'normalization_factor': 1.5})
        self.assertFalse(serializer.is_valid())
        self.assertIn('normalization_factor', serializer.errors)


class DecodeTests(SimpleTestCase):
    # every column has degree 2
    SMALL_ROWS = [[0, 1, 2, 3], [2, 3, 4, 5], [0, 1, 4, 5]]

    def setUp(self):
        self.small = ParityCheckMatrix.from_rows(3, 6, self.SMALL_ROWS)

    def test_single_weak_error_corrected_by_every_variant(self):
        llr = np.full(6, 4.0)
        llr[0] = -1.0
        for algorithm in ALGORITHMS:
            for schedule in ('flooding', 'layered'):
                with self.subTest(algorithm=algorithm, schedule=schedule):
                    outcome = decode(self.small, llr, BpConfig(algorithm=algorithm, schedule=schedule))
                    self.assertTrue(outcome.success)
                    self.assertEqual(outcome.iterations, 1)
                    np.testing.assert_array_equal(outcome.bits, np.zeros(6, dtype=np.uint8))
                    self.assertIsNone(outcome.energy)

    def test_noiseless_codeword_converges_in_one_iteration(self):
        h = expand_base_graph(bundled_bg1(), 4)
        generator = build_generator(h)
        rng = np.random.default_rng(3)
        codeword = generator.encode(rng.integers(0, 2, size=generator.k))
        llr = 2.0 * modulate(codeword) / noise_variance(float('inf'), h.rate)
        for algorithm in ALGORITHMS:
            for schedule in ('flooding', 'layered'):
                with self.subTest(algorithm=algorithm, schedule=schedule):
                    outcome = decode(h, llr, BpConfig(algorithm=algorithm, schedule=schedule))
                    self.assertTrue(outcome.success)
                    self.assertEqual(outcome.iterations, 1)
                    np.testing.assert_array_equal(outcome.bits, codeword)

    def test_success_matches_zero_syndrome(self):
        h = expand_base_graph(bundled_bg1(), 4)
        rng = np.random.default_rng(11)
        for trial in range(5):
            llr = rng.normal(0.5, 2.0, size=h.n)
            for algorithm in ALGORITHMS:
                outcome = decode(h, llr, BpConfig(algorithm=algorithm, max_iterations=3))
                self.assertEqual(outcome.success, h.is_codeword(outcome.bits))
                self.assertLessEqual(outcome.iterations, 3)

    def test_length_mismatch_rejected(self):
        with self.assertRaises(DimensionError):
            decode(self.small, np.zeros(5))


class DecoderPropertyTests(SimpleTestCase):
    SMALL_ROWS = DecodeTests.SMALL_ROWS

    def test_success_iff_zero_syndrome_over_many_decodes(self):
        h = expand_base_graph(bundled_bg2(), 2)
        rng = np.random.default_rng(404)
        decoders = [BeliefPropagationDecoder(h, BpConfig(algorithm=algorithm, schedule=schedule, max_iterations=4))
                    for algorithm in ALGORITHMS for schedule in ('flooding', 'layered')]
        successes = 0
        for trial in range(10_000):
            decoder = decoders[trial % len(decoders)]
            llr = rng.normal(rng.uniform(0.5, 4.0), 2.0, size=h.n)
            outcome = decoder.decode(llr)
            self.assertEqual(outcome.success, h.is_codeword(outcome.bits))
            successes += outcome.success
        self.assertGreater(successes, 0)
        self.assertLess(successes, 10_000)

    def test_single_weak_error_decodes_to_maximum_likelihood(self):
        h = ParityCheckMatrix.from_rows(3, 6, self.SMALL_ROWS)
        generator = build_generator(h)
        messages = np.array(list(itertools.product((0, 1), repeat=generator.k)), dtype=np.uint8)
        codewords = np.array([generator.encode(message) for message in messages])
        signs = 1.0 - 2.0 * codewords
        rng = np.random.default_rng(5)
        for codeword in codewords:
            for position in range(h.n):
                llr = rng.uniform(4.0, 5.0, size=h.n) * (1.0 - 2.0 * codeword)
                llr[position] = -np.sign(llr[position]) * rng.uniform(0.2, 1.5)
                ml = codewords[np.argmax(signs @ llr)]
                np.testing.assert_array_equal(ml, codeword)
                for algorithm in ALGORITHMS:
                    with self.subTest(codeword=codeword.tolist(), position=position, algorithm=algorithm):
                        outcome = decode(h, llr, BpConfig(algorithm=algorithm))
                        self.assertTrue(outcome.success)
                        np.testing.assert_array_equal(outcome.bits, ml)

    def test_layered_and_flooding_agree_at_high_snr(self):
        h = expand_base_graph(bundled_bg1(), 4)
        generator = build_generator(h)
        rng = np.random.default_rng(77)
        for _ in range(20):
            codeword = generator.encode(rng.integers(0, 2, size=generator.k))
            llr = transmit(modulate(codeword), 8.0, h.rate, rng).llr
            for algorithm in ALGORITHMS:
                flooding = decode(h, llr, BpConfig(algorithm=algorithm, schedule='flooding'))
                layered = decode(h, llr, BpConfig(algorithm=algorithm, schedule='layered'))
                self.assertTrue(flooding.success and layered.success)
                np.testing.assert_array_equal(flooding.bits, codeword)
                np.testing.assert_array_equal(layered.bits, flooding.bits)

    def test_sum_product_ber_not_worse_than_min_sum(self):
        h = expand_base_graph(bundled_bg1(), 4)
        generator = build_generator(h)
        rng = np.random.default_rng(1234)
        sum_product = BeliefPropagationDecoder(h, BpConfig(algorithm='sum-product'))
        min_sum = BeliefPropagationDecoder(h, BpConfig(algorithm='min-sum'))
        errors = {'sum-product': 0, 'min-sum': 0}
        for _ in range(200):
            codeword = generator.encode(rng.integers(0, 2, size=generator.k))
            llr = transmit(modulate(codeword), 1.5, h.rate, rng).llr
            errors['sum-product'] += np.count_nonzero(sum_product.decode(llr).bits != codeword)
            errors['min-sum'] += np.count_nonzero(min_sum.decode(llr).bits != codeword)
        self.assertGreater(errors['min-sum'], 0)
        self.assertLessEqual(errors['sum-product'], errors['min-sum'])
