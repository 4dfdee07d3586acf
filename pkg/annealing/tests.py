import numpy as np
from django.test import SimpleTestCase, override_settings

from channel.awgn import modulate, transmit
from codes.construction import bundled_bg1, expand_base_graph
from codes.exceptions import ParameterError
from codes.generator import build_generator
from codes.models import ParityCheckMatrix
from formulations.qubo import build_higher_order, build_qubo
from .kernels import anneal_higher_order, anneal_ising
from .models import HigherOrderState, QuadraticState, SaConfig
from .serializers import SaConfigSerializer
from .solver import anneal, decode_via_sa

SMALL_ROWS = [[0, 1, 2, 3], [2, 3, 4, 5], [0, 1, 4, 5]]
QUICK = SaConfig(sweeps=200, num_anneals=4, seed=12345)


class FlipDeltaTests(SimpleTestCase):
    def setUp(self):
        self.h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)
        self.rng = np.random.default_rng(31)

    def test_isolated_spin_bias_only(self):
        h = ParityCheckMatrix.from_rows(0, 1, [])
        state = HigherOrderState(build_higher_order(h, [0.7], 2.0), [1])
        self.assertAlmostEqual(state.flip_delta(0), 4 * 0.7)

    def test_spin_in_satisfied_check_without_bias(self):
        h = ParityCheckMatrix.from_rows(1, 3, [[0, 1, 2]])
        state = HigherOrderState(build_higher_order(h, np.zeros(3), 1.5), np.ones(3))
        self.assertAlmostEqual(state.flip_delta(1), 1.5)

    def test_higher_order_delta_matches_recompute(self):
        model = build_higher_order(self.h, self.rng.normal(size=6), 1.3)
        state = HigherOrderState(model, self.rng.choice((-1, 1), size=6))
        for _ in range(300):
            i = int(self.rng.integers(6))
            before = state.recompute_energy()
            delta = state.flip(i)
            self.assertAlmostEqual(state.recompute_energy() - before, delta, places=9)
            self.assertTrue(state.consistent())
        self.assertAlmostEqual(state.energy, state.recompute_energy(), places=6)

    def test_quadratic_delta_matches_recompute(self):
        for encoding in ('unary', 'binary'):
            model = build_qubo(self.h, self.rng.normal(size=6), 2.0, encoding)
            state = QuadraticState(model, self.rng.choice((-1, 1), size=model.num_vars))
            for _ in range(300):
                i = int(self.rng.integers(model.num_vars))
                before = state.recompute_energy()
                delta = state.flip(i)
                self.assertAlmostEqual(state.recompute_energy() - before, delta, places=9)
            self.assertAlmostEqual(state.energy, model.energy(state.bits()), places=6)

    def test_tracked_energy_survives_many_flips(self):
        h = expand_base_graph(bundled_bg1(), 2)
        model = build_higher_order(h, self.rng.normal(size=h.n), 2.0)
        state = HigherOrderState(model, np.ones(h.n))
        for i in self.rng.integers(h.n, size=100_000):
            state.flip(int(i))
        self.assertLessEqual(abs(state.energy - state.recompute_energy()), 1e-6)
        self.assertTrue(state.consistent())


class SaConfigTests(SimpleTestCase):
    def test_schedule_is_geometric(self):
        betas = SaConfig(sweeps=5, beta_start=0.1, beta_end=10.0).betas()
        np.testing.assert_allclose(betas, [0.1, 0.316227766, 1.0, 3.16227766, 10.0])

    def test_rejects_bad_schedule(self):
        with self.assertRaises(ParameterError):
            SaConfig(beta_start=2.0, beta_end=1.0)
        with self.assertRaises(ParameterError):
            SaConfig(sweeps=0)

    def test_serializer_defaults(self):
        serializer = SaConfigSerializer(data={'seed': 9})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        cfg = serializer.save()
        self.assertEqual((cfg.sweeps, cfg.num_anneals, cfg.seed), (10000, 10, 9))

    def test_serializer_rejects_inverted_schedule(self):
        serializer = SaConfigSerializer(data={'beta_start': 3.0, 'beta_end': 1.0})
        self.assertFalse(serializer.is_valid())


class AnnealTests(SimpleTestCase):
    def test_bias_only_model_follows_received_signs(self):
        h = ParityCheckMatrix.from_rows(0, 8, [])
        r = np.array([0.5, -1.0, 2.0, -0.3, 0.9, -2.5, 0.1, -0.2])
        outcomes = anneal(build_higher_order(h, r, 1.0), SaConfig(sweeps=100, num_anneals=3, seed=1))
        for outcome in outcomes:
            np.testing.assert_array_equal(outcome.bits, (r < 0).astype(np.uint8))

    def test_single_check_noiseless(self):
        h = ParityCheckMatrix.from_rows(1, 3, [[0, 1, 2]])
        codeword = np.array([1, 1, 0], dtype=np.uint8)
        model = build_higher_order(h, modulate(codeword), 1.0)
        outcomes = anneal(model, SaConfig(sweeps=50, num_anneals=10, seed=5))
        hits = sum(np.array_equal(outcome.bits, codeword) for outcome in outcomes)
        self.assertGreaterEqual(hits, 9)

    def test_same_seed_same_outcomes(self):
        h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)
        model = build_qubo(h, np.random.default_rng(2).normal(size=6), 2.0, 'binary')
        first = anneal(model, QUICK)
        second = anneal(model, QUICK)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.bits, b.bits)
            self.assertEqual(a.energy, b.energy)
        self.assertEqual([o.details['anneal'] for o in first], list(range(QUICK.num_anneals)))

    def test_reported_energy_is_model_energy(self):
        h = ParityCheckMatrix.from_rows(3, 6, SMALL_ROWS)
        r = np.random.default_rng(6).normal(size=6)
        quadratic = build_qubo(h, r, 2.0, 'unary')
        for outcome in anneal(quadratic, QUICK):
            self.assertAlmostEqual(outcome.energy, quadratic.energy(outcome.bits), places=6)
        higher = build_higher_order(h, r, 2.0)
        for outcome in anneal(higher, QUICK):
            self.assertAlmostEqual(outcome.energy, higher.energy(1 - 2 * outcome.bits.astype(np.int64)), places=6)

    @override_settings(DEBUG=True)
    def test_debug_rechecks_pass(self):
        h = expand_base_graph(bundled_bg1(), 2)
        r = np.random.default_rng(3).normal(size=h.n)
        anneal(build_higher_order(h, r, 2.0), QUICK)
        anneal(build_qubo(h, r, 2.0, 'binary'), QUICK)

    def test_unknown_model(self):
        with self.assertRaises(ParameterError):
            anneal(object(), QUICK)


class DecodeViaSaTests(SimpleTestCase):
    def setUp(self):
        self.h = expand_base_graph(bundled_bg1(), 2)
        generator = build_generator(self.h)
        self.codeword = generator.encode(np.random.default_rng(8).integers(0, 2, size=generator.k))
        self.noiseless = transmit(modulate(self.codeword), float('inf'), self.h.rate, np.random.default_rng(0))

    def test_higher_order_recovers_noiseless_codeword(self):
        outcome = decode_via_sa(self.h, self.noiseless, 'higher-order', 1.0,
                                SaConfig(sweeps=1000, num_anneals=4, seed=77))
        self.assertTrue(outcome.success)
        np.testing.assert_array_equal(outcome.bits, self.codeword)

    def test_aux_bits_are_dropped(self):
        outcome = decode_via_sa(self.h, self.noiseless, 'binary', 2.0, QUICK)
        self.assertEqual(outcome.bits.shape, (self.h.n,))
        self.assertGreater(outcome.details['num_vars'], self.h.n)
        self.assertEqual(len(outcome.anneals), QUICK.num_anneals)
        for anneal_outcome in outcome.anneals:
            self.assertEqual(anneal_outcome.bits.shape, (self.h.n,))
            self.assertEqual(anneal_outcome.success, self.h.is_codeword(anneal_outcome.bits))
        self.assertEqual(outcome.energy, min(o.energy for o in outcome.anneals))

    def test_unknown_formulation(self):
        with self.assertRaises(ParameterError):
            decode_via_sa(self.h, self.noiseless, 'rosenberg', 2.0, QUICK)


def random_parity_check(rng):
    n = int(rng.integers(3, 9))
    m = int(rng.integers(1, 5))
    rows = [sorted(rng.choice(n, size=int(rng.integers(2, min(4, n) + 1)), replace=False).tolist())
            for _ in range(m)]
    return ParityCheckMatrix.from_rows(m, n, rows)


class RandomFlipDeltaTests(SimpleTestCase):
    MODELS = 100
    FLIPS = 100

    def test_higher_order_flip_delta_over_random_triples(self):
        rng = np.random.default_rng(10_000)
        for _ in range(self.MODELS):
            h = random_parity_check(rng)
            model = build_higher_order(h, rng.normal(size=h.n), rng.uniform(0.5, 8.0))
            for _ in range(self.FLIPS):
                spins = rng.choice((-1, 1), size=h.n)
                i = int(rng.integers(h.n))
                delta = HigherOrderState(model, spins).flip_delta(i)
                flipped = spins.copy()
                flipped[i] = -flipped[i]
                self.assertAlmostEqual(model.energy(flipped) - model.energy(spins), delta, places=9)

    def test_quadratic_flip_delta_over_random_triples(self):
        rng = np.random.default_rng(20_000)
        for index in range(self.MODELS):
            h = random_parity_check(rng)
            encoding = ('unary', 'binary')[index % 2]
            model = build_qubo(h, rng.normal(size=h.n), rng.uniform(0.5, 8.0), encoding)
            state = QuadraticState(model, rng.choice((-1, 1), size=model.num_vars))
            for _ in range(self.FLIPS):
                i = int(rng.integers(model.num_vars))
                before = model.energy(state.bits())
                delta = state.flip(i)
                self.assertAlmostEqual(model.energy(state.bits()) - before, delta, places=9)


class BestStateTrackingTests(SimpleTestCase):
    N = 64

    def test_higher_order_keeps_best_state_reached_mid_sweep(self):
        h = ParityCheckMatrix.from_rows(0, self.N, [])
        bias = np.ones(self.N)
        bias[0] = 100.0
        spins = np.ones(self.N, dtype=np.int8)
        spins[0] = -1
        model = build_higher_order(h, bias, 1.0)
        improved = 0
        for seed in range(5):
            # beta = 0 accepts every flip, so one sweep flips each spin once
            best, best_delta, final, _, final_delta = anneal_higher_order(
                h.col_ptr, h.row_idx, model.bias, 1.0, spins.copy(), model.parities(spins), np.zeros(1), seed)
            np.testing.assert_array_equal(final, -spins)
            self.assertAlmostEqual(model.energy(best) - model.energy(spins), best_delta, places=9)
            self.assertLessEqual(best_delta, final_delta)
            improved += best_delta < final_delta
        self.assertGreaterEqual(improved, 4)

    def test_ising_keeps_best_state_reached_mid_sweep(self):
        fields = np.ones(self.N)
        fields[0] = -100.0
        spins = np.ones(self.N, dtype=np.int8)
        indptr = np.zeros(self.N + 1, dtype=np.int64)
        empty_indices = np.zeros(0, dtype=np.int64)
        empty_data = np.zeros(0)
        improved = 0
        for seed in range(5):
            best, best_delta, final, final_delta = anneal_ising(
                indptr, empty_indices, empty_data, fields, spins.copy(), np.zeros(1), seed)
            np.testing.assert_array_equal(final, -spins)
            # flipping spin i changes the energy by 2 * s_i * field_i
            self.assertAlmostEqual(float(-fields @ (best - spins)), best_delta, places=9)
            self.assertLessEqual(best_delta, final_delta)
            improved += best_delta < final_delta
        self.assertGreaterEqual(improved, 4)


def sa_bit_errors(h, words, formulation, cfg, alpha=2.0):
    errors = 0
    for codeword, observation in words:
        outcome = decode_via_sa(h, observation, formulation, alpha, cfg)
        errors += np.count_nonzero(outcome.bits != codeword)
    return errors


class SaBerTrendTests(SimpleTestCase):
    def setUp(self):
        self.h = expand_base_graph(bundled_bg1(), 2)
        generator = build_generator(self.h)
        rng = np.random.default_rng(2025)
        self.words = []
        for _ in range(30):
            codeword = generator.encode(rng.integers(0, 2, size=generator.k))
            self.words.append((codeword, transmit(modulate(codeword), 2.0, self.h.rate, rng)))
        self.total_bits = 30 * self.h.n

    def test_higher_order_ber_not_worse_than_qubo_at_equal_sweeps(self):
        cfg = SaConfig(sweeps=100, num_anneals=2, seed=61)
        higher = sa_bit_errors(self.h, self.words, 'higher-order', cfg)
        for encoding in ('unary', 'binary'):
            with self.subTest(encoding=encoding):
                quadratic = sa_bit_errors(self.h, self.words, encoding, cfg)
                self.assertLessEqual(higher / self.total_bits, quadratic / self.total_bits + 0.01)

    def test_more_sweeps_do_not_raise_ber(self):
        errors = [sa_bit_errors(self.h, self.words, 'higher-order', SaConfig(sweeps=sweeps, num_anneals=2, seed=62))
                  for sweeps in (10, 100, 1000)]
        for fewer, more in zip(errors, errors[1:]):
            self.assertLessEqual(more / self.total_bits, fewer / self.total_bits + 0.01)
