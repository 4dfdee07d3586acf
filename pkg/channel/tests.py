import numpy as np
from django.test import SimpleTestCase

from codes.exceptions import ParameterError
from .awgn import hard_decision, llr_init, modulate, noise_variance, transmit, uncoded_ber
from .models import ChannelObservation


class ModulationTests(SimpleTestCase):
    def test_bpsk_mapping(self):
        np.testing.assert_array_equal(modulate([0, 1, 1, 0]), [1.0, -1.0, -1.0, 1.0])

    def test_hard_decision_ties_decide_zero(self):
        np.testing.assert_array_equal(hard_decision([0.3, -0.1, 0.0, -0.0]), [0, 1, 0, 0])


class NoiseVarianceTests(SimpleTestCase):
    def test_half_rate_at_zero_db(self):
        self.assertAlmostEqual(noise_variance(0.0, 0.5), 1.0)

    def test_third_rate_at_three_db(self):
        self.assertAlmostEqual(noise_variance(3.0, 1 / 3), 1.5 / 10 ** 0.3)

    def test_rate_out_of_range(self):
        for rate in (0, -0.5, 1.5):
            with self.subTest(rate=rate), self.assertRaises(ParameterError):
                noise_variance(1.0, rate)

    def test_noiseless_limit_stays_positive(self):
        self.assertGreater(noise_variance(float('inf'), 0.5), 0.0)

    def test_uncoded_reference(self):
        self.assertAlmostEqual(float(uncoded_ber(0.0, 1)), 0.0786496, places=6)
        self.assertLess(float(uncoded_ber(8.0, 1)), 1e-3)


class TransmitTests(SimpleTestCase):
    def test_same_seed_same_observation(self):
        signal = modulate(np.zeros(64, dtype=np.uint8))
        first = transmit(signal, 1.5, 0.5, np.random.default_rng(99))
        second = transmit(signal, 1.5, 0.5, np.random.default_rng(99))
        np.testing.assert_array_equal(first.received, second.received)
        self.assertEqual(first.noise_variance, second.noise_variance)

    def test_noise_statistics(self):
        signal = np.ones(200000)
        obs = transmit(signal, 0.0, 0.5, np.random.default_rng(1))
        self.assertAlmostEqual(float(np.var(obs.received - signal)), 1.0, delta=0.02)

    def test_noiseless_passes_signal_through(self):
        signal = modulate([0, 1, 0])
        obs = transmit(signal, float('inf'), 0.5, np.random.default_rng(0))
        np.testing.assert_array_equal(obs.received, signal)
        np.testing.assert_array_equal(hard_decision(obs.llr), [0, 1, 0])

    def test_llr_sign_follows_received(self):
        obs = ChannelObservation(received=np.array([0.5, -2.0, 0.0]), noise_variance=0.5,
                                 ebno_db=0.0, rate=0.5)
        np.testing.assert_allclose(llr_init(obs), [2.0, -8.0, 0.0])
        np.testing.assert_allclose(obs.llr, llr_init(obs))

    def test_observation_rejects_zero_variance(self):
        with self.assertRaises(ParameterError):
            ChannelObservation(received=np.zeros(3), noise_variance=0.0, ebno_db=0.0, rate=0.5)


class HardDecisionBerTests(SimpleTestCase):
    BITS = 200_000

    def test_monte_carlo_matches_uncoded_reference(self):
        rng = np.random.default_rng(2718)
        for ebno_db in (0.0, 2.0, 4.0):
            with self.subTest(ebno_db=ebno_db):
                bits = rng.integers(0, 2, size=self.BITS).astype(np.uint8)
                obs = transmit(modulate(bits), ebno_db, 1, rng)
                measured = np.count_nonzero(hard_decision(obs.received) != bits) / self.BITS
                expected = float(uncoded_ber(ebno_db, 1))
                stderr = np.sqrt(expected * (1 - expected) / self.BITS)
                self.assertLessEqual(abs(measured - expected), 3 * stderr)

    def test_rate_enters_through_the_noise_variance(self):
        rng = np.random.default_rng(314)
        bits = np.zeros(self.BITS, dtype=np.uint8)
        obs = transmit(modulate(bits), 3.0, 0.5, rng)
        measured = np.count_nonzero(hard_decision(obs.llr)) / self.BITS
        expected = float(uncoded_ber(3.0, 0.5))
        stderr = np.sqrt(expected * (1 - expected) / self.BITS)
        self.assertLessEqual(abs(measured - expected), 3 * stderr)
