import io

import numpy as np
from django.apps import apps
from django.test import SimpleTestCase

from channel.awgn import modulate, transmit
from channel.models import ChannelObservation
from codes.construction import bundled_bg1, expand_base_graph
from codes.exceptions import ConfigurationError, DimensionError
from codes.generator import build_generator
from codes.models import ParityCheckMatrix
from decoders.belief_propagation import decode as bp_decode
from decoders.models import BpConfig
from formulations.qubo import build_higher_order
from .apps import MachineAppConfig
from .dynamics import AugmentedIsingMachine, derivative, descent_fraction, run
from .models import MachineConfig, MachineState
from .serializers import MachineConfigSerializer

TAU = 1e-9
SINGLE_CHECK = ParityCheckMatrix.from_rows(1, 3, [[0, 1, 2]])


def quiet(**overrides):
    """No spin-fix, short horizon."""
    options = dict(time_constant=TAU, total_time=20 * TAU, dt=TAU / 20, spinfix_rate=0.0)
    options.update(overrides)
    return MachineConfig(**options)


class DerivativeTests(SimpleTestCase):
    def test_violated_check_pushes_every_node_to_flip(self):
        state = MachineState(SINGLE_CHECK, [0.5, 0.5, -0.5])
        self.assertEqual(state.parities.tolist(), [-1])
        np.testing.assert_allclose(derivative(state, SINGLE_CHECK, np.zeros(3), quiet()) * TAU, [-1, -1, 1])

    def test_satisfied_check_reinforces(self):
        state = MachineState(SINGLE_CHECK, [0.5, 0.5, 0.5])
        np.testing.assert_allclose(derivative(state, SINGLE_CHECK, np.zeros(3), quiet()) * TAU, [1, 1, 1])

    def test_zero_degree_node_follows_bias_until_rail(self):
        h = ParityCheckMatrix.from_rows(0, 1, [])
        cfg = quiet(alpha=2.0)
        self.assertGreater(derivative(MachineState(h, [0.2]), h, [0.3], cfg)[0], 0)
        self.assertEqual(derivative(MachineState(h, [1.0]), h, [0.3], cfg)[0], 0)

    def test_clipped_node_does_not_move(self):
        state = MachineState(SINGLE_CHECK, [0.5, 0.5, -0.5])
        state.clip_until[1] = 1.0
        rates = derivative(state, SINGLE_CHECK, np.zeros(3), quiet())
        self.assertEqual(rates[1], 0.0)
        self.assertNotEqual(rates[0], 0.0)

    def test_parities_follow_quantized_spins(self):
        h = expand_base_graph(bundled_bg1(), 2)
        state = MachineState(h, np.random.default_rng(1).uniform(-1, 1, size=h.n))
        expected = [np.prod(state.quantized[h.check(j)]) for j in range(h.m)]
        np.testing.assert_array_equal(state.parities, expected)

    def test_voltage_length_checked(self):
        with self.assertRaises(DimensionError):
            MachineState(SINGLE_CHECK, [0.1, 0.2])


class MachineConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = MachineConfig()
        self.assertAlmostEqual(cfg.dt, 1e-9 / 50)
        self.assertAlmostEqual(cfg.clip_duration, 2 * cfg.dt)
        self.assertEqual(cfg.num_steps, 110000)

    def test_step_must_be_below_time_constant(self):
        with self.assertRaises(ConfigurationError):
            MachineConfig(time_constant=TAU, dt=TAU)

    def test_gain_schedule(self):
        cfg = MachineConfig(gain_enabled=True, gain_min=0.2, gain_tau=1e-7)
        self.assertAlmostEqual(cfg.gain(0.0), 0.2)
        self.assertAlmostEqual(cfg.gain(1.0), 1.0)
        self.assertEqual(MachineConfig().gain(0.0), 1.0)

    def test_spinfix_rate_decays(self):
        cfg = MachineConfig(spinfix_rate=1e8, spinfix_decay=1e-7)
        self.assertAlmostEqual(cfg.spinfix_rate_at(1e-7) / cfg.spinfix_rate_at(0.0), np.exp(-1))
        self.assertAlmostEqual(cfg.expected_spinfixes(0.0, 1.0), 10.0)

    def test_serializer_resolves_step(self):
        serializer = MachineConfigSerializer(data={'seed': 4})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        cfg = serializer.save()
        self.assertAlmostEqual(cfg.dt, cfg.time_constant / 50)
        self.assertEqual(cfg.seed, 4)

    def test_serializer_rejects_coarse_step(self):
        serializer = MachineConfigSerializer(data={'time_constant': 1e-9, 'dt': 2e-9})
        self.assertFalse(serializer.is_valid())
        self.assertIn('dt', serializer.errors)


class RunTests(SimpleTestCase):
    def test_single_check_settles_satisfied(self):
        for seed in range(100):
            outcome = run(SINGLE_CHECK, _observation(np.zeros(3)), quiet(seed=seed))
            self.assertTrue(outcome.success, f'seed {seed}')
            self.assertEqual(outcome.details['satisfied_checks'], 1)

    def test_transmitted_codeword_is_a_fixed_point(self):
        h = expand_base_graph(bundled_bg1(), 2)
        generator = build_generator(h)
        codeword = generator.encode(np.random.default_rng(9).integers(0, 2, size=generator.k))
        signal = modulate(codeword)
        observation = transmit(signal, float('inf'), h.rate, np.random.default_rng(0))
        outcome = run(h, observation, quiet(), initial_voltages=signal)
        self.assertTrue(outcome.success)
        np.testing.assert_array_equal(outcome.bits, codeword)
        np.testing.assert_array_equal(outcome.details['voltages'], signal)
        self.assertEqual(len(outcome.details['energy_events']), 1)

    def test_same_seed_same_run(self):
        h = expand_base_graph(bundled_bg1(), 2)
        observation = transmit(np.ones(h.n), 2.0, h.rate, np.random.default_rng(3))
        cfg = quiet(seed=21, spinfix_rate=5e9, spinfix_decay=5 * TAU)
        first = run(h, observation, cfg)
        second = run(h, observation, cfg)
        np.testing.assert_array_equal(first.bits, second.bits)
        np.testing.assert_array_equal(first.details['voltages'], second.details['voltages'])
        self.assertEqual(first.details['spinfixes'], second.details['spinfixes'])
        self.assertGreater(first.details['spinfixes'], 0)

    def test_single_flips_never_raise_energy(self):
        h = expand_base_graph(bundled_bg1(), 2)
        for seed in range(5):
            observation = transmit(np.ones(h.n), 2.0, h.rate, np.random.default_rng(seed))
            outcome = run(h, observation, quiet(seed=seed, total_time=10 * TAU))
            self.assertEqual(descent_fraction(outcome.details['energy_events'], single_flips_only=True), 1.0)
            self.assertAlmostEqual(outcome.energy,
                                   build_higher_order(h, observation.received, 2.0).energy(1 - 2 * outcome.bits.astype(int)))

    def test_compiled_loop_matches_stepwise_loop(self):
        h = expand_base_graph(bundled_bg1(), 2)
        observation = transmit(np.ones(h.n), 1.5, h.rate, np.random.default_rng(8))
        for gain_enabled in (False, True):
            with self.subTest(gain_enabled=gain_enabled):
                cfg = quiet(seed=13, total_time=30 * TAU, spinfix_rate=5e9, spinfix_decay=5 * TAU,
                            gain_enabled=gain_enabled, gain_tau=5 * TAU)
                compiled = run(h, observation, cfg)
                stepwise = run(h, observation, cfg, trajectory=io.StringIO())
                np.testing.assert_array_equal(compiled.bits, stepwise.bits)
                np.testing.assert_allclose(compiled.details['voltages'], stepwise.details['voltages'], atol=1e-12)
                self.assertEqual(compiled.details['spinfixes'], stepwise.details['spinfixes'])
                self.assertAlmostEqual(compiled.elapsed_time, stepwise.elapsed_time, delta=1e-18)
                compiled_events = compiled.details['energy_events']
                stepwise_events = stepwise.details['energy_events']
                self.assertEqual([e[2:] for e in compiled_events], [e[2:] for e in stepwise_events])
                np.testing.assert_allclose([e[1] for e in compiled_events], [e[1] for e in stepwise_events])

    def test_spinfix_schedule_is_drawn_per_step(self):
        h = expand_base_graph(bundled_bg1(), 2)
        cfg = quiet(seed=3, spinfix_rate=5e9, spinfix_decay=5 * TAU)
        offsets, nodes, levels = AugmentedIsingMachine(h, np.zeros(h.n), cfg).spinfix_schedule()
        self.assertEqual(offsets.shape, (cfg.num_steps + 1,))
        self.assertTrue(np.all(np.diff(offsets) >= 0))
        self.assertEqual(nodes.shape, levels.shape)
        self.assertEqual(int(offsets[-1]), nodes.shape[0])
        self.assertTrue(np.all(np.abs(levels) == cfg.rail))
        self.assertTrue(np.all((nodes >= 0) & (nodes < h.n)))
        self.assertAlmostEqual(nodes.shape[0], cfg.expected_spinfixes(0.0, cfg.total_time), delta=25)
        empty = AugmentedIsingMachine(h, np.zeros(h.n), quiet(seed=3)).spinfix_schedule()
        self.assertEqual(int(empty[0][-1]), 0)

    def test_quantization_changes_descend_including_multi_node_events(self):
        h = expand_base_graph(bundled_bg1(), 2)
        checked = descended = 0
        for seed in range(5):
            observation = transmit(np.ones(h.n), 2.0, h.rate, np.random.default_rng(seed))
            outcome = run(h, observation, quiet(seed=seed, dt=TAU / 500, total_time=10 * TAU))
            events = outcome.details['energy_events']
            dynamics = sum(1 for event in events if event[3] == 'dynamics')
            checked += dynamics
            descended += descent_fraction(events) * dynamics
        self.assertGreater(checked, 0)
        self.assertGreaterEqual(descended / checked, 0.99)

    def test_integrators_agree(self):
        start = np.array([0.3, 0.6, -0.8])
        rk4 = run(SINGLE_CHECK, _observation([0.1, -0.2, 0.05]), quiet(), initial_voltages=start)
        rk45 = run(SINGLE_CHECK, _observation([0.1, -0.2, 0.05]), quiet(integrator='rk45', total_time=5 * TAU),
                   initial_voltages=start)
        np.testing.assert_array_equal(rk4.bits, rk45.bits)

    def test_trajectory_dump(self):
        buffer = io.StringIO()
        h = expand_base_graph(bundled_bg1(), 2)
        cfg = quiet(total_time=TAU, trajectory_nodes=4, seed=2)
        run(h, _observation(np.ones(h.n)), cfg, trajectory=buffer)
        rows = buffer.getvalue().splitlines()
        self.assertEqual(rows[0], 'time,v_0,v_1,v_2,v_3,satisfied_checks')
        self.assertEqual(len(rows), cfg.num_steps + 2)
        self.assertEqual(len(rows[-1].split(',')), 6)

    def test_machine_rejects_wrong_length(self):
        with self.assertRaises(DimensionError):
            AugmentedIsingMachine(SINGLE_CHECK, np.zeros(4))


def _observation(received):
    return ChannelObservation(received=np.asarray(received, dtype=float), noise_variance=1.0,
                              ebno_db=0.0, rate=0.5)


class MachineBerTrendTests(SimpleTestCase):
    WORDS = 60

    def test_machine_sits_between_one_and_seven_bp_iterations(self):
        h = expand_base_graph(bundled_bg1(), 2)
        generator = build_generator(h)
        rng = np.random.default_rng(4242)
        errors = {'machine': 0, 'oms@1': 0, 'oms@7': 0}
        oms = {budget: BpConfig(algorithm='offset-min-sum', max_iterations=budget) for budget in (1, 7)}
        for word in range(self.WORDS):
            codeword = generator.encode(rng.integers(0, 2, size=generator.k))
            observation = transmit(modulate(codeword), 1.0, h.rate, rng)
            outcome = run(h, observation, MachineConfig(seed=word))
            errors['machine'] += np.count_nonzero(outcome.bits != codeword)
            for budget, cfg in oms.items():
                errors[f'oms@{budget}'] += np.count_nonzero(bp_decode(h, observation.llr, cfg).bits != codeword)
        self.assertGreater(errors['oms@7'], 0)
        self.assertLessEqual(errors['machine'], 3 * errors['oms@7'])
        self.assertLess(errors['machine'], errors['oms@1'])


class AppConfigTests(SimpleTestCase):
    def test_app_config_is_distinct_from_machine_config(self):
        app_config = apps.get_app_config('machine')
        self.assertIsInstance(app_config, MachineAppConfig)
        self.assertIsNot(MachineAppConfig, MachineConfig)
