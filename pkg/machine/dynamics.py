"""
Behavioral simulation of the augmented Ising machine.

Every node i integrates

    dv_i/dt = (1 / tau) * (4 R_i / alpha + g(t) * q_i * sum_{j in checks(i)} P_j)

where q_i is the quantized spin and P_j the XNOR-tree parity of check j,
so q_i * P_j is the parity with node i's own spin backed out. The
quantizer output is sampled at the start of each step. Derivatives that
push a node past a rail are zeroed, and nodes clipped by a spin-fix
event do not move.
"""

import csv
import logging
from contextlib import nullcontext

import numpy as np
from scipy.integrate import solve_ivp

from codes.exceptions import DimensionError
from codes.models import DecodeOutcome
from .kernels import integrate_rk4
from .models import MachineConfig, MachineState

logger = logging.getLogger(__name__)

# indexed by the cause codes of the compiled loop
CAUSES = ('initial', 'spinfix', 'dynamics')


class AugmentedIsingMachine:
    def __init__(self, h, received, cfg=None):
        received = np.asarray(received, dtype=np.float64)
        if received.ndim != 1 or received.shape[0] != h.n:
            raise DimensionError(f'received vector has shape {received.shape}, expected ({h.n},)')
        self.h = h
        self.received = received
        self.cfg = cfg or MachineConfig()
        self.bias = 4.0 * received / self.cfg.alpha
        self.rng = np.random.default_rng(self.cfg.seed)

    # -- dynamics ----------------------------------------------------------

    def coupling(self, state):
        """q_i * sum_j P_j over the checks of node i."""
        inflow = np.bincount(self.h.edge_var, weights=state.parities[self.h.edge_check], minlength=self.h.n)
        return state.quantized * inflow

    def _rhs(self, t, voltages, coupling, frozen):
        rate = (self.bias + self.cfg.gain(t) * coupling) / self.cfg.time_constant
        rail = self.cfg.rail
        rate[((voltages >= rail) & (rate > 0)) | ((voltages <= -rail) & (rate < 0)) | frozen] = 0.0
        return rate

    def derivative(self, state):
        return self._rhs(state.time, state.voltages, self.coupling(state), state.clipped())

    def _rk4(self, t, v, coupling, frozen, dt):
        k1 = self._rhs(t, v, coupling, frozen)
        k2 = self._rhs(t + dt / 2, v + dt / 2 * k1, coupling, frozen)
        k3 = self._rhs(t + dt / 2, v + dt / 2 * k2, coupling, frozen)
        k4 = self._rhs(t + dt, v + dt * k3, coupling, frozen)
        return v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    def _rk45(self, t, v, coupling, frozen, dt):
        solution = solve_ivp(lambda s, y: self._rhs(s, y, coupling, frozen), (t, t + dt), v,
                             method='RK45', max_step=dt, rtol=1e-6, atol=1e-9 * self.cfg.rail)
        return solution.y[:, -1]

    def step(self, state):
        """Advance one dt, then clamp to the rails, re-quantize and refresh parities."""
        dt = self.cfg.dt
        frozen = state.clipped()
        integrate = self._rk45 if self.cfg.integrator == 'rk45' else self._rk4
        voltages = integrate(state.time, state.voltages, self.coupling(state), frozen, dt)
        voltages[frozen] = state.clip_level[frozen]
        state.voltages = np.clip(voltages, -self.cfg.rail, self.cfg.rail)
        state.time += dt
        state.quantize()
        return state

    # -- spin-fix ----------------------------------------------------------

    def spinfix_schedule(self):
        """
        Clip events for the whole run, drawn up front: a Poisson count per
        step, then a random node and rail for each event. Returns
        (offsets, nodes, levels) with step s owning events offsets[s]:offsets[s + 1].
        """
        cfg = self.cfg
        steps = cfg.num_steps
        if cfg.spinfix_rate == 0:
            return np.zeros(steps + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        ends = np.cumsum(np.full(steps, cfg.dt))
        starts = np.concatenate(([0.0], ends[:-1]))
        counts = self.rng.poisson(cfg.expected_spinfixes(starts, ends))
        offsets = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        total = int(offsets[-1])
        nodes = self.rng.integers(self.h.n, size=total).astype(np.int64)
        levels = np.where(self.rng.random(total) < 0.5, cfg.rail, -cfg.rail)
        return offsets, nodes, levels

    def spinfix(self, state, nodes, levels):
        """Clip `nodes` to `levels` for clip_duration; returns the count."""
        for node, level in zip(nodes, levels):
            state.clip_until[node] = state.time + self.cfg.clip_duration
            state.clip_level[node] = level
            state.voltages[node] = level
        if len(nodes):
            state.quantize()
        return len(nodes)

    # -- driver ------------------------------------------------------------

    def initial_state(self, initial_voltages=None):
        cfg = self.cfg
        if initial_voltages is not None:
            voltages = initial_voltages
        elif cfg.initial == 'channel':
            voltages = np.clip(self.received, -cfg.rail, cfg.rail)
        else:
            voltages = self.rng.uniform(-cfg.rail, cfg.rail, size=self.h.n)
        return MachineState(self.h, voltages, rail=cfg.rail)

    def energy(self, state):
        """Higher-order objective of the quantized spins."""
        return float(-2.0 * self.received @ state.quantized - 0.5 * self.cfg.alpha * state.parities.sum())

    def _record(self, events, previous, state, cause):
        flipped = int(np.count_nonzero(previous != state.quantized))
        if flipped:
            events.append((state.time, self.energy(state), flipped, cause))

    def _integrate_compiled(self, state, schedule):
        cfg, h = self.cfg, self.h
        offsets, nodes, levels = schedule
        time, times, energies, flipped, causes, count = integrate_rk4(
            h.col_ptr, h.row_idx, self.received, self.bias, float(cfg.alpha), state.voltages,
            state.quantized, state.parities, state.clip_until, state.clip_level, state.time, cfg.dt,
            cfg.num_steps, cfg.time_constant, cfg.rail, cfg.clip_duration, cfg.gain_enabled,
            cfg.gain_min, cfg.gain_tau, offsets, nodes, levels)
        state.time = time
        return [(float(times[e]), float(energies[e]), int(flipped[e]), CAUSES[causes[e]]) for e in range(count)]

    def _integrate_stepwise(self, state, schedule, writer):
        offsets, nodes, levels = schedule
        events = []
        for s in range(self.cfg.num_steps):
            lo, hi = offsets[s], offsets[s + 1]
            if hi > lo:
                previous = state.quantized
                self.spinfix(state, nodes[lo:hi], levels[lo:hi])
                self._record(events, previous, state, 'spinfix')
            previous = state.quantized
            self.step(state)
            self._record(events, previous, state, 'dynamics')
            if writer:
                writer.write(state)
        return events

    def run(self, initial_voltages=None, trajectory=None):
        """
        Integrate for cfg.total_time and decode the quantized spins.

        `trajectory` may be a path or a text file object; one CSV row per
        step is written to it. Fixed-step RK4 runs without a trajectory go
        through the compiled loop, everything else steps in numpy.
        """
        cfg = self.cfg
        state = self.initial_state(initial_voltages)
        energy_events = [(state.time, self.energy(state), 0, 'initial')]
        schedule = self.spinfix_schedule()

        if trajectory is None:
            sink = nullcontext(None)
        elif hasattr(trajectory, 'write'):
            sink = nullcontext(trajectory)
        else:
            sink = open(trajectory, 'w', newline='', encoding='utf-8')

        with sink as handle:
            if handle is None and cfg.integrator == 'rk4':
                energy_events += self._integrate_compiled(state, schedule)
            else:
                writer = TrajectoryWriter(handle, min(cfg.trajectory_nodes, self.h.n)) if handle else None
                if writer:
                    writer.write(state)
                energy_events += self._integrate_stepwise(state, schedule, writer)

        spinfixes = int(schedule[0][-1])
        bits = state.bits()
        success = self.h.is_codeword(bits)
        logger.debug(f'Machine run: t={state.time:.3g}s success={success} '
                     f'events={len(energy_events) - 1} spinfixes={spinfixes}')
        return DecodeOutcome(
            bits=bits,
            success=success,
            iterations=cfg.num_steps,
            energy=self.energy(state),
            elapsed_time=state.time,
            details={
                'energy_events': energy_events,
                'spinfixes': spinfixes,
                'voltages': state.voltages.copy(),
                'satisfied_checks': state.satisfied_checks(),
            },
        )


class TrajectoryWriter:
    """CSV rows: time, v_0 .. v_{k-1}, satisfied_checks."""

    def __init__(self, handle, num_nodes):
        self.num_nodes = num_nodes
        self.writer = csv.writer(handle)
        self.writer.writerow(['time'] + [f'v_{i}' for i in range(num_nodes)] + ['satisfied_checks'])

    def write(self, state):
        row = [f'{state.time:.6g}'] + [f'{v:.6g}' for v in state.voltages[:self.num_nodes]]
        self.writer.writerow(row + [state.satisfied_checks()])


def descent_fraction(energy_events, tolerance=1e-9, single_flips_only=False):
    """
    Share of quantization changes made by the dynamics (not by spin-fix
    clips) that did not raise the energy of the quantized spins.
    """
    checked = descended = 0
    for before, after in zip(energy_events, energy_events[1:]):
        _, energy, flipped, cause = after
        if cause != 'dynamics' or (single_flips_only and flipped != 1):
            continue
        checked += 1
        descended += energy - before[1] <= tolerance
    return descended / checked if checked else 1.0


def derivative(state, h, r, cfg=None):
    return AugmentedIsingMachine(h, r, cfg).derivative(state)


def step(state, h, r, cfg=None):
    return AugmentedIsingMachine(h, r, cfg).step(state)


def run(h, observation, cfg=None, initial_voltages=None, trajectory=None):
    return AugmentedIsingMachine(h, observation.received, cfg).run(initial_voltages, trajectory)
