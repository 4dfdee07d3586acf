"""
Compiled fixed-step RK4 loop for the augmented Ising machine.

Mirrors AugmentedIsingMachine.step and its spin-fix handling: spin-fix
clips for step s are applied before the step's dynamics, the quantizer
is sampled once at the start of every step and check parities are
toggled as spins change. Quantization changes are written to
preallocated event arrays.
"""

import numpy as np
from numba import njit

SPINFIX = 1
DYNAMICS = 2


@njit(cache=True)
def _energy(received, alpha, quantized, parities):
    total = 0.0
    for i in range(quantized.shape[0]):
        total -= 2.0 * received[i] * quantized[i]
    satisfied = 0
    for j in range(parities.shape[0]):
        satisfied += parities[j]
    return total - 0.5 * alpha * satisfied


@njit(cache=True)
def _flip(i, col_ptr, row_idx, quantized, parities):
    quantized[i] = -quantized[i]
    for p in range(col_ptr[i], col_ptr[i + 1]):
        parities[row_idx[p]] = -parities[row_idx[p]]


@njit(cache=True)
def _rhs(t, v, bias, coupling, frozen, out, time_constant, rail, gain_enabled, gain_min, gain_tau):
    gain = 1.0
    if gain_enabled:
        gain = gain_min + (1.0 - gain_min) * (1.0 - np.exp(-t / gain_tau))
    for i in range(v.shape[0]):
        rate = (bias[i] + gain * coupling[i]) / time_constant
        if frozen[i] or (v[i] >= rail and rate > 0) or (v[i] <= -rail and rate < 0):
            rate = 0.0
        out[i] = rate


@njit(cache=True)
def integrate_rk4(col_ptr, row_idx, received, bias, alpha, voltages, quantized, parities,
                  clip_until, clip_level, time, dt, num_steps, time_constant, rail, clip_duration,
                  gain_enabled, gain_min, gain_tau, fix_ptr, fix_node, fix_level):
    """
    Advance `num_steps` steps in place. Returns (time, event_time,
    event_energy, event_flipped, event_cause, num_events).
    """
    n = voltages.shape[0]
    capacity = 2 * num_steps
    event_time = np.empty(capacity)
    event_energy = np.empty(capacity)
    event_flipped = np.empty(capacity, dtype=np.int64)
    event_cause = np.empty(capacity, dtype=np.int64)
    num_events = 0

    coupling = np.empty(n)
    frozen = np.empty(n, dtype=np.bool_)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    stage = np.empty(n)

    for s in range(num_steps):
        lo = fix_ptr[s]
        hi = fix_ptr[s + 1]
        if hi > lo:
            for p in range(lo, hi):
                node = fix_node[p]
                clip_until[node] = time + clip_duration
                clip_level[node] = fix_level[p]
                voltages[node] = fix_level[p]
            flipped = 0
            for p in range(lo, hi):
                node = fix_node[p]
                spin = 1 if voltages[node] >= 0 else -1
                if spin != quantized[node]:
                    _flip(node, col_ptr, row_idx, quantized, parities)
                    flipped += 1
            if flipped:
                event_time[num_events] = time
                event_energy[num_events] = _energy(received, alpha, quantized, parities)
                event_flipped[num_events] = flipped
                event_cause[num_events] = SPINFIX
                num_events += 1

        for i in range(n):
            frozen[i] = clip_until[i] > time
            inflow = 0.0
            for p in range(col_ptr[i], col_ptr[i + 1]):
                inflow += parities[row_idx[p]]
            coupling[i] = quantized[i] * inflow

        _rhs(time, voltages, bias, coupling, frozen, k1, time_constant, rail, gain_enabled, gain_min, gain_tau)
        for i in range(n):
            stage[i] = voltages[i] + dt / 2 * k1[i]
        _rhs(time + dt / 2, stage, bias, coupling, frozen, k2, time_constant, rail, gain_enabled, gain_min, gain_tau)
        for i in range(n):
            stage[i] = voltages[i] + dt / 2 * k2[i]
        _rhs(time + dt / 2, stage, bias, coupling, frozen, k3, time_constant, rail, gain_enabled, gain_min, gain_tau)
        for i in range(n):
            stage[i] = voltages[i] + dt * k3[i]
        _rhs(time + dt, stage, bias, coupling, frozen, k4, time_constant, rail, gain_enabled, gain_min, gain_tau)

        for i in range(n):
            if frozen[i]:
                v = clip_level[i]
            else:
                v = voltages[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
            voltages[i] = min(max(v, -rail), rail)
        time += dt

        flipped = 0
        for i in range(n):
            spin = 1 if voltages[i] >= 0 else -1
            if spin != quantized[i]:
                _flip(i, col_ptr, row_idx, quantized, parities)
                flipped += 1
        if flipped:
            event_time[num_events] = time
            event_energy[num_events] = _energy(received, alpha, quantized, parities)
            event_flipped[num_events] = flipped
            event_cause[num_events] = DYNAMICS
            num_events += 1

    return time, event_time, event_energy, event_flipped, event_cause, num_events
