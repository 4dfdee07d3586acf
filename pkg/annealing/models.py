"""
Annealer configuration and the incremental spin states.

The states here are the reference bookkeeping used by the oracles and the
debug re-checks; the hot loops in kernels.py implement the same updates.
"""

from dataclasses import dataclass

import numpy as np

from codes.exceptions import ParameterError
from formulations.models import as_spins
from formulations.qubo import ising_energy, to_ising


@dataclass(frozen=True)
class SaConfig:
    sweeps: int = 10000
    num_anneals: int = 10
    beta_start: float = 0.1
    beta_end: float = 5.0
    seed: int = None

    def __post_init__(self):
        if self.sweeps < 1:
            raise ParameterError('sweeps must be >= 1')
        if self.num_anneals < 1:
            raise ParameterError('num_anneals must be >= 1')
        if not 0 < self.beta_start <= self.beta_end:
            raise ParameterError('need 0 < beta_start <= beta_end')

    def betas(self):
        """Inverse temperature of every sweep, geometric from beta_start to beta_end."""
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps)

    def anneal_seed(self, index):
        state = np.random.SeedSequence([self.seed, index]).generate_state(1, dtype=np.uint32)
        return int(state[0])


class QuadraticState:
    """Ising form of a QUBO with a cached local field h_i + sum_j J_ij s_j."""

    def __init__(self, model, spins):
        couplings, self.fields, self.offset = to_ising(model)
        self.couplings = couplings
        self.symmetric = (couplings + couplings.T).tocsr()
        self.spins = as_spins(spins, self.fields.shape[0]).copy()
        self.local = self.fields + self.symmetric @ self.spins
        self.energy = self.recompute_energy()

    def recompute_energy(self):
        return ising_energy(self.couplings, self.fields, self.offset, self.spins)

    def flip_delta(self, i):
        return float(2.0 * self.spins[i] * self.local[i])

    def flip(self, i):
        delta = self.flip_delta(i)
        old = self.spins[i]
        self.spins[i] = -old
        row = slice(self.symmetric.indptr[i], self.symmetric.indptr[i + 1])
        self.local[self.symmetric.indices[row]] -= 2.0 * old * self.symmetric.data[row]
        self.energy += delta
        return delta

    def bits(self):
        return ((self.spins + 1) // 2).astype(np.uint8)


class HigherOrderState:
    """Spins of a HigherOrderModel with the parity P_j of every check."""

    def __init__(self, model, spins):
        self.model = model
        self.spins = as_spins(spins, model.n).copy()
        self.parities = model.parities(self.spins)
        self.energy = self.recompute_energy()

    def recompute_energy(self):
        return self.model.energy(self.spins)

    def flip_delta(self, i):
        h = self.model.h
        return float(4.0 * self.model.bias[i] * self.spins[i]
                     + self.model.alpha * self.parities[h.checks_of(i)].sum())

    def flip(self, i):
        delta = self.flip_delta(i)
        self.spins[i] = -self.spins[i]
        self.parities[self.model.h.checks_of(i)] *= -1
        self.energy += delta
        return delta

    def consistent(self):
        return np.array_equal(self.parities, self.model.parities(self.spins))

    def bits(self):
        return ((1 - self.spins) // 2).astype(np.uint8)
