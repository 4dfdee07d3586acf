"""
Compiled single-spin-flip Metropolis loops.

Both kernels take the inverse temperature of every sweep, visit the spins
in a fresh random order each sweep and return energies relative to the
starting state. The best state is tracked flip by flip: every accepted
flip is journaled, and at the end of a sweep the flips made after the
lowest energy of that sweep are undone on a copy of the spins.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _rewind(spins, journal, start, stop, best):
    best[:] = spins
    for p in range(start, stop):
        best[journal[p]] = -best[journal[p]]


@njit(cache=True)
def anneal_ising(indptr, indices, data, fields, spins, betas, seed):
    """Ising model with symmetric couplings in CSR form (indptr, indices, data)."""
    np.random.seed(seed)
    n = spins.shape[0]
    local = fields.copy()
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            local[i] += data[p] * spins[indices[p]]

    energy = 0.0
    best = spins.copy()
    best_energy = 0.0
    journal = np.empty(n, dtype=np.int64)
    for sweep in range(betas.shape[0]):
        beta = betas[sweep]
        order = np.random.permutation(n)
        flips = 0
        mark = -1
        for t in range(n):
            i = order[t]
            s = spins[i]
            delta = 2.0 * s * local[i]
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                spins[i] = -s
                energy += delta
                for p in range(indptr[i], indptr[i + 1]):
                    local[indices[p]] -= 2.0 * s * data[p]
                journal[flips] = i
                flips += 1
                if energy < best_energy:
                    best_energy = energy
                    mark = flips
        if mark >= 0:
            _rewind(spins, journal, mark, flips, best)
    return best, best_energy, spins, energy


@njit(cache=True)
def anneal_higher_order(col_ptr, row_idx, bias, alpha, spins, parities, betas, seed):
    """Parity-product model; col_ptr/row_idx list the checks of every spin."""
    np.random.seed(seed)
    n = spins.shape[0]
    energy = 0.0
    best = spins.copy()
    best_energy = 0.0
    journal = np.empty(n, dtype=np.int64)
    for sweep in range(betas.shape[0]):
        beta = betas[sweep]
        order = np.random.permutation(n)
        flips = 0
        mark = -1
        for t in range(n):
            i = order[t]
            s = spins[i]
            delta = 4.0 * bias[i] * s
            for p in range(col_ptr[i], col_ptr[i + 1]):
                delta += alpha * parities[row_idx[p]]
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                spins[i] = -s
                energy += delta
                for p in range(col_ptr[i], col_ptr[i + 1]):
                    parities[row_idx[p]] = -parities[row_idx[p]]
                journal[flips] = i
                flips += 1
                if energy < best_energy:
                    best_energy = energy
                    mark = flips
        if mark >= 0:
            _rewind(spins, journal, mark, flips, best)
    return best, best_energy, spins, parities, energy
