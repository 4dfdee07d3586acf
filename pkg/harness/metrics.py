import logging

import numpy as np
from scipy import stats

from codes.exceptions import DimensionError, ParameterError
from codes.models import as_bits

from .models import AnnealEnsemble, BerStats, Solution

logger = logging.getLogger(__name__)


def ber(decoded, truth, stats_=None):
    """
    Count bit errors between decoded and transmitted message bits into a
    BerStats (a fresh one unless `stats_` is given) and return it.
    """
    decoded = as_bits(decoded)
    truth = as_bits(truth)
    if decoded.shape != truth.shape:
        raise DimensionError(f'decoded has {decoded.shape[0]} bits, truth has {truth.shape[0]}')
    stats_ = stats_ if stats_ is not None else BerStats()
    stats_.add(decoded, truth)
    return stats_


def build_ensemble(results, truth):
    """
    Group anneal results into an AnnealEnsemble.

    `results` is an iterable of (message bits, energy) pairs, one per anneal.
    Identical bit patterns merge into one ranked solution with a multiplicity.
    """
    truth = as_bits(truth)
    grouped = {}
    for bits, energy in results:
        bits = as_bits(bits)
        if bits.shape != truth.shape:
            raise DimensionError(f'anneal result has {bits.shape[0]} bits, truth has {truth.shape[0]}')
        key = tuple(int(b) for b in bits)
        if key in grouped:
            best, count = grouped[key]
            grouped[key] = (min(best, float(energy)), count + 1)
        else:
            grouped[key] = (float(energy), 1)
    solutions = [
        Solution(bits=key, energy=energy, multiplicity=count,
                 errors=int(np.count_nonzero(np.array(key, dtype=np.uint8) != truth)))
        for key, (energy, count) in grouped.items()
    ]
    if not solutions:
        raise ParameterError('an anneal ensemble needs at least one result')
    return AnnealEnsemble(solutions)


def mean_ber(ensemble, n):
    return float(ensemble.probabilities() @ ensemble.errors()) / n


def expected_ber(ensemble, num_anneals, n):
    """
    Expected BER when the lowest-energy of `num_anneals` independent anneals
    is kept, with per-rank probabilities estimated from the ensemble.
    """
    if num_anneals < 1:
        raise ParameterError(f'num_anneals must be at least 1, got {num_anneals}')
    if n < 1:
        raise ParameterError(f'message length must be positive, got {n}')
    if not len(ensemble):
        raise ParameterError('expected_ber needs a nonempty ensemble')

    probabilities = ensemble.probabilities()
    # tail[k] = P(rank >= k), with a trailing zero
    tail = np.append(np.cumsum(probabilities[::-1])[::-1], 0.0)
    tail = np.clip(tail, 0.0, 1.0)
    weights = tail[:-1] ** num_anneals - tail[1:] ** num_anneals
    return float(weights @ ensemble.errors()) / n


def sign_test(errors_a, errors_b):
    """
    Two-sided paired sign test on per-trial error counts. Ties are dropped.
    Returns (a_better, b_better, ties, p_value); p is 1.0 without untied pairs.
    """
    errors_a = np.asarray(errors_a)
    errors_b = np.asarray(errors_b)
    if errors_a.shape != errors_b.shape:
        raise DimensionError(f'paired samples differ in length: {errors_a.shape} vs {errors_b.shape}')
    a_better = int(np.count_nonzero(errors_a < errors_b))
    b_better = int(np.count_nonzero(errors_b < errors_a))
    ties = int(errors_a.size - a_better - b_better)
    untied = a_better + b_better
    if untied == 0:
        return a_better, b_better, ties, 1.0
    p_value = stats.binomtest(a_better, untied, 0.5, alternative='two-sided').pvalue
    return a_better, b_better, ties, float(p_value)
