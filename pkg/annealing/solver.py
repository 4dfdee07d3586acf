"""Multi-restart simulated annealing over QUBO and higher-order models."""

import dataclasses
import logging

import numpy as np
from django.conf import settings

from codes.exceptions import InvariantViolation, ParameterError
from codes.models import DecodeOutcome
from formulations.models import HigherOrderModel, QuadraticModel
from formulations.qubo import build_higher_order, build_qubo, ising_energy, to_ising
from .kernels import anneal_higher_order, anneal_ising
from .models import SaConfig

logger = logging.getLogger(__name__)

FORMULATIONS = ('unary', 'binary', 'higher-order')


def _check_drift(tracked, recomputed, what):
    if abs(tracked - recomputed) > 1e-6 * max(1.0, abs(recomputed)):
        raise InvariantViolation(f'{what}: tracked energy {tracked!r} drifted from {recomputed!r}')


def _anneal_quadratic(model, cfg, betas, debug):
    couplings, fields, offset = to_ising(model)
    symmetric = (couplings + couplings.T).tocsr()
    indptr = symmetric.indptr.astype(np.int64)
    indices = symmetric.indices.astype(np.int64)
    outcomes = []
    for index in range(cfg.num_anneals):
        seed = cfg.anneal_seed(index)
        spins = np.random.default_rng(seed).choice(np.array([-1, 1], dtype=np.int8), size=model.num_vars)
        start = ising_energy(couplings, fields, offset, spins)
        best, best_delta, final, final_delta = anneal_ising(
            indptr, indices, symmetric.data, fields, spins.copy(), betas, seed)
        best_energy = start + best_delta
        if debug:
            _check_drift(start + final_delta, ising_energy(couplings, fields, offset, final), f'anneal {index}')
            _check_drift(best_energy, model.energy((best + 1) // 2), f'anneal {index} best state')
        outcomes.append(DecodeOutcome(
            bits=((best + 1) // 2).astype(np.uint8),
            success=False,
            iterations=cfg.sweeps,
            energy=float(best_energy),
            details={'anneal': index, 'seed': seed},
        ))
    return outcomes


def _anneal_higher_order(model, cfg, betas, debug):
    h = model.h
    outcomes = []
    for index in range(cfg.num_anneals):
        seed = cfg.anneal_seed(index)
        spins = np.random.default_rng(seed).choice(np.array([-1, 1], dtype=np.int8), size=model.n)
        start = model.energy(spins)
        best, best_delta, final, parities, final_delta = anneal_higher_order(
            h.col_ptr, h.row_idx, model.bias, float(model.alpha), spins.copy(),
            model.parities(spins), betas, seed)
        best_energy = start + best_delta
        if debug:
            if not np.array_equal(parities, model.parities(final)):
                raise InvariantViolation(f'anneal {index}: check parities out of step with spins')
            _check_drift(start + final_delta, model.energy(final), f'anneal {index}')
            _check_drift(best_energy, model.energy(best), f'anneal {index} best state')
        outcomes.append(DecodeOutcome(
            bits=((1 - best) // 2).astype(np.uint8),
            success=False,
            iterations=cfg.sweeps,
            energy=float(best_energy),
            details={'anneal': index, 'seed': seed},
        ))
    return outcomes


def anneal(model, cfg=None):
    """
    Run cfg.num_anneals independent anneals and return one outcome each,
    ordered by anneal index. Outcome bits cover every model variable
    (auxiliary bits included); `success` is left to the caller.
    """
    cfg = cfg or SaConfig()
    if cfg.seed is None:
        cfg = dataclasses.replace(cfg, seed=int(np.random.SeedSequence().entropy))
        logger.info(f'No annealing seed given, drew {cfg.seed}')
    betas = cfg.betas()
    debug = settings.DEBUG
    if isinstance(model, QuadraticModel):
        return _anneal_quadratic(model, cfg, betas, debug)
    if isinstance(model, HigherOrderModel):
        return _anneal_higher_order(model, cfg, betas, debug)
    raise ParameterError(f'cannot anneal {type(model).__name__}')


def build_model(h, received, formulation, alpha):
    if formulation == 'higher-order':
        return build_higher_order(h, received, alpha)
    if formulation in ('unary', 'binary'):
        return build_qubo(h, received, alpha, encoding=formulation)
    raise ParameterError(f'unknown formulation {formulation!r}; expected one of {FORMULATIONS}')


def decode_via_sa(h, observation, formulation='higher-order', alpha=2.0, cfg=None):
    """
    Anneal the chosen formulation of the received word and keep the
    lowest-energy anneal. Per-anneal outcomes (code bits only) are kept
    in `anneals` for the expected-BER estimate.
    """
    model = build_model(h, observation.received, formulation, alpha)
    raw = anneal(model, cfg)
    anneals = []
    for outcome in raw:
        bits = outcome.bits[:h.n].copy()
        anneals.append(dataclasses.replace(outcome, bits=bits, success=h.is_codeword(bits)))

    best = min(anneals, key=lambda outcome: outcome.energy)
    logger.debug(f'{formulation}: best energy {best.energy:.6g} over {len(anneals)} anneals, '
                 f'success={best.success}')
    return DecodeOutcome(
        bits=best.bits,
        success=best.success,
        iterations=best.iterations,
        energy=best.energy,
        anneals=anneals,
        details={'formulation': formulation, 'alpha': alpha, 'num_vars': len(raw[0].bits),
                 'best_anneal': best.details['anneal']},
    )
