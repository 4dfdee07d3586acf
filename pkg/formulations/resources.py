"""Hardware resource counts for the co-designed machine and the QUBO formulations."""

import logging

import numpy as np

from codes.exceptions import ParameterError
from codes.models import ParityCheckMatrix
from .models import HigherOrderModel, QuadraticModel, ResourceReport
from .qubo import build_qubo

logger = logging.getLogger(__name__)

FORMULATIONS = ('co-designed', 'unary', 'binary')

CO_DESIGNED_CONVENTION = 'couplers = nnz(H) (one parity unit per 1 in H); aux = one per check'
QUBO_CONVENTION = ('couplers = distinct unordered pairs with nonzero coefficient; '
                   'matrix_couplers = nonzero off-diagonal cells of the symmetric coupling matrix')


def _co_designed(h):
    return ResourceReport(
        label='co-designed',
        num_spins=h.n,
        num_aux_spins=h.m,
        num_couplers=h.nnz,
        num_matrix_couplers=h.nnz,
        num_linear_terms=h.n,
        convention=CO_DESIGNED_CONVENTION,
        xnor_gates=2 * h.nnz,
        capacitors=h.n,
    )


def _quadratic(model):
    return ResourceReport(
        label=model.encoding or 'qubo',
        num_spins=model.num_vars,
        num_aux_spins=model.num_aux_vars,
        num_couplers=model.num_quadratic,
        num_matrix_couplers=model.symmetric.nnz,
        num_linear_terms=int(np.count_nonzero(model.linear)),
        convention=QUBO_CONVENTION,
    )


def resource_report(target):
    """Counts for a ParityCheckMatrix or HigherOrderModel (co-designed) or a QuadraticModel."""
    if isinstance(target, ParityCheckMatrix):
        return _co_designed(target)
    if isinstance(target, HigherOrderModel):
        return _co_designed(target.h)
    if isinstance(target, QuadraticModel):
        return _quadratic(target)
    raise ParameterError(f'cannot count resources of {type(target).__name__}')


def formulation_model(h, formulation, alpha=1.0):
    """`h` itself for the co-designed machine, else the QUBO of the noiseless all-zero word."""
    if formulation not in FORMULATIONS:
        raise ParameterError(f'unknown formulation {formulation!r}; expected one of {FORMULATIONS}')
    if formulation == 'co-designed':
        return h
    return build_qubo(h, np.ones(h.n), alpha, encoding=formulation)


def formulation_report(h, formulation):
    """Structural counts; the QUBO is built for the noiseless all-zero word."""
    report = resource_report(formulation_model(h, formulation))
    logger.info(f'{formulation}: spins={report.num_spins} aux={report.num_aux_spins} '
                f'couplers={report.num_couplers}')
    return report
