"""
Quadratic (QUBO) decoding objective with auxiliary integer encoding.

    F(x, y) = sum_i (R_i - (1 - 2 x_i))^2 + alpha * sum_j (sum_{i in j} x_i - 2 L_j)^2

L_j is spelled out in auxiliary bits y_{j,k}: unary L_j = sum_k y_{j,k}
over floor(|H_j|/2) + 1 bits, binary L_j = sum_k 2^k y_{j,k} over
floor(log2(|H_j|/2)) + 1 bits. Checks with |H_j| <= 2 get one binary bit.
"""

import logging
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from codes.exceptions import DimensionError, ParameterError
from .models import HigherOrderModel, QuadraticModel, as_spins

logger = logging.getLogger(__name__)

ENCODINGS = ('unary', 'binary')


def aux_weights(degree, encoding):
    """Integer weights of the auxiliary bits that spell L_j for one check."""
    if encoding == 'unary':
        return np.ones(degree // 2 + 1, dtype=np.int64)
    if encoding == 'binary':
        if degree <= 2:
            return np.ones(1, dtype=np.int64)
        return 1 << np.arange((degree // 2).bit_length(), dtype=np.int64)
    raise ParameterError(f'unknown auxiliary encoding {encoding!r}; expected one of {ENCODINGS}')


def _received(h, r):
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] != h.n:
        raise DimensionError(f'received vector has shape {r.shape}, expected ({h.n},)')
    return r


def build_qubo(h, r, alpha, encoding='binary'):
    if not alpha > 0:
        raise ParameterError(f'alpha must be positive, got {alpha}')
    r = _received(h, r)
    weights = [aux_weights(int(d), encoding) for d in h.row_degrees]
    num_aux = sum(w.shape[0] for w in weights)
    num_vars = h.n + num_aux

    # (R_i - 1 + 2 x_i)^2 = (R_i - 1)^2 + 4 R_i x_i for x_i in {0, 1}
    linear = np.zeros(num_vars, dtype=np.float64)
    linear[:h.n] = 4.0 * r
    offset = float(np.sum((r - 1.0) ** 2))

    var_map = [('code', i) for i in range(h.n)]
    aux_checks = np.repeat(np.arange(h.m), [w.shape[0] for w in weights])
    rows, cols, values = [], [], []
    next_aux = h.n
    for j, w in enumerate(weights):
        code_vars = h.check(j)
        aux_vars = np.arange(next_aux, next_aux + w.shape[0])
        next_aux += w.shape[0]
        var_map.extend(('aux', j, k) for k in range(w.shape[0]))

        # (sum_t c_t v_t)^2 = sum_t c_t^2 v_t + 2 sum_{s<t} c_s c_t v_s v_t
        members = np.concatenate((code_vars, aux_vars))
        coeffs = np.concatenate((np.ones(code_vars.shape[0]), -2.0 * w))
        linear[members] += alpha * coeffs ** 2
        first, second = np.triu_indices(members.shape[0], k=1)
        rows.append(members[first])
        cols.append(members[second])
        values.append(2.0 * alpha * coeffs[first] * coeffs[second])

    if rows:
        rows, cols, values = np.concatenate(rows), np.concatenate(cols), np.concatenate(values)
    upper = coo_matrix((values, (rows, cols)), shape=(num_vars, num_vars)).tocsr()
    model = QuadraticModel(linear, upper, offset, var_map, encoding=encoding, alpha=alpha,
                           aux_checks=aux_checks, aux_weights=np.concatenate(weights) if weights else [])
    logger.debug(f'Built {model!r}')
    return model


def build_higher_order(h, r, alpha):
    return HigherOrderModel(h=h, bias=_received(h, r), alpha=float(alpha))


def to_ising(q):
    """
    Ising form of a QUBO under s = 2x - 1.

    Returns (J, h, offset) with J upper-triangular CSR and
    E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset = F(x).
    """
    upper = q.upper
    couplings = -0.25 * upper
    touching = np.asarray(upper.sum(axis=0)).ravel() + np.asarray(upper.sum(axis=1)).ravel()
    fields = -(0.5 * q.linear + 0.25 * touching)
    offset = q.offset + 0.5 * q.linear.sum() + 0.25 * upper.sum()
    return csr_matrix(couplings), fields, float(offset)


def ising_energy(couplings, fields, offset, spins):
    spins = as_spins(spins, fields.shape[0]).astype(np.float64)
    return float(-spins @ (couplings @ spins) - fields @ spins + offset)


def energy(model, assignment):
    """QUBO models take bits, higher-order models take spins."""
    return model.energy(assignment)


def export_qubo(model, path):
    """Plain-text triplets: "vars offset", then "i j coeff" (i == j for linear terms)."""
    lines = [f'{model.num_vars} {model.offset:.17g}']
    lines.extend(f'{i} {i} {v:.17g}' for i, v in enumerate(model.linear) if v != 0)
    coo = model.upper.tocoo()
    lines.extend(f'{i} {j} {v:.17g}' for i, j, v in zip(coo.row, coo.col, coo.data))
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    logger.info(f'Exported {model.num_vars}-variable QUBO to {path}')


def alpha_guarantee_bound(r):
    """Penalty weight above which no violated check can lower the objective."""
    return float(4.0 * np.abs(np.asarray(r, dtype=np.float64)).sum())
