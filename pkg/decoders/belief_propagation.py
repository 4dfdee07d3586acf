"""
Message-passing decoders over the Tanner graph.

All four check rules run vectorized over the edge arrays of a
ParityCheckMatrix (edges in CSR order). Per-check reductions use
np.bincount for sums and np.minimum.reduceat for the min-sum minima.
"""

import logging

import numpy as np

from codes.exceptions import DimensionError
from codes.models import DecodeOutcome
from .models import BpConfig, EdgeMessages

logger = logging.getLogger(__name__)

# log(0) guard for the tanh product
_TINY = 1e-300


def check_update(in_msgs, cfg=None):
    """Outgoing check-to-variable message given the other incoming messages."""
    cfg = cfg or BpConfig()
    msgs = np.asarray(in_msgs, dtype=np.float64)
    if msgs.ndim != 1 or msgs.size == 0:
        raise DimensionError('check_update needs at least one incoming message')
    sign = -1.0 if np.count_nonzero(msgs < 0) % 2 else 1.0

    if cfg.algorithm == 'sum-product':
        product = np.prod(np.abs(np.tanh(msgs / 2.0)))
        product = min(product, np.tanh(cfg.llr_clamp / 2.0))
        return float(sign * 2.0 * np.arctanh(product))

    magnitude = min(float(np.abs(msgs).min()), cfg.llr_clamp)
    if cfg.algorithm == 'normalized-min-sum':
        magnitude *= cfg.normalization_factor
    elif cfg.algorithm == 'offset-min-sum':
        magnitude = max(magnitude - cfg.offset_beta, 0.0)
    return float(sign * magnitude)


def variable_update(intrinsic, in_msgs, llr_clamp=25.0):
    total = float(intrinsic) + float(np.sum(in_msgs))
    return float(np.clip(total, -llr_clamp, llr_clamp))


def _check_messages(v2c, local_check, row_ptr, cfg):
    """
    Extrinsic check-to-variable messages for a contiguous block of checks.

    `local_check` maps each edge to its check index within the block and
    `row_ptr` delimits the block's checks (starting at 0).
    """
    num_checks = row_ptr.shape[0] - 1
    if v2c.size == 0:
        return v2c.copy()
    negative = v2c < 0
    parity = np.bincount(local_check, weights=negative, minlength=num_checks).astype(np.int64)
    sign = np.where((parity[local_check] + negative) & 1, -1.0, 1.0)

    if cfg.algorithm == 'sum-product':
        logs = np.log(np.maximum(np.abs(np.tanh(v2c / 2.0)), _TINY))
        totals = np.bincount(local_check, weights=logs, minlength=num_checks)
        product = np.minimum(np.exp(totals[local_check] - logs), np.tanh(cfg.llr_clamp / 2.0))
        return sign * 2.0 * np.arctanh(product)

    magnitude = np.abs(v2c)
    rows = np.flatnonzero(np.diff(row_ptr))
    starts = row_ptr[:-1][rows]

    min1 = np.full(num_checks, np.inf)
    min1[rows] = np.minimum.reduceat(magnitude, starts)
    hits = np.flatnonzero(magnitude == min1[local_check])
    _, first = np.unique(local_check[hits], return_index=True)
    argmin = hits[first]

    masked = magnitude.copy()
    masked[argmin] = np.inf
    min2 = np.full(num_checks, np.inf)
    min2[rows] = np.minimum.reduceat(masked, starts)

    out = min1[local_check]
    out[argmin] = min2[local_check[argmin]]
    # degree-1 checks have no other input; they pin the bit to 0
    out = np.minimum(out, cfg.llr_clamp)
    if cfg.algorithm == 'normalized-min-sum':
        out *= cfg.normalization_factor
    elif cfg.algorithm == 'offset-min-sum':
        out = np.maximum(out - cfg.offset_beta, 0.0)
    return sign * out


class BeliefPropagationDecoder:
    """
    Decoder bound to one parity-check matrix. Owns its message buffers, so
    use one instance per worker.
    """

    def __init__(self, h, cfg=None):
        self.h = h
        self.cfg = cfg or BpConfig()
        self.messages = EdgeMessages(h.nnz)
        self._layers = [(int(rows[0]), int(rows[-1]) + 1) for rows in h.layers()]

    def _flooding_iteration(self, llr, posterior):
        h, cfg, msgs = self.h, self.cfg, self.messages
        msgs.v2c[:] = np.clip(posterior[h.edge_var] - msgs.c2v, -cfg.llr_clamp, cfg.llr_clamp)
        msgs.c2v[:] = _check_messages(msgs.v2c, h.edge_check, h.row_ptr, cfg)
        return llr + np.bincount(h.edge_var, weights=msgs.c2v, minlength=h.n)

    def _layered_iteration(self, llr, posterior):
        h, cfg, msgs = self.h, self.cfg, self.messages
        for first_row, end_row in self._layers:
            lo, hi = h.row_ptr[first_row], h.row_ptr[end_row]
            if lo == hi:
                continue
            variables = h.edge_var[lo:hi]
            old = msgs.c2v[lo:hi]
            v2c = np.clip(posterior[variables] - old, -cfg.llr_clamp, cfg.llr_clamp)
            new = _check_messages(v2c, h.edge_check[lo:hi] - first_row,
                                  h.row_ptr[first_row:end_row + 1] - lo, cfg)
            posterior = posterior + np.bincount(variables, weights=new - old, minlength=h.n)
            msgs.v2c[lo:hi] = v2c
            msgs.c2v[lo:hi] = new
        return posterior

    def decode(self, llr):
        llr = np.asarray(llr, dtype=np.float64)
        if llr.ndim != 1 or llr.shape[0] != self.h.n:
            raise DimensionError(f'LLR vector has shape {llr.shape}, expected ({self.h.n},)')
        self.messages.reset()
        iterate = self._layered_iteration if self.cfg.schedule == 'layered' else self._flooding_iteration

        posterior = llr.copy()
        bits = np.zeros(self.h.n, dtype=np.uint8)
        success = False
        iteration = 0
        for iteration in range(1, self.cfg.max_iterations + 1):
            posterior = iterate(llr, posterior)
            bits = (posterior < 0).astype(np.uint8)
            if self.h.is_codeword(bits):
                success = True
                break

        logger.debug(f'{self.cfg.algorithm}/{self.cfg.schedule}: success={success} after {iteration} iterations')
        return DecodeOutcome(bits=bits, success=success, iterations=iteration,
                             details={'posterior': posterior})


def decode(h, llr, cfg=None):
    return BeliefPropagationDecoder(h, cfg).decode(llr)
