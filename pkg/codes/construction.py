"""
Protograph lifting and the bundled 5G-NR-shaped base graphs.

The bundled graphs reproduce the sparsity layout of the 5G-NR base graphs
(a high-degree core with a double-diagonal parity part, followed by a
diagonal extension block) with seeded pseudo-random shifts. Real 38.212
shift tables can be loaded from basegraph-text files instead.
"""

import logging
from fractions import Fraction

import numpy as np

from .exceptions import InvalidExpansionFactor
from .models import BaseGraph, ParityCheckMatrix

logger = logging.getLogger(__name__)

BUNDLED_SEED = 20230516
BUNDLED_Z_MAX = 384

# (row, col) of the double-diagonal core parity block, relative to the
# first core parity column.
_CORE_PARITY = ((0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 2), (2, 3), (3, 0), (3, 3))

# Row weights (including the parity part) of the core and extension rows.
_BG1_CORE_WEIGHTS = (19, 19, 19, 19)
_BG1_EXTENSION_WEIGHTS = (
    3, 8, 9, 7, 10, 9, 7, 8, 7, 6,
    7, 7, 6, 6, 6, 6, 6, 6, 5, 5,
    6, 5, 5, 4, 5, 5, 5, 5, 5, 5,
    5, 5, 5, 4, 5, 5, 4, 5, 4, 5,
    5, 4,
)
_BG2_CORE_WEIGHTS = (8, 10, 8, 10)
_BG2_EXTENSION_WEIGHTS = (
    5, 6, 5, 5, 5, 5, 5, 5, 4, 4,
    4, 4, 4, 4, 4, 4, 4, 4, 4, 4,
    4, 4, 4, 4, 4, 4, 4, 4, 4, 4,
    4, 4, 4, 4, 4, 4, 4, 4,
)


def expand_base_graph(bg, z):
    """
    Lift `bg` by expansion factor `z`.

    Entry (r, c, s) becomes a z x z identity circularly shifted by s mod z,
    i.e. ones at (r*z + i, c*z + (i + s) mod z).
    """
    if z is None or int(z) < 1:
        raise InvalidExpansionFactor(f'expansion factor must be >= 1, got {z}')
    z = int(z)
    if not bg.entries:
        return ParityCheckMatrix.from_coo(bg.rows * z, bg.cols * z, [], [], layer_size=z)

    entries = np.asarray(bg.entries, dtype=np.int64)
    proto_rows, proto_cols, shifts = entries[:, 0], entries[:, 1], entries[:, 2] % z
    offsets = np.arange(z)
    rows = (proto_rows[:, None] * z + offsets).ravel()
    cols = (proto_cols[:, None] * z + (offsets + shifts[:, None]) % z).ravel()
    h = ParityCheckMatrix.from_coo(bg.rows * z, bg.cols * z, rows, cols, layer_size=z)
    logger.debug(f'Expanded {bg.name} by Z={z}: {h.m}x{h.n}, nnz={h.nnz}')
    return h


def _protograph(name, info_cols, core_weights, extension_weights, rate_label, seed):
    rng = np.random.default_rng(seed)
    core_rows = len(core_weights)
    parity_start = info_cols
    extension_start = info_cols + core_rows
    rows = core_rows + len(extension_weights)
    cols = extension_start + len(extension_weights)

    pattern = []
    core_parity = {}
    for r, c in _CORE_PARITY:
        core_parity.setdefault(r, []).append(parity_start + c)
    for r, weight in enumerate(core_weights):
        parity = core_parity[r]
        info = rng.choice(info_cols, size=weight - len(parity), replace=False)
        pattern.extend((r, int(c)) for c in sorted(info))
        pattern.extend((r, c) for c in parity)
    for offset, weight in enumerate(extension_weights):
        r = core_rows + offset
        linked = rng.choice(extension_start, size=weight - 1, replace=False)
        pattern.extend((r, int(c)) for c in sorted(linked))
        pattern.append((r, extension_start + offset))

    shifts = rng.integers(0, BUNDLED_Z_MAX, size=len(pattern))
    entries = tuple((r, c, int(s)) for (r, c), s in zip(pattern, shifts))
    return BaseGraph(rows=rows, cols=cols, entries=entries, z_max=BUNDLED_Z_MAX,
                     rate_label=rate_label, name=name)


def bundled_bg1():
    """46x68 BG1-shaped protograph with 316 entries (22 information columns)."""
    return _protograph('bundled-bg1', 22, _BG1_CORE_WEIGHTS, _BG1_EXTENSION_WEIGHTS,
                       Fraction(1, 3), BUNDLED_SEED)


def bundled_bg2():
    """42x52 BG2-shaped protograph with 197 entries (10 information columns)."""
    return _protograph('bundled-bg2', 10, _BG2_CORE_WEIGHTS, _BG2_EXTENSION_WEIGHTS,
                       Fraction(1, 5), BUNDLED_SEED + 1)


BUNDLED_GRAPHS = {
    'bundled-bg1': bundled_bg1,
    'bundled-bg2': bundled_bg2,
}
