"""
Readers and writers for the two on-disk code formats.

alist (MacKay):
    n m
    max_col_deg max_row_deg
    <n column degrees>
    <m row degrees>
    <n lines: 1-based row indices of each column, zero padded>
    <m lines: 1-based column indices of each row, zero padded>

basegraph-text:
    rows cols z_max
    row col shift        (one line per entry, 0-based)

Blank lines and lines starting with '#' are ignored; reported line numbers
refer to the input file.
"""

import logging
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import CodeParseError, CodeIntegrityError
from .models import BaseGraph, ParityCheckMatrix

logger = logging.getLogger(__name__)

FORMATS = ('alist', 'basegraph-text')


def _content_lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split('#', 1)[0].strip()
        if stripped:
            yield number, stripped


def _ints(line, number, path, expected=None, at_least=None):
    try:
        values = [int(token) for token in line.split()]
    except ValueError:
        raise CodeParseError(f'expected integers, got {line!r}', line=number, path=path)
    if expected is not None and len(values) != expected:
        raise CodeParseError(f'expected {expected} values, got {len(values)}', line=number, path=path)
    if at_least is not None and len(values) < at_least:
        raise CodeParseError(f'expected at least {at_least} values, got {len(values)}',
                             line=number, path=path)
    return values


class _LineReader:
    def __init__(self, text, path):
        self.lines = list(_content_lines(text))
        self.position = 0
        self.path = path

    def next(self, what):
        if self.position >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 0
            raise CodeParseError(f'unexpected end of file while reading {what}',
                                 line=last + 1, path=self.path)
        line = self.lines[self.position]
        self.position += 1
        return line

    def remaining(self):
        return self.lines[self.position:]


def parse_alist(text, path=None):
    reader = _LineReader(text, path)
    number, line = reader.next('header')
    n, m = _ints(line, number, path, expected=2)
    if n <= 0 or m < 0:
        raise CodeParseError(f'invalid dimensions n={n} m={m}', line=number, path=path)
    number, line = reader.next('maximum degrees')
    max_col_deg, max_row_deg = _ints(line, number, path, expected=2)

    number, line = reader.next('column degrees')
    col_degrees = _ints(line, number, path, expected=n)
    number, line = reader.next('row degrees')
    row_degrees = _ints(line, number, path, expected=m)

    if max(col_degrees, default=0) != max_col_deg or max(row_degrees, default=0) != max_row_deg:
        raise CodeIntegrityError('declared maximum degrees do not match the degree lists')
    if sum(col_degrees) != sum(row_degrees):
        raise CodeIntegrityError(
            f'declared nnz differs between columns ({sum(col_degrees)}) and rows ({sum(row_degrees)})'
        )

    cols_adj = []
    for i in range(n):
        number, line = reader.next(f'column {i + 1}')
        values = _ints(line, number, path)
        listed = [v - 1 for v in values if v != 0]
        if any(v < 0 or v >= m for v in listed):
            raise CodeParseError(f'row index out of range 1..{m}', line=number, path=path)
        if len(listed) != col_degrees[i]:
            raise CodeIntegrityError(
                f'column {i + 1} declares degree {col_degrees[i]} but lists {len(listed)} rows'
            )
        cols_adj.append(listed)

    rows_adj = []
    for j in range(m):
        number, line = reader.next(f'row {j + 1}')
        values = _ints(line, number, path)
        listed = [v - 1 for v in values if v != 0]
        if any(v < 0 or v >= n for v in listed):
            raise CodeParseError(f'column index out of range 1..{n}', line=number, path=path)
        if len(listed) != row_degrees[j]:
            raise CodeIntegrityError(
                f'row {j + 1} declares degree {row_degrees[j]} but lists {len(listed)} columns'
            )
        rows_adj.append(sorted(listed))

    extra = reader.remaining()
    if extra:
        raise CodeParseError('trailing content after the row lists', line=extra[0][0], path=path)

    h = ParityCheckMatrix.from_rows(m, n, rows_adj)
    rebuilt = [sorted(int(r) for r in col) for col in h.cols_adj]
    if rebuilt != [sorted(col) for col in cols_adj]:
        raise CodeIntegrityError('column lists are not the transpose of the row lists')
    return h


def parse_basegraph(text, path=None):
    reader = _LineReader(text, path)
    number, line = reader.next('header')
    rows, cols, z_max = _ints(line, number, path, expected=3)
    entries = []
    for number, line in reader.remaining():
        r, c, s = _ints(line, number, path, expected=3)
        if not (0 <= r < rows and 0 <= c < cols):
            raise CodeParseError(f'entry ({r}, {c}) outside {rows}x{cols}', line=number, path=path)
        if s < 0:
            raise CodeParseError(f'negative shift {s}', line=number, path=path)
        entries.append((r, c, s))
    name = Path(path).stem if path else 'custom'
    try:
        return BaseGraph(rows=rows, cols=cols, entries=tuple(entries), z_max=z_max,
                         rate_label=Fraction(cols - rows, cols), name=name)
    except CodeIntegrityError as exc:
        raise CodeParseError(str(exc), line=number if entries else 1, path=path)


def guess_format(path):
    return 'alist' if Path(path).suffix.lower() == '.alist' else 'basegraph-text'


def load_code(path, fmt=None):
    """Load an alist ParityCheckMatrix or a basegraph-text BaseGraph."""
    fmt = fmt or guess_format(path)
    if fmt not in FORMATS:
        raise CodeParseError(f'unknown code format {fmt!r}; expected one of {FORMATS}')
    text = Path(path).read_text(encoding='utf-8')
    parsed = parse_alist(text, path) if fmt == 'alist' else parse_basegraph(text, path)
    logger.info(f'Loaded {fmt} code from {path}')
    return parsed


def format_alist(h):
    col_degrees = h.col_degrees
    row_degrees = h.row_degrees
    max_col = int(col_degrees.max(initial=0))
    max_row = int(row_degrees.max(initial=0))

    def padded(indices, width):
        values = [int(v) + 1 for v in indices] + [0] * (width - len(indices))
        return ' '.join(str(v) for v in values) or '0'

    lines = [
        f'{h.n} {h.m}',
        f'{max_col} {max_row}',
        ' '.join(str(int(d)) for d in col_degrees),
        ' '.join(str(int(d)) for d in row_degrees),
    ]
    lines.extend(padded(col, max_col) for col in h.cols_adj)
    lines.extend(padded(row, max_row) for row in h.rows_adj)
    return '\n'.join(lines) + '\n'


def save_alist(h, path):
    Path(path).write_text(format_alist(h), encoding='utf-8')


def format_basegraph(bg):
    lines = [f'{bg.rows} {bg.cols} {bg.z_max}']
    lines.extend(f'{r} {c} {s}' for r, c, s in bg.entries)
    return '\n'.join(lines) + '\n'


def save_basegraph(bg, path):
    Path(path).write_text(format_basegraph(bg), encoding='utf-8')


def degree_summary(h):
    return {
        'm': h.m,
        'n': h.n,
        'nnz': h.nnz,
        'max_row_degree': int(np.max(h.row_degrees, initial=0)),
        'max_col_degree': int(np.max(h.col_degrees, initial=0)),
    }
