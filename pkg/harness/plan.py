"""
Sweep plan files: one `key = value` per line, `#` starts a comment and
list values are comma separated.

    code = bundled-bg1
    z = 4
    ebno_db = 2, 3, 4
    decoders = oms@7, oms@1, sa-ho, machine
"""

from pathlib import Path

from codes.exceptions import ConfigurationError

LIST_KEYS = ('ebno_db', 'decoders', 'alpha')
SCALAR_KEYS = (
    'code', 'code_format', 'z', 'messages', 'seed',
    'sweeps', 'num_anneals', 'beta_start', 'beta_end',
    'bp_max_iterations', 'bp_schedule',
    'machine_total_time', 'machine_time_constant', 'machine_dt',
    'machine_spinfix_rate', 'machine_spinfix_decay', 'machine_integrator', 'machine_initial',
)
PLAN_KEYS = LIST_KEYS + SCALAR_KEYS


def parse_plan(text, path='<plan>'):
    """Return the raw plan as a dict of strings (lists for LIST_KEYS)."""
    plan = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f'{path}:{number}: expected "key = value", got {raw.strip()!r}')
        if key not in PLAN_KEYS:
            raise ConfigurationError(f'{path}:{number}: unknown plan key {key!r}')
        if key in plan:
            raise ConfigurationError(f'{path}:{number}: {key!r} is set twice')
        if not value:
            raise ConfigurationError(f'{path}:{number}: {key!r} has no value')
        if key in LIST_KEYS:
            items = [item.strip() for item in value.split(',')]
            if any(not item for item in items):
                raise ConfigurationError(f'{path}:{number}: empty item in {key!r}')
            plan[key] = items
        else:
            plan[key] = value
    return plan


def load_plan(path):
    return parse_plan(Path(path).read_text(encoding='utf-8'), path=str(path))


def format_plan(data):
    """Render a plan dict back to the line format, keys in PLAN_KEYS order."""
    lines = []
    for key in PLAN_KEYS:
        value = data.get(key)
        if value is None:
            continue
        if key in LIST_KEYS:
            value = ', '.join(str(item) for item in value)
        lines.append(f'{key} = {value}')
    return '\n'.join(lines) + '\n'
