"""
Django settings for the isingldpc LDPC decoding simulator.

The project has no HTTP surface: Django provides the settings layer, the
app registry and the management-command CLI (see harness/management).

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

TOOL_VERSION = '1.0.0'

# Only used by Django internals; nothing is signed by this tool.
SECRET_KEY = config('SECRET_KEY', default='isingldpc-local-simulation-key')

# Debug mode enables the extra invariant re-checks in the annealer and machine.
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'codes',
    'channel',
    'decoders',
    'formulations',
    'annealing',
    'machine',
    'harness',
]

# No ORM models are defined; the database is only here so Django internals
# have somewhere to point.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_I18N = False

TIME_ZONE = 'UTC'

USE_TZ = True

# Result archiving. CSV files stay the product; MongoDB keeps a copy of
# every sweep manifest and its rows when enabled.
USE_MONGODB = config('USE_MONGODB', default=False, cast=bool)
MONGODB_CONNECTION_STRING = config('MONGODB_CONNECTION_STRING', default='mongodb://localhost:27017')
MONGODB_DATABASE_NAME = config('MONGODB_DATABASE_NAME', default='isingldpc')

# Seed fallback for every command that takes --seed.
ISING_LDPC_SEED = config('ISING_LDPC_SEED', default='', cast=lambda v: int(v) if v else None)

# Simulation defaults
ISING_LDPC = {
    # belief propagation
    'BP_MAX_ITERATIONS': config('BP_MAX_ITERATIONS', default=20, cast=int),
    'LLR_CLAMP': config('LLR_CLAMP', default=25.0, cast=float),
    'OFFSET_BETA': config('OFFSET_BETA', default=0.5, cast=float),
    'NORMALIZATION_FACTOR': config('NORMALIZATION_FACTOR', default=0.75, cast=float),

    # simulated annealing
    'SA_SWEEPS': config('SA_SWEEPS', default=10000, cast=int),
    'SA_NUM_ANNEALS': config('SA_NUM_ANNEALS', default=10, cast=int),
    'SA_BETA_START': config('SA_BETA_START', default=0.1, cast=float),
    'SA_BETA_END': config('SA_BETA_END', default=5.0, cast=float),

    # penalty weight shared by all annealed formulations
    'ALPHA': config('ALPHA', default=2.0, cast=float),
    'ALPHA_SWEEP': (1.0, 2.0, 4.0, 8.0),

    # augmented Ising machine, normalized units (rail = 1)
    'MACHINE_TIME_CONSTANT': config('MACHINE_TIME_CONSTANT', default=1e-9, cast=float),
    'MACHINE_TOTAL_TIME': config('MACHINE_TOTAL_TIME', default=2.2e-6, cast=float),
    'MACHINE_DT_FRACTION': config('MACHINE_DT_FRACTION', default=50, cast=int),
    'MACHINE_SPINFIX_RATE': config('MACHINE_SPINFIX_RATE', default=2e8, cast=float),
    'MACHINE_SPINFIX_DECAY': config('MACHINE_SPINFIX_DECAY', default=4e-7, cast=float),
    'MACHINE_TRAJECTORY_NODES': config('MACHINE_TRAJECTORY_NODES', default=16, cast=int),

    # harness
    'MESSAGES_SMALL_Z': 1000,
    'MESSAGES_LARGE_Z': 200,
    'LARGE_Z_THRESHOLD': 64,
    'JOBS': config('JOBS', default=0, cast=int),  # 0 -> os.cpu_count()
}

# Logging
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('codes', 'channel', 'decoders', 'formulations', 'annealing',
                    'machine', 'harness', 'mongodb_handler', 'mongo_models')
    },
}
