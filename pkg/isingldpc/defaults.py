"""Lazy accessors for the simulation defaults in settings."""

from django.conf import settings


def setting(key):
    """Callable serializer default so values are read from settings at validation time."""
    return lambda: settings.ISING_LDPC[key]


def default_seed():
    return settings.ISING_LDPC_SEED
