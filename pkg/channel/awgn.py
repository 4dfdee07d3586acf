"""
BPSK modulation over an AWGN channel.

Eb/No convention: sigma^2 = 1 / (2 * rate * 10^(EbNo/10)) with unit
symbol energy; the same convention is printed in every harness output.
"""

import math
from fractions import Fraction

import numpy as np
from scipy.special import erfc

from codes.exceptions import ParameterError
from codes.models import as_bits
from .models import ChannelObservation

SIGMA_CONVENTION = 'sigma^2 = 1/(2*rate*10^(EbNo_dB/10)), BPSK 0->+1 1->-1, unit symbol energy'

# Stand-in for sigma^2 in the noiseless (EbNo = +inf) limit.
MIN_NOISE_VARIANCE = 1e-300


def _check_rate(rate):
    rate = Fraction(rate).limit_denominator(1 << 20) if not isinstance(rate, Fraction) else rate
    if not 0 < rate <= 1:
        raise ParameterError(f'code rate must lie in (0, 1], got {rate}')
    return rate


def modulate(bits):
    """Bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * as_bits(bits).astype(np.float64)


def noise_variance(ebno_db, rate):
    rate = _check_rate(rate)
    if math.isinf(ebno_db) and ebno_db > 0:
        return MIN_NOISE_VARIANCE
    variance = 1.0 / (2.0 * float(rate) * 10.0 ** (ebno_db / 10.0))
    return max(variance, MIN_NOISE_VARIANCE)


def transmit(signal, ebno_db, rate, rng):
    """Add i.i.d. N(0, sigma^2) noise to `signal` (rng: numpy Generator)."""
    rate = _check_rate(rate)
    signal = np.asarray(signal, dtype=np.float64)
    variance = noise_variance(ebno_db, rate)
    noise = rng.standard_normal(signal.shape[0])
    if variance > MIN_NOISE_VARIANCE:
        received = signal + math.sqrt(variance) * noise
    else:
        received = signal.copy()
    return ChannelObservation(received=received, noise_variance=variance,
                              ebno_db=float(ebno_db), rate=rate)


def llr_init(observation):
    return 2.0 * np.asarray(observation.received) / observation.noise_variance


def hard_decision(values):
    """1 where the value is negative; exact zeros decide 0."""
    return (np.asarray(values) < 0).astype(np.uint8)


def uncoded_ber(ebno_db, rate=1):
    """Q(sqrt(2 * rate * EbNo)) for hard-decision BPSK."""
    rate = _check_rate(rate)
    snr = 2.0 * float(rate) * 10.0 ** (np.asarray(ebno_db, dtype=np.float64) / 10.0)
    return 0.5 * erfc(np.sqrt(snr) / math.sqrt(2.0))
