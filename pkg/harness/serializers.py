import logging
from pathlib import Path

import numpy as np
from django.conf import settings
from rest_framework import serializers

from codes.construction import BUNDLED_GRAPHS
from codes.exceptions import ParameterError
from codes.io import FORMATS
from decoders.models import SCHEDULES
from isingldpc.defaults import default_seed, setting
from machine.models import INITIAL_STATES, INTEGRATORS
from .decoding import parse_decoder
from .models import SweepPlan

logger = logging.getLogger(__name__)


def default_messages(z):
    config = settings.ISING_LDPC
    if z is not None and z >= config['LARGE_Z_THRESHOLD']:
        return config['MESSAGES_LARGE_Z']
    return config['MESSAGES_SMALL_Z']


class SweepPlanSerializer(serializers.Serializer):
    code = serializers.CharField()
    code_format = serializers.ChoiceField(choices=FORMATS, allow_null=True, default=None)
    z = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    ebno_db = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    decoders = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    alpha = serializers.ListField(child=serializers.FloatField(), allow_empty=False,
                                  default=lambda: [settings.ISING_LDPC['ALPHA']])
    messages = serializers.IntegerField(min_value=1, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, allow_null=True, default=default_seed)
    sweeps = serializers.IntegerField(min_value=1, default=setting('SA_SWEEPS'))
    num_anneals = serializers.IntegerField(min_value=1, default=setting('SA_NUM_ANNEALS'))
    beta_start = serializers.FloatField(default=setting('SA_BETA_START'))
    beta_end = serializers.FloatField(default=setting('SA_BETA_END'))
    bp_max_iterations = serializers.IntegerField(min_value=1, default=setting('BP_MAX_ITERATIONS'))
    bp_schedule = serializers.ChoiceField(choices=SCHEDULES, default='flooding')
    machine_total_time = serializers.FloatField(default=setting('MACHINE_TOTAL_TIME'))
    machine_time_constant = serializers.FloatField(default=setting('MACHINE_TIME_CONSTANT'))
    machine_dt = serializers.FloatField(min_value=0.0, allow_null=True, default=None)
    machine_spinfix_rate = serializers.FloatField(min_value=0.0, default=setting('MACHINE_SPINFIX_RATE'))
    machine_spinfix_decay = serializers.FloatField(default=setting('MACHINE_SPINFIX_DECAY'))
    machine_integrator = serializers.ChoiceField(choices=INTEGRATORS, default='rk4')
    machine_initial = serializers.ChoiceField(choices=INITIAL_STATES, default='random')

    def to_internal_value(self, data):
        # "alpha = sweep" expands to the configured penalty-weight grid
        if list(data.get('alpha') or []) == ['sweep']:
            data = {**data, 'alpha': list(settings.ISING_LDPC['ALPHA_SWEEP'])}
        return super().to_internal_value(data)

    def validate_code(self, value):
        if value not in BUNDLED_GRAPHS and not Path(value).is_file():
            raise serializers.ValidationError(f"Code file {value} does not exist")
        return value

    def validate_decoders(self, value):
        seen = set()
        for name in value:
            try:
                parse_decoder(name)
            except ParameterError as exc:
                raise serializers.ValidationError(str(exc))
            if name in seen:
                raise serializers.ValidationError(f"Decoder {name} is listed twice")
            seen.add(name)
        return value

    def validate_alpha(self, value):
        if any(not a > 0 for a in value):
            raise serializers.ValidationError("alpha values must be positive")
        return value

    def validate(self, data):
        if data['code'] in BUNDLED_GRAPHS and data['z'] is None:
            raise serializers.ValidationError({'z': "Bundled base graphs need an expansion factor"})
        if not 0 < data['beta_start'] <= data['beta_end']:
            raise serializers.ValidationError("Need 0 < beta_start <= beta_end")
        if data['messages'] is None:
            data['messages'] = default_messages(data['z'])
        return data

    def create(self, validated_data):
        if validated_data['seed'] is None:
            validated_data['seed'] = int(np.random.SeedSequence().generate_state(1)[0])
            logger.info(f"No sweep seed given, drew {validated_data['seed']}")
        for key in ('ebno_db', 'decoders', 'alpha'):
            validated_data[key] = tuple(validated_data[key])
        return SweepPlan(**validated_data)
