from django.conf import settings
from rest_framework import serializers

from isingldpc.defaults import default_seed, setting
from .models import INITIAL_STATES, INTEGRATORS, MachineConfig


class MachineConfigSerializer(serializers.Serializer):
    time_constant = serializers.FloatField(min_value=0.0, default=setting('MACHINE_TIME_CONSTANT'))
    total_time = serializers.FloatField(min_value=0.0, default=setting('MACHINE_TOTAL_TIME'))
    dt = serializers.FloatField(min_value=0.0, allow_null=True, default=None)
    integrator = serializers.ChoiceField(choices=INTEGRATORS, default='rk4')
    alpha = serializers.FloatField(default=setting('ALPHA'))
    rail = serializers.FloatField(default=1.0)
    spinfix_rate = serializers.FloatField(min_value=0.0, default=setting('MACHINE_SPINFIX_RATE'))
    spinfix_decay = serializers.FloatField(default=setting('MACHINE_SPINFIX_DECAY'))
    clip_duration = serializers.FloatField(min_value=0.0, allow_null=True, default=None)
    gain_enabled = serializers.BooleanField(default=False)
    gain_min = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.1)
    gain_tau = serializers.FloatField(default=2e-7)
    seed = serializers.IntegerField(min_value=0, allow_null=True, default=default_seed)
    initial = serializers.ChoiceField(choices=INITIAL_STATES, default='random')
    trajectory_nodes = serializers.IntegerField(min_value=1, default=setting('MACHINE_TRAJECTORY_NODES'))

    def validate(self, data):
        if not data['total_time'] > 0 or not data['time_constant'] > 0:
            raise serializers.ValidationError("time_constant and total_time must be positive")
        if data['dt'] is None:
            data['dt'] = data['time_constant'] / settings.ISING_LDPC['MACHINE_DT_FRACTION']
        if data['dt'] >= data['time_constant']:
            raise serializers.ValidationError(
                {'dt': "dt must be smaller than time_constant (integration unstable)"}
            )
        if not data['alpha'] > 0:
            raise serializers.ValidationError({'alpha': "alpha must be positive"})
        return data

    def create(self, validated_data):
        return MachineConfig(**validated_data)
